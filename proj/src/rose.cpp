#include "rose2/rose.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace rose2 {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
}  // namespace

double DirectionHistogram::bin_width() const {
  return amplitude.empty() ? 0.0 : kPi / static_cast<double>(amplitude.size());
}

std::vector<double> ScoreGrid::values() const {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < score.size(); ++i) {
    if (!std::isnan(score.data()[i])) out.push_back(score.data()[i]);
  }
  return out;
}

double wrap_pi(double a) {
  a = std::fmod(a, kPi);
  if (a < 0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

double angle_distance(double a, double b) {
  const double d = std::abs(wrap_pi(a) - wrap_pi(b));
  return std::min(d, kPi - d);
}

Spectrum dft_spectrum(const Raster<double>& indicator) {
  const int side = next_pow2(static_cast<int>(std::max(indicator.rows(), indicator.cols())));
  ComplexRaster<double> data = ComplexRaster<double>::Zero(side, side);
  data.topLeftCorner(indicator.rows(), indicator.cols()) = indicator.cast<std::complex<double>>();
  fft2_inplace(data, false);
  return Spectrum{side, fftshift(data)};
}

Spectrum dft_spectrum(const OccupancyGrid& grid) {
  if (grid.count(kOccupied) == 0) throw PipelineError("rose", "map has no occupied cells");
  return dft_spectrum(Raster<double>(grid.mask(kOccupied).cast<double>()));
}

DirectionHistogram directional_amplitude(const Spectrum& spectrum, int bins) {
  if (bins < 16) throw std::invalid_argument("directional_amplitude needs at least 16 bins");
  DirectionHistogram hist;
  hist.amplitude.assign(static_cast<std::size_t>(bins), 0.0);
  const int half = spectrum.side / 2;
  const double width = kPi / bins;
  // Inscribed disk only, so every direction sees the same radial extent.
  const long radius2 = static_cast<long>(half) * half;
  for (int row = 0; row < spectrum.side; ++row) {
    const int v = row - half;
    for (int col = 0; col < spectrum.side; ++col) {
      const int u = col - half;
      if (u == 0 && v == 0) continue;
      if (static_cast<long>(u) * u + static_cast<long>(v) * v > radius2) continue;
      const double angle = wrap_pi(std::atan2(static_cast<double>(v), static_cast<double>(u)));
      const double t = angle / width;
      const double amp = std::abs(spectrum.bins(row, col));
      const int lower = static_cast<int>(std::floor(t));
      // Lattice points on a bin boundary (the diagonals, for even bin counts)
      // are shared so neither neighbor is favored.
      if (std::abs(t - lower - 0.5) < 1e-9) {
        hist.amplitude[static_cast<std::size_t>(lower % bins)] += 0.5 * amp;
        hist.amplitude[static_cast<std::size_t>((lower + 1) % bins)] += 0.5 * amp;
        continue;
      }
      const int bin = static_cast<int>(std::lround(t)) % bins;
      hist.amplitude[static_cast<std::size_t>(bin)] += amp;
    }
  }
  return hist;
}

DirectionSet select_dominant_directions(const DirectionHistogram& histogram, int max_directions,
                                        double min_prominence, double merge_radius_deg) {
  const auto& h = histogram.amplitude;
  const int n = static_cast<int>(h.size());
  if (n < 3) throw std::invalid_argument("histogram too small");
  const double hmax = *std::max_element(h.begin(), h.end());
  const double hmin = *std::min_element(h.begin(), h.end());
  if (!(hmax > 0.0)) throw PipelineError("rose", "direction histogram is all zeros");
  auto at = [&](int i) { return h[static_cast<std::size_t>(((i % n) + n) % n)]; };

  struct Peak {
    int bin;
    double prominence;
  };
  std::vector<Peak> peaks;
  for (int i = 0; i < n; ++i) {
    if (!(at(i) > at(i - 1) && at(i) >= at(i + 1))) continue;
    // Walk each way until something higher shows up; the higher of the two
    // valley floors is the peak's base.
    auto valley = [&](int step) {
      double low = at(i);
      for (int k = 1; k < n; ++k) {
        const double x = at(i + step * k);
        if (x > at(i)) return low;
        low = std::min(low, x);
      }
      return hmin;
    };
    const double base = std::max(valley(-1), valley(+1));
    peaks.push_back({i, at(i) - base});
  }
  if (peaks.empty()) {
    // Flat plateau: fall back to the first maximal bin.
    const int i = static_cast<int>(std::max_element(h.begin(), h.end()) - h.begin());
    peaks.push_back({i, 0.0});
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.prominence > b.prominence; });

  const double width = histogram.bin_width();
  const double merge_radius = merge_radius_deg * kDeg;
  std::vector<double> spectral;
  std::vector<double> scores;
  for (const Peak& p : peaks) {
    if (static_cast<int>(spectral.size()) >= max_directions) break;
    if (p.prominence < min_prominence * hmax && !spectral.empty()) continue;
    const double y0 = at(p.bin - 1), y1 = at(p.bin), y2 = at(p.bin + 1);
    const double denom = y0 - 2.0 * y1 + y2;
    double offset = denom != 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    const double angle = wrap_pi((p.bin + offset) * width);
    const bool separated = std::all_of(spectral.begin(), spectral.end(), [&](double a) {
      return angle_distance(a, angle) > merge_radius;
    });
    if (!separated) continue;
    spectral.push_back(angle);
    scores.push_back(y1);
  }

  DirectionSet out;
  std::vector<std::size_t> order(spectral.size());
  std::vector<double> walls(spectral.size());
  for (std::size_t i = 0; i < spectral.size(); ++i) walls[i] = wrap_pi(spectral[i] + kPi / 2);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return walls[a] < walls[b]; });
  for (std::size_t i : order) {
    out.angles.push_back(walls[i]);
    out.scores.push_back(scores[i]);
  }
  return out;
}

ScoreGrid structure_score(const OccupancyGrid& grid, const DirectionSet& directions,
                          double ridge_half_width_deg) {
  if (directions.empty()) throw std::invalid_argument("structure_score needs at least one direction");
  Spectrum spectrum = dft_spectrum(grid);
  const int side = spectrum.side;
  const int half = side / 2;
  const double half_width = ridge_half_width_deg * kDeg;
  std::vector<double> ridges;
  for (double psi : directions.angles) ridges.push_back(wrap_pi(psi - kPi / 2));

  for (int row = 0; row < side; ++row) {
    const int v = row - half;
    for (int col = 0; col < side; ++col) {
      const int u = col - half;
      if (u == 0 && v == 0) continue;
      const double angle = std::atan2(static_cast<double>(v), static_cast<double>(u));
      const bool keep = std::any_of(ridges.begin(), ridges.end(), [&](double a) {
        return angle_distance(angle, a) <= half_width;
      });
      if (!keep) spectrum.bins(row, col) = 0.0;
    }
  }
  ComplexRaster<double> data = fftshift(spectrum.bins);
  fft2_inplace(data, true);

  ScoreGrid out;
  out.score = Raster<double>::Constant(grid.height(), grid.width(),
                                       std::numeric_limits<double>::quiet_NaN());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (grid.at(c, r) != kOccupied) continue;
      const double raw = std::max(0.0, data(r, c).real());
      out.score(r, c) = raw;
      lo = std::min(lo, raw);
      hi = std::max(hi, raw);
    }
  }
  const bool collapsed = !(hi - lo > 1e-9 * std::max(1.0, std::abs(hi)));
  for (Eigen::Index i = 0; i < out.score.size(); ++i) {
    double& s = out.score.data()[i];
    if (std::isnan(s)) continue;
    s = collapsed ? 1.0 : (s - lo) / (hi - lo);
  }
  return out;
}

OccupancyGrid apply_threshold(const OccupancyGrid& grid, const ScoreGrid& scores, double threshold) {
  OccupancyGrid out = grid;
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (grid.at(c, r) == kOccupied && !(scores.score(r, c) >= threshold)) out.set(c, r, kFree);
    }
  }
  return out;
}

std::vector<double> score_quantiles(const ScoreGrid& scores) {
  std::vector<double> values = scores.values();
  std::vector<double> out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  for (int k = 1; k <= 19; ++k) {
    const double q = 0.05 * k;
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
    out.push_back(values[idx]);
  }
  return out;
}

CleanMap auto_threshold(const OccupancyGrid& grid, const ScoreGrid& scores,
                        const SegmentCounter& segment_counter, RatioInterval interval) {
  if (!(interval.low < interval.high)) throw std::invalid_argument("ratio interval must be ordered");
  const std::size_t free_cells = grid.count(kFree);
  if (free_cells == 0) throw PipelineError("rose", "map has no free cells");
  const std::vector<double> candidates = score_quantiles(scores);
  if (candidates.empty()) throw PipelineError("rose", "no scored cells");

  // The first in-interval candidate wins, so scanning in ascending order and
  // stopping there gives the same answer as scoring the whole list.
  double best_threshold = candidates.front();
  double best_ratio = 0.0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (double t : candidates) {
    const OccupancyGrid clean = apply_threshold(grid, scores, t);
    const double ratio =
        1000.0 * static_cast<double>(segment_counter(clean)) / static_cast<double>(free_cells);
    if (ratio >= interval.low && ratio <= interval.high) {
      return CleanMap{clean, t, ratio};
    }
    const double distance = ratio < interval.low ? interval.low - ratio : ratio - interval.high;
    if (distance < best_distance) {
      best_distance = distance;
      best_threshold = t;
      best_ratio = ratio;
    }
  }
  return CleanMap{apply_threshold(grid, scores, best_threshold), best_threshold, best_ratio};
}

DirectionHistogram smooth_histogram(const DirectionHistogram& histogram, int half_width) {
  const auto& h = histogram.amplitude;
  const int n = static_cast<int>(h.size());
  if (half_width <= 0 || n == 0) return histogram;
  DirectionHistogram out;
  out.amplitude.assign(h.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int k = -half_width; k <= half_width; ++k) sum += h[static_cast<std::size_t>(((i + k) % n + n) % n)];
    out.amplitude[static_cast<std::size_t>(i)] = sum / (2 * half_width + 1);
  }
  return out;
}

RoseResult analyze_structure(const OccupancyGrid& grid, const RoseParams& params) {
  RoseResult result;
  result.spectrum = dft_spectrum(grid);
  result.histogram = directional_amplitude(result.spectrum, params.histogram_bins);
  result.directions = select_dominant_directions(smooth_histogram(result.histogram, params.smoothing_half_width),
                                                 params.max_directions,
                                                 params.min_prominence, params.merge_radius_deg);
  result.scores = structure_score(grid, result.directions, params.ridge_half_width_deg);
  return result;
}

}  // namespace rose2
