#pragma once

// Frequency-domain structure extraction: dominant wall directions, per-cell
// structure scores and the auto-thresholded clean map.

#include "rose2/fft.hpp"
#include "rose2/gridmap.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace rose2 {

/// DC-centered 2D spectrum of the Occupied-cell indicator. Bin (side/2, side/2)
/// is DC; bin (row, col) has frequency (u, v) = (col - side/2, row - side/2).
struct Spectrum {
  int side = 0;
  ComplexRaster<double> bins;
};

/// Cumulative spectral amplitude per angular bin over [0, pi). Bin i is
/// centered on angle i * bin_width().
struct DirectionHistogram {
  std::vector<double> amplitude;
  double bin_width() const;
  double bin_center(int i) const { return i * bin_width(); }
};

/// Dominant wall directions, ascending in [0, pi), with the histogram
/// amplitude at each peak.
struct DirectionSet {
  std::vector<double> angles;
  std::vector<double> scores;

  bool empty() const { return angles.empty(); }
  std::size_t size() const { return angles.size(); }
};

/// Structure score per Occupied cell in [0, 1]; NaN on every other cell.
struct ScoreGrid {
  Raster<double> score;

  bool defined(int col, int row) const { return !std::isnan(score(row, col)); }
  std::vector<double> values() const;
};

struct CleanMap {
  OccupancyGrid grid;
  double threshold = 0.0;
  /// Segments per 1000 Free cells measured at the chosen threshold.
  double ratio = 0.0;
};

struct RoseParams {
  int histogram_bins = 360;
  int max_directions = 4;
  double min_prominence = 0.20;  // fraction of the histogram maximum
  double merge_radius_deg = 5.0;
  double ridge_half_width_deg = 2.5;
  /// Circular box filter half-width, in bins, applied before peak picking.
  int smoothing_half_width = 1;
  double ratio_low = 0.2;   // segments per 1000 Free cells
  double ratio_high = 2.0;
};

/// Circular distance between two angles taken modulo pi.
double angle_distance(double a, double b);
/// Wraps into [0, pi).
double wrap_pi(double a);

Spectrum dft_spectrum(const OccupancyGrid& grid);
/// Same transform for an arbitrary 0/1 indicator raster.
Spectrum dft_spectrum(const Raster<double>& indicator);

DirectionHistogram directional_amplitude(const Spectrum& spectrum, int bins);

/// Picks prominent circular peaks of a spectral histogram and returns the
/// corresponding wall directions (spectral angle + pi/2).
DirectionSet select_dominant_directions(const DirectionHistogram& histogram, int max_directions,
                                        double min_prominence, double merge_radius_deg = 5.0);

/// Circular moving average over 2 * half_width + 1 bins.
DirectionHistogram smooth_histogram(const DirectionHistogram& histogram, int half_width);

ScoreGrid structure_score(const OccupancyGrid& grid, const DirectionSet& directions,
                          double ridge_half_width_deg);

/// Keeps Occupied cells with score >= threshold; the rest become Free.
OccupancyGrid apply_threshold(const OccupancyGrid& grid, const ScoreGrid& scores, double threshold);

using SegmentCounter = std::function<std::size_t(const OccupancyGrid&)>;

struct RatioInterval {
  double low = 0.2;
  double high = 2.0;
};

CleanMap auto_threshold(const OccupancyGrid& grid, const ScoreGrid& scores,
                        const SegmentCounter& segment_counter, RatioInterval interval);

/// The candidate thresholds scanned by auto_threshold, ascending.
std::vector<double> score_quantiles(const ScoreGrid& scores);

struct RoseResult {
  Spectrum spectrum;
  DirectionHistogram histogram;
  DirectionSet directions;
  ScoreGrid scores;
};

/// Spectrum, histogram, directions and scores in one pass.
RoseResult analyze_structure(const OccupancyGrid& grid, const RoseParams& params);

}  // namespace rose2
