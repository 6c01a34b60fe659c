#include "rose2/walls.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace rose2 {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

// Weighted median; when the cumulative weight lands exactly on half the
// total, averages with the next value (plain median for equal weights).
double weighted_median(std::vector<std::pair<double, double>> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  double total = 0.0;
  for (const auto& [x, w] : v) total += w;
  double cum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    cum += v[i].second;
    if (cum * 2.0 == total && i + 1 < v.size()) return 0.5 * (v[i].first + v[i + 1].first);
    if (cum * 2.0 >= total) return v[i].first;
  }
  return v.back().first;
}
}  // namespace

LineSegment::LineSegment(Vec2 a, Vec2 b) : a_(std::move(a)), b_(std::move(b)) {
  const Vec2 d = b_ - a_;
  if (d.norm() <= 0.0) throw std::invalid_argument("degenerate line segment");
  angle_ = wrap_pi(std::atan2(d.y(), d.x()));
}

LineSegment::LineSegment(Vec2 a, Vec2 b, double angle) : a_(std::move(a)), b_(std::move(b)), angle_(angle) {}

double segment_distance(const LineSegment& s, const LineSegment& t) {
  return segment_distance<double>(s.a(), s.b(), t.a(), t.b());
}

double WallCluster::total_length() const {
  double sum = 0.0;
  for (const auto& s : segments) sum += s.length();
  return sum;
}

Line2 RepresentativeLine::line() const { return Line2{anchor, direction_of(direction)}; }

double RepresentativeLine::offset() const { return normal_of(direction).dot(anchor); }

// Progressive probabilistic Hough transform: points vote in random order; as
// soon as a bin reaches the vote threshold the corresponding line is walked
// from the current point, its pixels are consumed and their votes withdrawn.
std::vector<LineSegment> hough_segments(const OccupancyGrid& clean, const HoughParams& params) {
  const int width = clean.width(), height = clean.height();
  std::vector<LineSegment> segments;
  PointSet points = occupied_points(clean);
  if (static_cast<int>(points.size()) < params.votes) return segments;

  const int numangle = std::max(1, static_cast<int>(std::lround(kPi / (params.theta_res_deg * kDeg))));
  const int numrho = static_cast<int>(std::lround(((width + height) * 2 + 1) / params.rho_res));
  const double theta = kPi / numangle;
  std::vector<float> trig(static_cast<std::size_t>(2 * numangle));
  for (int n = 0; n < numangle; ++n) {
    trig[2 * n] = static_cast<float>(std::cos(n * theta) / params.rho_res);
    trig[2 * n + 1] = static_cast<float>(std::sin(n * theta) / params.rho_res);
  }
  std::vector<int> accum(static_cast<std::size_t>(numangle) * numrho, 0);
  Raster<std::uint8_t> mask = clean.mask(kOccupied);
  Raster<std::uint8_t> voted = Raster<std::uint8_t>::Zero(height, width);
  auto vote = [&](int x, int y, int delta, int* best_n) {
    int best = params.votes - 1;
    for (int n = 0; n < numangle; ++n) {
      const int r = static_cast<int>(std::lround(x * trig[2 * n] + y * trig[2 * n + 1])) + (numrho - 1) / 2;
      int& cell = accum[static_cast<std::size_t>(n) * numrho + r];
      cell += delta;
      if (best_n && cell > best) {
        best = cell;
        *best_n = n;
      }
    }
    return best;
  };

  std::mt19937_64 rng(params.seed);
  const int shift = 16;
  const double max_gap = params.max_gap;
  for (std::size_t count = points.size(); count > 0; --count) {
    const std::size_t idx = static_cast<std::size_t>(rng() % count);
    const CellIndex pt = points[idx];
    points[idx] = points[count - 1];
    if (!mask(pt.row, pt.col)) continue;

    int max_n = -1;
    const int max_val = vote(pt.col, pt.row, +1, &max_n);
    voted(pt.row, pt.col) = 1;
    if (max_n < 0 || max_val < params.votes) continue;

    const double a = -trig[2 * max_n + 1];
    const double b = trig[2 * max_n];
    long x0 = pt.col, y0 = pt.row, dx0, dy0;
    const bool xflag = std::abs(a) > std::abs(b);
    if (xflag) {
      dx0 = a > 0 ? 1 : -1;
      dy0 = std::lround(b * (1 << shift) / std::abs(a));
      y0 = (y0 << shift) + (1 << (shift - 1));
    } else {
      dy0 = b > 0 ? 1 : -1;
      dx0 = std::lround(a * (1 << shift) / std::abs(b));
      x0 = (x0 << shift) + (1 << (shift - 1));
    }
    auto cell_of = [&](long x, long y) {
      return xflag ? CellIndex{static_cast<int>(x), static_cast<int>(y >> shift)}
                   : CellIndex{static_cast<int>(x >> shift), static_cast<int>(y)};
    };

    CellIndex line_end[2] = {pt, pt};
    for (int k = 0; k < 2; ++k) {
      int gap = 0;
      long x = x0, y = y0;
      const long dx = k ? -dx0 : dx0, dy = k ? -dy0 : dy0;
      for (;; x += dx, y += dy) {
        const CellIndex c = cell_of(x, y);
        if (!clean.in_bounds(c.col, c.row)) break;
        if (mask(c.row, c.col)) {
          gap = 0;
          line_end[k] = c;
        } else if (++gap > max_gap) {
          break;
        }
      }
    }
    const Vec2 ea(line_end[0].col + 0.5, line_end[0].row + 0.5);
    const Vec2 eb(line_end[1].col + 0.5, line_end[1].row + 0.5);
    const bool good_line = (eb - ea).norm() >= params.min_len;

    for (int k = 0; k < 2; ++k) {
      long x = x0, y = y0;
      const long dx = k ? -dx0 : dx0, dy = k ? -dy0 : dy0;
      for (;; x += dx, y += dy) {
        const CellIndex c = cell_of(x, y);
        if (!clean.in_bounds(c.col, c.row)) break;
        if (mask(c.row, c.col)) {
          if (good_line && voted(c.row, c.col)) {
            vote(c.col, c.row, -1, nullptr);
            voted(c.row, c.col) = 0;
          }
          mask(c.row, c.col) = 0;
        }
        if (c == line_end[k]) break;
      }
    }
    if (good_line) segments.emplace_back(ea, eb);
  }
  return segments;
}

SegmentCounter hough_segment_counter(const HoughParams& params) {
  return [params](const OccupancyGrid& grid) { return hough_segments(grid, params).size(); };
}

std::vector<std::vector<int>> cluster_by_angle(const std::vector<LineSegment>& segments,
                                               double angular_eps) {
  std::vector<std::vector<int>> groups;
  const int n = static_cast<int>(segments.size());
  if (n == 0) return groups;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return segments[static_cast<std::size_t>(i)].angle() < segments[static_cast<std::size_t>(j)].angle();
  });
  auto angle = [&](int k) { return segments[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])].angle(); };
  // Gap following sorted position k (the last one wraps around through pi).
  auto gap_after = [&](int k) {
    return k + 1 < n ? angle(k + 1) - angle(k) : kPi - angle(n - 1) + angle(0);
  };
  int start = -1;
  for (int k = 0; k < n; ++k) {
    if (gap_after(k) > angular_eps) {
      start = (k + 1) % n;
      break;
    }
  }
  if (start < 0) {
    groups.emplace_back(order.begin(), order.end());
  } else {
    std::vector<int> current;
    for (int step = 0; step < n; ++step) {
      const int k = (start + step) % n;
      current.push_back(order[static_cast<std::size_t>(k)]);
      if (gap_after(k) > angular_eps) {
        groups.push_back(std::move(current));
        current.clear();
      }
    }
    if (!current.empty()) groups.push_back(std::move(current));
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return groups;
}

double mean_angle(const std::vector<LineSegment>& segments) {
  if (segments.size() == 1) return segments.front().angle();
  double s = 0.0, c = 0.0;
  for (const auto& seg : segments) {
    s += seg.length() * std::sin(2.0 * seg.angle());
    c += seg.length() * std::cos(2.0 * seg.angle());
  }
  return wrap_pi(0.5 * std::atan2(s, c));
}

Vec2 central_point(const std::vector<LineSegment>& segments, double direction) {
  const Vec2 d = direction_of(direction);
  const Vec2 n = normal_of(direction);
  std::vector<std::pair<double, double>> across, along;
  for (const auto& s : segments) {
    across.emplace_back(n.dot(s.midpoint()), s.length());
    along.emplace_back(d.dot(s.midpoint()), s.length());
  }
  return weighted_median(std::move(across)) * n + weighted_median(std::move(along)) * d;
}

std::vector<WallCluster> cluster_spatial(const std::vector<LineSegment>& group, double eps, int min_pts) {
  if (!(eps > 0.0) || min_pts < 1) throw std::invalid_argument("DBSCAN needs eps > 0 and min_pts >= 1");
  const std::size_t n = group.size();
  std::vector<std::vector<int>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (segment_distance(group[i], group[j]) <= eps) neighbors[i].push_back(static_cast<int>(j));
    }
  }
  constexpr int kUnvisited = -2, kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    if (static_cast<int>(neighbors[i].size()) < min_pts) {
      label[i] = kNoise;
      continue;
    }
    const int id = next++;
    label[i] = id;
    std::vector<int> frontier(neighbors[i].begin(), neighbors[i].end());
    for (std::size_t f = 0; f < frontier.size(); ++f) {
      const auto j = static_cast<std::size_t>(frontier[f]);
      if (label[j] == kNoise) label[j] = id;
      if (label[j] != kUnvisited) continue;
      label[j] = id;
      if (static_cast<int>(neighbors[j].size()) >= min_pts) {
        frontier.insert(frontier.end(), neighbors[j].begin(), neighbors[j].end());
      }
    }
  }
  std::vector<WallCluster> clusters(static_cast<std::size_t>(next));
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0) {
      clusters[static_cast<std::size_t>(label[i])].segments.push_back(group[i]);
    } else {
      WallCluster single;
      single.segments.push_back(group[i]);
      clusters.push_back(std::move(single));
    }
  }
  for (auto& c : clusters) {
    c.direction = mean_angle(c.segments);
    c.center = central_point(c.segments, c.direction);
    c.aligned = false;
  }
  return clusters;
}

double snap_direction(double angle, const DirectionSet& directions) {
  if (directions.empty()) throw std::invalid_argument("no dominant directions to align to");
  double best = directions.angles.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (double psi : directions.angles) {
    const double d = angle_distance(angle, psi);
    if (d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && psi < best)) {
      best_d = std::min(d, best_d);
      best = psi;
    }
  }
  return best;
}

WallCluster align_to_direction(const WallCluster& cluster, const DirectionSet& directions) {
  const double psi = snap_direction(mean_angle(cluster.segments), directions);
  const Vec2 d = direction_of(psi);
  WallCluster out;
  out.direction = psi;
  out.aligned = true;
  for (const auto& s : cluster.segments) {
    if (s.angle() == psi) {
      out.segments.push_back(LineSegment(s.a(), s.b(), psi));
      continue;
    }
    const Vec2 m = s.midpoint();
    double ta = d.dot(s.a() - m), tb = d.dot(s.b() - m);
    if (ta > tb) std::swap(ta, tb);
    out.segments.emplace_back(m + ta * d, m + tb * d, psi);
  }
  out.center = central_point(out.segments, psi);
  return out;
}

std::vector<WallCluster> merge_collinear(const std::vector<WallCluster>& clusters,
                                         double doorway_width_m, double resolution) {
  if (!(doorway_width_m > 0.0)) throw std::invalid_argument("doorway width must be positive");
  const double threshold = doorway_width_m / resolution;
  std::vector<WallCluster> out = clusters;
  auto offset = [](const WallCluster& c) { return normal_of(c.direction).dot(c.center); };
  while (true) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = i + 1; j < out.size(); ++j) {
        if (out[i].direction != out[j].direction) continue;
        const double sep = std::abs(offset(out[i]) - offset(out[j]));
        if (sep < threshold && sep < best) {
          best = sep;
          bi = i;
          bj = j;
        }
      }
    }
    if (!std::isfinite(best)) break;
    auto& keep = out[bi];
    keep.segments.insert(keep.segments.end(), out[bj].segments.begin(), out[bj].segments.end());
    keep.center = central_point(keep.segments, keep.direction);
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return out;
}

std::vector<RepresentativeLine> representative_lines(const std::vector<WallCluster>& clusters,
                                                     const BoundingBox& bbox) {
  std::vector<RepresentativeLine> lines;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& c = clusters[i];
    RepresentativeLine l;
    l.direction = c.direction;
    l.anchor = c.center;
    l.cluster = static_cast<int>(i);
    if (!clip_line_to_box(l.line(), bbox.lo, bbox.hi, l.chord_a, l.chord_b)) continue;
    lines.push_back(l);
  }
  std::vector<bool> drop(lines.size(), false);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      if (drop[i] || drop[j] || lines[i].direction != lines[j].direction) continue;
      if (std::abs(lines[i].offset() - lines[j].offset()) >= 0.5) continue;
      const double li = clusters[static_cast<std::size_t>(lines[i].cluster)].total_length();
      const double lj = clusters[static_cast<std::size_t>(lines[j].cluster)].total_length();
      (lj > li ? drop[i] : drop[j]) = true;
    }
  }
  std::vector<RepresentativeLine> kept;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!drop[i]) kept.push_back(lines[i]);
  }
  return kept;
}

WallResult detect_walls(const OccupancyGrid& clean, const DirectionSet& directions,
                        const WallParams& params) {
  WallResult result;
  result.segments = hough_segments(clean, params.hough);
  std::vector<WallCluster> aligned;
  for (const auto& group : cluster_by_angle(result.segments, params.angular_eps_deg * kDeg)) {
    std::vector<LineSegment> members;
    for (int i : group) members.push_back(result.segments[static_cast<std::size_t>(i)]);
    for (const auto& cluster : cluster_spatial(members, params.dbscan_eps, params.dbscan_min_pts)) {
      aligned.push_back(align_to_direction(cluster, directions));
    }
  }
  result.clusters = merge_collinear(aligned, params.doorway_width_m, clean.resolution());
  result.lines = representative_lines(result.clusters, BoundingBox::of(clean));
  return result;
}

}  // namespace rose2
