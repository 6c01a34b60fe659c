#pragma once

// Wall detection: line segments from the clean map, grouped into walls,
// snapped to the dominant directions and summarized by representative lines.

#include "rose2/geometry.hpp"
#include "rose2/gridmap.hpp"
#include "rose2/rose.hpp"

#include <cstdint>
#include <vector>

namespace rose2 {

/// Segment in continuous cell coordinates. `angle` lies in [0, pi) and is
/// stored explicitly so aligned segments carry their direction bit-exactly.
class LineSegment {
 public:
  LineSegment() = default;
  LineSegment(Vec2 a, Vec2 b);
  /// Aligned segment; `angle` is taken as-is and must match the endpoints.
  LineSegment(Vec2 a, Vec2 b, double angle);

  const Vec2& a() const { return a_; }
  const Vec2& b() const { return b_; }
  double angle() const { return angle_; }
  double length() const { return (b_ - a_).norm(); }
  Vec2 midpoint() const { return 0.5 * (a_ + b_); }

 private:
  Vec2 a_ = Vec2::Zero();
  Vec2 b_ = Vec2::UnitX();
  double angle_ = 0.0;
};

double segment_distance(const LineSegment& s, const LineSegment& t);

struct WallCluster {
  std::vector<LineSegment> segments;
  double direction = 0.0;
  Vec2 center = Vec2::Zero();
  bool aligned = false;

  double total_length() const;
};

struct RepresentativeLine {
  double direction = 0.0;
  Vec2 anchor = Vec2::Zero();
  Vec2 chord_a = Vec2::Zero();
  Vec2 chord_b = Vec2::Zero();
  /// Index of the wall cluster this line stands for.
  int cluster = -1;

  Line2 line() const;
  /// Signed offset of the line along the normal of `direction`.
  double offset() const;
};

struct HoughParams {
  double rho_res = 1.0;
  double theta_res_deg = 0.5;
  int votes = 20;
  double min_len = 10.0;
  double max_gap = 5.0;
  std::uint64_t seed = 0;
};

struct WallParams {
  HoughParams hough;
  double angular_eps_deg = 5.0;
  double dbscan_eps = 10.0;
  int dbscan_min_pts = 1;
  double doorway_width_m = 1.0;
};

/// Progressive probabilistic Hough transform over Occupied cells.
std::vector<LineSegment> hough_segments(const OccupancyGrid& clean, const HoughParams& params);

/// Single-linkage groups under the circular angle metric; indices into
/// `segments`, each group ascending.
std::vector<std::vector<int>> cluster_by_angle(const std::vector<LineSegment>& segments,
                                               double angular_eps);

/// DBSCAN on exact segment-segment distance; noise points become singletons.
std::vector<WallCluster> cluster_spatial(const std::vector<LineSegment>& group, double eps,
                                         int min_pts);

/// Direction of a cluster: length-weighted mean angle (doubled-angle average).
double mean_angle(const std::vector<LineSegment>& segments);

/// Nearest dominant direction; exact ties go to the smaller angle.
double snap_direction(double angle, const DirectionSet& directions);

WallCluster align_to_direction(const WallCluster& cluster, const DirectionSet& directions);

/// Length-weighted median of member midpoints along the normal of
/// `direction`, placed at the weighted median along-axis coordinate.
Vec2 central_point(const std::vector<LineSegment>& segments, double direction);

std::vector<WallCluster> merge_collinear(const std::vector<WallCluster>& clusters,
                                         double doorway_width_m, double resolution);

struct BoundingBox {
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Zero();

  double area() const { return (hi - lo).prod(); }
  static BoundingBox of(const OccupancyGrid& grid) {
    return {Vec2::Zero(), Vec2(grid.width(), grid.height())};
  }
};

std::vector<RepresentativeLine> representative_lines(const std::vector<WallCluster>& clusters,
                                                     const BoundingBox& bbox);

struct WallResult {
  std::vector<LineSegment> segments;
  std::vector<WallCluster> clusters;  // aligned and merged
  std::vector<RepresentativeLine> lines;
};

/// Full chain: Hough, angle grouping, spatial clustering, alignment, merge, lines.
WallResult detect_walls(const OccupancyGrid& clean, const DirectionSet& directions,
                        const WallParams& params);

SegmentCounter hough_segment_counter(const HoughParams& params);

}  // namespace rose2
