#pragma once

// Simplified reimplementations of three classic segmenters, for comparison
// only. All of them return a full partition of the Free cells.

#include "rose2/topology.hpp"

namespace rose2 {

struct BaselineParams {
  /// Room-size band in square meters.
  double room_min_m2 = 2.0;
  double room_max_m2 = 80.0;
  /// Voronoi: hop radius of the local-minimum test, in meters.
  double critical_radius_m = 0.5;
  /// Voronoi: both sides of a critical point must open up by this much, in meters.
  double critical_rise_m = 0.1;
};

/// 4-connected components of nonzero cells, ids 1..n in raster order of
/// first appearance. `sizes[k]` is the cell count of component k (sizes[0] = 0).
LabelGrid connected_components(const Raster<std::uint8_t>& mask, std::vector<std::int64_t>& sizes);

/// Breadth-first growth of nonzero seed labels over Free cells (4-connected,
/// seeds enter the queue in raster order). Free cells no seed reaches get a
/// fresh label per connected component. Labels are normalized to 1..n.
LabelGrid grow_seeds(const OccupancyGrid& grid, const LabelGrid& seeds);

/// Iterative erosion; components whose area enters the band are frozen as seeds.
LabelGrid morphological_segment(const OccupancyGrid& grid, const BaselineParams& params = {});

/// Superlevel sets of the distance transform; the level with the most in-band
/// components provides the seeds.
LabelGrid distance_segment(const OccupancyGrid& grid, const BaselineParams& params = {});

/// Critical lines through skeleton clearance minima split Free space; regions
/// below the band merge into their longest-border neighbor. The skeleton is
/// computed on `grid` itself.
LabelGrid voronoi_segment(const OccupancyGrid& grid, const BaselineParams& params = {});

}  // namespace rose2
