#pragma once

// Hand-built maps shared by the unit tests.

#include "rose2/gridmap.hpp"

#include <random>
#include <set>

namespace rose2::test {

inline OccupancyGrid blank(int width, int height, Cell fill = kFree, double resolution = 0.05) {
  return OccupancyGrid(width, height, resolution, Vec2::Zero(), fill);
}

/// Fills columns [c0, c1) x rows [r0, r1).
inline void fill_rect(OccupancyGrid& g, int c0, int r0, int c1, int r1, Cell value) {
  for (int r = r0; r < r1; ++r)
    for (int c = c0; c < c1; ++c) g.set(c, r, value);
}

/// Free interior surrounded by a one-cell Occupied ring.
inline OccupancyGrid walled_box(int width, int height, double resolution = 0.05) {
  OccupancyGrid g = blank(width, height, kOccupied, resolution);
  fill_rect(g, 1, 1, width - 1, height - 1, kFree);
  return g;
}

/// Walled box split by a vertical wall at column `width / 2` with a door of
/// `door` cells centered vertically.
inline OccupancyGrid two_rooms(int width, int height, int door, double resolution = 0.05) {
  OccupancyGrid g = walled_box(width, height, resolution);
  const int wall = width / 2;
  fill_rect(g, wall, 0, wall + 1, height, kOccupied);
  const int d0 = height / 2 - door / 2;
  fill_rect(g, wall, d0, wall + 1, d0 + door, kFree);
  return g;
}

inline LabelGrid random_labels(std::mt19937_64& rng, int width, int height, int max_id) {
  std::uniform_int_distribution<int> pick(0, max_id);
  LabelGrid out(height, width);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = pick(rng);
  return out;
}

/// Every Free cell carries a label, nothing else does, and (if `dense`)
/// labels are 1..n.
inline bool is_partition(const OccupancyGrid& grid, const LabelGrid& labels, bool dense = true) {
  if (labels.rows() != grid.height() || labels.cols() != grid.width()) return false;
  std::set<std::int32_t> ids;
  for (int r = 0; r < grid.height(); ++r)
    for (int c = 0; c < grid.width(); ++c) {
      const std::int32_t l = labels(r, c);
      if ((grid.at(c, r) == kFree) != (l > 0) || l < 0) return false;
      if (l > 0) ids.insert(l);
    }
  return !dense || ids.empty() || (*ids.begin() == 1 && *ids.rbegin() == static_cast<std::int32_t>(ids.size()));
}

inline int label_count(const LabelGrid& labels) {
  std::set<std::int32_t> ids(labels.data(), labels.data() + labels.size());
  ids.erase(0);
  return static_cast<int>(ids.size());
}

}  // namespace rose2::test
