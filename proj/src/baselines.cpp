#include "rose2/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

namespace rose2 {

namespace {

constexpr int kDr4[4] = {-1, 0, 1, 0};
constexpr int kDc4[4] = {0, 1, 0, -1};

void require_free(const OccupancyGrid& grid, const char* stage) {
  if (grid.count(kFree) == 0) throw PipelineError(stage, "no free space");
}

int components(const Raster<std::uint8_t>& mask, LabelGrid& out, std::vector<std::int64_t>& sizes) {
  const int rows = static_cast<int>(mask.rows()), cols = static_cast<int>(mask.cols());
  out = LabelGrid::Zero(rows, cols);
  sizes.assign(1, 0);
  std::vector<std::pair<int, int>> stack;
  int next = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (mask(r, c) == 0 || out(r, c) != 0) continue;
      ++next;
      sizes.push_back(0);
      stack.assign(1, {r, c});
      out(r, c) = next;
      while (!stack.empty()) {
        const auto [cr, cc] = stack.back();
        stack.pop_back();
        ++sizes.back();
        for (int k = 0; k < 4; ++k) {
          const int rr = cr + kDr4[k], c2 = cc + kDc4[k];
          if (rr < 0 || c2 < 0 || rr >= rows || c2 >= cols) continue;
          if (mask(rr, c2) == 0 || out(rr, c2) != 0) continue;
          out(rr, c2) = next;
          stack.emplace_back(rr, c2);
        }
      }
    }
  }
  return next;
}

DistanceField<double> free_distance(const OccupancyGrid& grid) {
  const Raster<std::uint8_t> obstacle = (grid.mask(kFree) == 0).cast<std::uint8_t>();
  return distance_transform<double>(obstacle, true);
}

bool in_band(std::int64_t cells, const OccupancyGrid& grid, const BaselineParams& p) {
  const double area = static_cast<double>(cells) * grid.resolution() * grid.resolution();
  return area >= p.room_min_m2 && area <= p.room_max_m2;
}

}  // namespace

LabelGrid connected_components(const Raster<std::uint8_t>& mask, std::vector<std::int64_t>& sizes) {
  LabelGrid out;
  components(mask, out, sizes);
  return out;
}

LabelGrid grow_seeds(const OccupancyGrid& grid, const LabelGrid& seeds) {
  const int rows = grid.height(), cols = grid.width();
  LabelGrid labels = LabelGrid::Zero(rows, cols);
  std::deque<std::pair<int, int>> queue;
  std::int32_t max_label = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (grid.at(c, r) != kFree || seeds(r, c) == 0) continue;
      labels(r, c) = seeds(r, c);
      max_label = std::max(max_label, seeds(r, c));
      queue.emplace_back(r, c);
    }
  }
  auto flood = [&] {
    while (!queue.empty()) {
      const auto [r, c] = queue.front();
      queue.pop_front();
      for (int k = 0; k < 4; ++k) {
        const int rr = r + kDr4[k], cc = c + kDc4[k];
        if (!grid.in_bounds(cc, rr) || grid.at(cc, rr) != kFree || labels(rr, cc) != 0) continue;
        labels(rr, cc) = labels(r, c);
        queue.emplace_back(rr, cc);
      }
    }
  };
  flood();
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (grid.at(c, r) != kFree || labels(r, c) != 0) continue;
      labels(r, c) = ++max_label;
      queue.emplace_back(r, c);
      flood();
    }
  }
  return normalize_labels(labels, grid);
}

LabelGrid morphological_segment(const OccupancyGrid& grid, const BaselineParams& params) {
  require_free(grid, "morph");
  const DistanceField<double> field = free_distance(grid);
  const double max_d = field.distance.maxCoeff();
  LabelGrid seeds = LabelGrid::Zero(grid.height(), grid.width());
  Raster<std::uint8_t> frozen = Raster<std::uint8_t>::Zero(grid.height(), grid.width());
  std::int32_t next = 0;
  LabelGrid comp;
  std::vector<std::int64_t> sizes;
  for (double radius = 0.0; radius < max_d; radius += 1.0) {
    const Raster<std::uint8_t> eroded =
        ((field.distance > radius) && (frozen == 0) && (grid.cells() == kFree)).cast<std::uint8_t>();
    const int n = components(eroded, comp, sizes);
    if (n == 0) break;
    std::vector<std::int32_t> assign(static_cast<std::size_t>(n) + 1, 0);
    for (int k = 1; k <= n; ++k) {
      if (in_band(sizes[static_cast<std::size_t>(k)], grid, params)) assign[static_cast<std::size_t>(k)] = ++next;
    }
    for (Eigen::Index i = 0; i < comp.size(); ++i) {
      const std::int32_t a = assign[static_cast<std::size_t>(comp.data()[i])];
      if (comp.data()[i] != 0 && a != 0) {
        seeds.data()[i] = a;
        frozen.data()[i] = 1;
      }
    }
  }
  return grow_seeds(grid, seeds);
}

LabelGrid distance_segment(const OccupancyGrid& grid, const BaselineParams& params) {
  require_free(grid, "dist");
  const DistanceField<double> field = free_distance(grid);
  const double max_d = field.distance.maxCoeff();
  const Raster<std::uint8_t> free_mask = grid.mask(kFree);
  int best_count = -1;
  double best_level = 0.0;
  LabelGrid comp;
  std::vector<std::int64_t> sizes;
  for (double level = 0.0; level < max_d; level += 1.0) {
    const Raster<std::uint8_t> above = ((field.distance > level) && (free_mask != 0)).cast<std::uint8_t>();
    const int n = components(above, comp, sizes);
    int count = 0;
    for (int k = 1; k <= n; ++k) count += in_band(sizes[static_cast<std::size_t>(k)], grid, params);
    if (count > best_count) {
      best_count = count;
      best_level = level;
    }
  }
  const Raster<std::uint8_t> above = ((field.distance > best_level) && (free_mask != 0)).cast<std::uint8_t>();
  const int n = components(above, comp, sizes);
  std::vector<std::int32_t> assign(static_cast<std::size_t>(n) + 1, 0);
  std::int32_t next = 0;
  for (int k = 1; k <= n; ++k) {
    if (in_band(sizes[static_cast<std::size_t>(k)], grid, params)) assign[static_cast<std::size_t>(k)] = ++next;
  }
  LabelGrid seeds = LabelGrid::Zero(grid.height(), grid.width());
  for (Eigen::Index i = 0; i < comp.size(); ++i) seeds.data()[i] = assign[static_cast<std::size_t>(comp.data()[i])];
  return grow_seeds(grid, seeds);
}

namespace {

// Cells along a Bresenham segment.
template <typename Fn>
void trace(int c0, int r0, int c1, int r1, Fn&& fn) {
  const int dc = std::abs(c1 - c0), dr = -std::abs(r1 - r0);
  const int sc = c0 < c1 ? 1 : -1, sr = r0 < r1 ? 1 : -1;
  int err = dc + dr;
  while (true) {
    fn(c0, r0);
    if (c0 == c1 && r0 == r1) break;
    const int e2 = 2 * err;
    if (e2 >= dr) {
      err += dr;
      c0 += sc;
    }
    if (e2 <= dc) {
      err += dc;
      r0 += sr;
    }
  }
}

}  // namespace

LabelGrid voronoi_segment(const OccupancyGrid& grid, const BaselineParams& params) {
  require_free(grid, "voronoi");
  const TopoGraph graph = voronoi_graph(grid);
  const DistanceField<double> field = free_distance(grid);
  const auto adj = graph.adjacency();
  const int hops = std::max(1, static_cast<int>(std::lround(params.critical_radius_m / grid.resolution())));
  const double rise = params.critical_rise_m / grid.resolution();

  // Highest clearance within `hops` steps along one branch, not passing `origin`.
  auto branch_max = [&](int origin, int start, double& best_other, bool& lower_found) {
    double peak = graph.clearance[static_cast<std::size_t>(start)];
    std::map<int, int> depth{{origin, 0}, {start, 1}};
    std::deque<int> queue{start};
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop_front();
      const double cl = graph.clearance[static_cast<std::size_t>(cur)];
      peak = std::max(peak, cl);
      best_other = std::min(best_other, cl);
      const double own = graph.clearance[static_cast<std::size_t>(origin)];
      if (cl < own || (cl == own && cur < origin)) lower_found = true;
      if (depth[cur] >= hops) continue;
      for (int next : adj[static_cast<std::size_t>(cur)]) {
        if (depth.count(next)) continue;
        depth[next] = depth[cur] + 1;
        queue.push_back(next);
      }
    }
    return peak;
  };

  Raster<std::uint8_t> cut = Raster<std::uint8_t>::Zero(grid.height(), grid.width());
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    if (adj[i].size() != 2) continue;
    const int node = static_cast<int>(i);
    double other = std::numeric_limits<double>::infinity();
    bool lower = false;
    const double own = graph.clearance[i];
    const double left = branch_max(node, adj[i][0], other, lower);
    const double right = branch_max(node, adj[i][1], other, lower);
    if (lower || left < own + rise || right < own + rise) continue;

    // Critical line: to the own feature point and to the most opposed
    // feature point seen by a neighboring cell.
    const auto [c, r] = graph.nodes[i];
    const Vec2 p(c, r);
    const Vec2 f1(field.feature_col(r, c), field.feature_row(r, c));
    Vec2 f2 = f1;
    double best_cos = 2.0;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (!grid.in_bounds(c + dc, r + dr) || grid.at(c + dc, r + dr) != kFree) continue;
        const Vec2 f(field.feature_col(r + dr, c + dc), field.feature_row(r + dr, c + dc));
        const Vec2 a = f1 - p, b = f - p;
        if (a.norm() == 0.0 || b.norm() == 0.0) continue;
        const double cs = a.dot(b) / (a.norm() * b.norm());
        if (cs < best_cos) {
          best_cos = cs;
          f2 = f;
        }
      }
    }
    for (const Vec2& f : {f1, f2}) {
      trace(c, r, static_cast<int>(f.x()), static_cast<int>(f.y()), [&](int cc, int rr) {
        if (grid.in_bounds(cc, rr) && grid.at(cc, rr) == kFree) cut(rr, cc) = 1;
      });
    }
  }

  const Raster<std::uint8_t> open = ((grid.cells() == kFree) && (cut == 0)).cast<std::uint8_t>();
  LabelGrid regions;
  std::vector<std::int64_t> sizes;
  components(open, regions, sizes);

  // Merge undersized regions into the neighbor with the longest shared border.
  // grow_seeds renumbers, so contacts are computed on the grown labels.
  const LabelGrid grown = grow_seeds(grid, regions);
  const int m = grown.maxCoeff();
  std::vector<std::int64_t> area(static_cast<std::size_t>(m) + 1, 0);
  for (Eigen::Index i = 0; i < grown.size(); ++i) ++area[static_cast<std::size_t>(grown.data()[i])];
  std::vector<int> parent(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) parent[static_cast<std::size_t>(k)] = k;
  auto find = [&](int k) {
    while (parent[static_cast<std::size_t>(k)] != k) k = parent[static_cast<std::size_t>(k)];
    return k;
  };
  const double min_cells = params.room_min_m2 / (grid.resolution() * grid.resolution());
  while (true) {
    std::map<std::pair<int, int>, std::int64_t> border;
    for (int r = 0; r < grid.height(); ++r) {
      for (int c = 0; c < grid.width(); ++c) {
        if (grown(r, c) == 0) continue;
        const int a = find(grown(r, c));
        if (c + 1 < grid.width() && grown(r, c + 1) != 0) {
          const int b = find(grown(r, c + 1));
          if (a != b) ++border[{std::min(a, b), std::max(a, b)}];
        }
        if (r + 1 < grid.height() && grown(r + 1, c) != 0) {
          const int b = find(grown(r + 1, c));
          if (a != b) ++border[{std::min(a, b), std::max(a, b)}];
        }
      }
    }
    int smallest = 0;
    for (int k = 1; k <= m; ++k) {
      if (find(k) != k || static_cast<double>(area[static_cast<std::size_t>(k)]) >= min_cells) continue;
      bool has_neighbor = false;
      for (const auto& [key, len] : border) has_neighbor |= key.first == k || key.second == k;
      if (!has_neighbor) continue;
      if (smallest == 0 || area[static_cast<std::size_t>(k)] < area[static_cast<std::size_t>(smallest)]) smallest = k;
    }
    if (smallest == 0) break;
    int target = 0;
    std::int64_t longest = -1;
    for (const auto& [key, len] : border) {
      if (key.first != smallest && key.second != smallest) continue;
      const int other = key.first == smallest ? key.second : key.first;
      if (len > longest || (len == longest && other < target)) {
        longest = len;
        target = other;
      }
    }
    parent[static_cast<std::size_t>(smallest)] = target;
    area[static_cast<std::size_t>(target)] += area[static_cast<std::size_t>(smallest)];
  }
  LabelGrid merged = grown;
  for (Eigen::Index i = 0; i < merged.size(); ++i) {
    if (merged.data()[i] != 0) merged.data()[i] = find(merged.data()[i]);
  }
  return normalize_labels(merged, grid);
}

}  // namespace rose2
