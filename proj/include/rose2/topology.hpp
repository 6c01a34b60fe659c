#pragma once

// Free-space skeleton and its topological graph.

#include "rose2/gridmap.hpp"

#include <limits>
#include <span>
#include <vector>

namespace rose2 {

/// Exact squared distance transform of a sampled function along one axis
/// (lower envelope of parabolas). `arg` receives the index of the minimizer.
template <typename Scalar>
void squared_distance_1d(std::span<const Scalar> f, std::span<Scalar> d, std::span<int> arg,
                         std::vector<int>& v, std::vector<Scalar>& z) {
  const int n = static_cast<int>(f.size());
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  v.assign(static_cast<std::size_t>(n), 0);
  z.assign(static_cast<std::size_t>(n) + 1, Scalar(0));
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    while (k >= 0) {
      const int p = v[k];
      const Scalar s = ((f[q] + Scalar(q) * q) - (f[p] + Scalar(p) * p)) / (Scalar(2) * (q - p));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -inf : ((f[q] + Scalar(q) * q) - (f[v[k - 1]] + Scalar(v[k - 1]) * v[k - 1])) /
                               (Scalar(2) * (q - v[k - 1]));
    z[k + 1] = inf;
  }
  if (k < 0) {
    for (int q = 0; q < n; ++q) {
      d[q] = inf;
      arg[q] = -1;
    }
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < Scalar(q)) ++j;
    const Scalar dq = Scalar(q - v[j]);
    d[q] = dq * dq + f[v[j]];
    arg[q] = v[j];
  }
}

/// Distances in cells between cell centers, with the nearest obstacle cell
/// (the feature point) for every cell. Feature coordinates may lie on the
/// virtual ring just outside the raster when the border counts as obstacle.
template <typename Scalar>
struct DistanceField {
  Raster<Scalar> distance;
  Raster<int> feature_col;
  Raster<int> feature_row;
};

/// Exact Euclidean distance transform; nonzero `obstacle` entries are sources.
template <typename Scalar = double>
DistanceField<Scalar> distance_transform(const Raster<std::uint8_t>& obstacle, bool border_is_obstacle) {
  const int pad = border_is_obstacle ? 1 : 0;
  const int rows = static_cast<int>(obstacle.rows()) + 2 * pad;
  const int cols = static_cast<int>(obstacle.cols()) + 2 * pad;
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  auto is_obstacle = [&](int r, int c) {
    const int rr = r - pad, cc = c - pad;
    if (rr < 0 || cc < 0 || rr >= obstacle.rows() || cc >= obstacle.cols()) return true;
    return obstacle(rr, cc) != 0;
  };

  // Pass 1 along columns: squared vertical distance and nearest row.
  Raster<Scalar> g(rows, cols);
  Raster<int> g_row(rows, cols);
  std::vector<int> v;
  std::vector<Scalar> z;
  {
    std::vector<Scalar> f(static_cast<std::size_t>(rows)), d(static_cast<std::size_t>(rows));
    std::vector<int> arg(static_cast<std::size_t>(rows));
    for (int c = 0; c < cols; ++c) {
      for (int r = 0; r < rows; ++r) f[static_cast<std::size_t>(r)] = is_obstacle(r, c) ? Scalar(0) : inf;
      squared_distance_1d<Scalar>(f, d, arg, v, z);
      for (int r = 0; r < rows; ++r) {
        g(r, c) = d[static_cast<std::size_t>(r)];
        g_row(r, c) = arg[static_cast<std::size_t>(r)];
      }
    }
  }
  // Pass 2 along rows over the vertical distances.
  DistanceField<Scalar> out;
  out.distance.resize(obstacle.rows(), obstacle.cols());
  out.feature_col.resize(obstacle.rows(), obstacle.cols());
  out.feature_row.resize(obstacle.rows(), obstacle.cols());
  std::vector<Scalar> f(static_cast<std::size_t>(cols)), d(static_cast<std::size_t>(cols));
  std::vector<int> arg(static_cast<std::size_t>(cols));
  for (int r = pad; r < rows - pad; ++r) {
    for (int c = 0; c < cols; ++c) f[static_cast<std::size_t>(c)] = g(r, c);
    squared_distance_1d<Scalar>(f, d, arg, v, z);
    for (int c = pad; c < cols - pad; ++c) {
      const int fc = arg[static_cast<std::size_t>(c)];
      out.distance(r - pad, c - pad) = std::sqrt(d[static_cast<std::size_t>(c)]);
      out.feature_col(r - pad, c - pad) = fc < 0 ? -1 : fc - pad;
      out.feature_row(r - pad, c - pad) = fc < 0 ? -1 : g_row(r, fc) - pad;
    }
  }
  return out;
}

struct TopologyParams {
  /// Minimum angle subtended at a cell by its own and a neighbor's feature point.
  double ridge_angle_deg = 90.0;
};

/// Unit-width skeleton mask (1 on skeleton cells) of the Free space.
Raster<std::uint8_t> skeletonize(const OccupancyGrid& grid, const DistanceField<double>& field,
                                 const TopologyParams& params = {});

struct TopoGraph {
  int width = 0;
  int height = 0;
  std::vector<CellIndex> nodes;
  std::vector<std::pair<int, int>> edges;  // i < j, ascending
  std::vector<double> clearance;
  /// Node id per cell, -1 elsewhere.
  Raster<std::int32_t> node_at;

  std::vector<std::vector<int>> adjacency() const;
};

/// Distance transform treats Occupied, Unknown and the area outside the
/// raster as obstacles.
TopoGraph voronoi_graph(const OccupancyGrid& grid, const TopologyParams& params = {});

/// Connected components of the subgraph induced by the nodes on cells with
/// nonzero `room_cells`. Each component ascending; components ordered by
/// their smallest node id.
std::vector<std::vector<int>> room_components(const Raster<std::uint8_t>& room_cells, const TopoGraph& graph);

/// 8-connected simple-point test on a 3x3 neighborhood bit pattern
/// (bit k = neighbor k, clockwise from north-west).
bool is_simple_pattern(unsigned pattern);

}  // namespace rose2
