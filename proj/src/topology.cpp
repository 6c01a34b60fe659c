#include "rose2/topology.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <queue>
#include <tuple>

namespace rose2 {

namespace {

// Neighbor k of the 3x3 pattern, clockwise from north-west.
constexpr std::array<int, 8> kDr{-1, -1, -1, 0, 1, 1, 1, 0};
constexpr std::array<int, 8> kDc{-1, 0, 1, 1, 1, 0, -1, -1};

std::array<bool, 256> build_simple_table() {
  std::array<bool, 256> table{};
  for (unsigned pattern = 0; pattern < 256; ++pattern) {
    // 3x3 grid with the center removed; index = (dr + 1) * 3 + (dc + 1).
    std::array<int, 9> fg{};
    for (int k = 0; k < 8; ++k) fg[static_cast<std::size_t>((kDr[k] + 1) * 3 + kDc[k] + 1)] = (pattern >> k) & 1u;
    auto components = [&](bool foreground, bool eight, bool need_4_adjacent) {
      std::array<int, 9> seen{};
      int count = 0;
      for (int start = 0; start < 9; ++start) {
        if (start == 4 || seen[start] || (fg[start] != 0) != foreground) continue;
        bool touches = false;
        std::vector<int> stack{start};
        seen[start] = 1;
        while (!stack.empty()) {
          const int cur = stack.back();
          stack.pop_back();
          const int r = cur / 3, c = cur % 3;
          if (std::abs(r - 1) + std::abs(c - 1) == 1) touches = true;
          for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
              if ((dr == 0 && dc == 0) || (!eight && dr != 0 && dc != 0)) continue;
              const int rr = r + dr, cc = c + dc;
              if (rr < 0 || cc < 0 || rr > 2 || cc > 2) continue;
              const int next = rr * 3 + cc;
              if (next == 4 || seen[next] || (fg[next] != 0) != foreground) continue;
              seen[next] = 1;
              stack.push_back(next);
            }
          }
        }
        if (!need_4_adjacent || touches) ++count;
      }
      return count;
    };
    table[pattern] = components(true, true, false) == 1 && components(false, false, true) == 1;
  }
  return table;
}

const std::array<bool, 256>& simple_table() {
  static const std::array<bool, 256> table = build_simple_table();
  return table;
}

// One neighbor, or two neighbors that touch each other along a side: the
// tip of a two-cell-wide arm. Eroding such tips would eat the whole arm.
bool is_branch_end(unsigned pattern) {
  const int n = std::popcount(pattern);
  if (n <= 1) return true;
  if (n != 2) return false;
  int a = std::countr_zero(pattern);
  int b = std::countr_zero(pattern & (pattern - 1));
  return std::abs(kDr[a] - kDr[b]) + std::abs(kDc[a] - kDc[b]) == 1;
}

}  // namespace

bool is_simple_pattern(unsigned pattern) { return simple_table()[pattern & 0xFFu]; }

Raster<std::uint8_t> skeletonize(const OccupancyGrid& grid, const DistanceField<double>& field,
                                 const TopologyParams& params) {
  const int rows = grid.height(), cols = grid.width();
  Raster<std::uint8_t> keep = grid.mask(kFree);
  auto inside = [&](int r, int c) { return r >= 0 && c >= 0 && r < rows && c < cols; };
  auto set_at = [&](int r, int c) { return inside(r, c) && keep(r, c) != 0; };
  auto pattern_at = [&](int r, int c) {
    unsigned p = 0;
    for (int k = 0; k < 8; ++k) {
      if (set_at(r + kDr[k], c + kDc[k])) p |= 1u << k;
    }
    return p;
  };

  // Anchors: ridge cells of the feature transform and local distance maxima.
  const double cos_limit = std::cos(params.ridge_angle_deg * std::numbers::pi / 180.0) + 1e-12;
  Raster<std::uint8_t> anchor = Raster<std::uint8_t>::Zero(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (keep(r, c) == 0) continue;
      const Vec2 p(c, r);
      const Vec2 a = Vec2(field.feature_col(r, c), field.feature_row(r, c)) - p;
      bool ridge = false, local_max = true;
      for (int k = 0; k < 8; ++k) {
        const int rr = r + kDr[k], cc = c + kDc[k];
        if (!set_at(rr, cc)) continue;
        if (field.distance(rr, cc) > field.distance(r, c)) local_max = false;
        const Vec2 b = Vec2(field.feature_col(rr, cc), field.feature_row(rr, cc)) - p;
        if (a.dot(b) <= cos_limit * a.norm() * b.norm()) ridge = true;
      }
      if (ridge || local_max) anchor(r, c) = 1;
    }
  }

  // Homotopic erosion of non-anchor cells in ascending distance order.
  using Entry = std::tuple<double, int, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (keep(r, c) != 0 && pattern_at(r, c) != 0xFFu) queue.emplace(field.distance(r, c), r, c);
    }
  }
  while (!queue.empty()) {
    const auto [d, r, c] = queue.top();
    queue.pop();
    if (keep(r, c) == 0 || anchor(r, c) != 0) continue;
    if (!is_simple_pattern(pattern_at(r, c))) continue;
    keep(r, c) = 0;
    for (int k = 0; k < 8; ++k) {
      const int rr = r + kDr[k], cc = c + kDc[k];
      if (set_at(rr, cc) && anchor(rr, cc) == 0) queue.emplace(field.distance(rr, cc), rr, cc);
    }
  }

  // Thin to unit width: drop simple cells that are not branch ends.
  std::vector<Entry> order;
  for (bool changed = true; changed;) {
    changed = false;
    order.clear();
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (keep(r, c) != 0) order.emplace_back(field.distance(r, c), r, c);
      }
    }
    std::sort(order.begin(), order.end());
    for (const auto& [d, r, c] : order) {
      const unsigned p = pattern_at(r, c);
      if (!is_branch_end(p) && is_simple_pattern(p)) {
        keep(r, c) = 0;
        changed = true;
      }
    }
  }
  return keep;
}

std::vector<std::vector<int>> TopoGraph::adjacency() const {
  std::vector<std::vector<int>> adj(nodes.size());
  for (const auto& [a, b] : edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

TopoGraph voronoi_graph(const OccupancyGrid& grid, const TopologyParams& params) {
  if (grid.count(kFree) == 0) throw PipelineError("topology", "no free space");
  Raster<std::uint8_t> obstacle = grid.mask(kFree);
  obstacle = (obstacle == 0).cast<std::uint8_t>();
  const DistanceField<double> field = distance_transform<double>(obstacle, true);
  const Raster<std::uint8_t> skeleton = skeletonize(grid, field, params);

  TopoGraph graph;
  graph.width = grid.width();
  graph.height = grid.height();
  graph.node_at = Raster<std::int32_t>::Constant(grid.height(), grid.width(), -1);
  const int rows = grid.height(), cols = grid.width();
  auto on = [&](int r, int c) { return r >= 0 && c >= 0 && r < rows && c < cols && skeleton(r, c) != 0; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!on(r, c)) continue;
      bool connected = false;
      for (int k = 0; k < 8 && !connected; ++k) connected = on(r + kDr[k], c + kDc[k]);
      if (!connected) continue;
      graph.node_at(r, c) = static_cast<std::int32_t>(graph.nodes.size());
      graph.nodes.push_back({c, r});
      graph.clearance.push_back(field.distance(r, c));
    }
  }
  // Forward half of the 8-neighborhood: E, SW, S, SE.
  constexpr std::array<std::pair<int, int>, 4> forward{{{0, 1}, {1, -1}, {1, 0}, {1, 1}}};
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const auto [c, r] = graph.nodes[i];
    for (const auto& [dr, dc] : forward) {
      if (on(r + dr, c + dc)) graph.edges.emplace_back(static_cast<int>(i), graph.node_at(r + dr, c + dc));
    }
  }
  std::sort(graph.edges.begin(), graph.edges.end());
  return graph;
}

std::vector<std::vector<int>> room_components(const Raster<std::uint8_t>& room_cells, const TopoGraph& graph) {
  const auto adj = graph.adjacency();
  std::vector<char> member(graph.nodes.size(), 0), seen(graph.nodes.size(), 0);
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    member[i] = room_cells(graph.nodes[i].row, graph.nodes[i].col) != 0;
  }
  std::vector<std::vector<int>> out;
  for (std::size_t start = 0; start < graph.nodes.size(); ++start) {
    if (!member[start] || seen[start]) continue;
    std::vector<int> comp;
    std::vector<int> stack{static_cast<int>(start)};
    seen[start] = 1;
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      comp.push_back(cur);
      for (int next : adj[static_cast<std::size_t>(cur)]) {
        if (member[static_cast<std::size_t>(next)] && !seen[static_cast<std::size_t>(next)]) {
          seen[static_cast<std::size_t>(next)] = 1;
          stack.push_back(next);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace rose2
