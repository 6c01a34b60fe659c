#include "rose2/rooms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rose2 {

namespace {

Vec2 node_point(const TopoGraph& graph, int node) {
  const CellIndex& c = graph.nodes[static_cast<std::size_t>(node)];
  return Vec2(c.col + 0.5, c.row + 0.5);
}

template <typename Fn>
void for_each_center_in(const Polygon& piece, int width, int height, Fn&& fn) {
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x, hi_x = -lo_x, hi_y = -lo_x;
  for (const Vec2& p : piece) {
    lo_x = std::min(lo_x, p.x());
    hi_x = std::max(hi_x, p.x());
    lo_y = std::min(lo_y, p.y());
    hi_y = std::max(hi_y, p.y());
  }
  const int c0 = std::max(0, static_cast<int>(std::floor(lo_x - 0.5)));
  const int c1 = std::min(width - 1, static_cast<int>(std::ceil(hi_x - 0.5)));
  const int r0 = std::max(0, static_cast<int>(std::floor(lo_y - 0.5)));
  const int r1 = std::min(height - 1, static_cast<int>(std::ceil(hi_y - 0.5)));
  const std::span<const Vec2> poly(piece);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (convex_contains<double>(poly, Vec2(c + 0.5, r + 0.5))) fn(c, r);
    }
  }
}

struct SplitContext {
  const OccupancyGrid& grid;
  const TopoGraph& graph;
  std::span<const RepresentativeLine> lines;
  const DirectionSet& directions;
  const RoomParams& params;
  std::vector<std::string>& warnings;
};

// Line with every component strictly on one side and both sides used.
std::optional<Line2> find_separator(const std::vector<std::vector<int>>& comps, const SplitContext& ctx) {
  std::optional<Line2> best;
  double best_margin = 0.0;
  for (const RepresentativeLine& rep : ctx.lines) {
    const Line2 line = rep.line();
    bool valid = true, pos = false, neg = false;
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& comp : comps) {
      int side = 0;
      for (int node : comp) {
        const double d = line.signed_distance(node_point(ctx.graph, node));
        const int s = d > 1e-9 ? 1 : (d < -1e-9 ? -1 : 0);
        if (s == 0 || (side != 0 && s != side)) {
          valid = false;
          break;
        }
        side = s;
        margin = std::min(margin, std::abs(d));
      }
      if (!valid) break;
      (side > 0 ? pos : neg) = true;
    }
    if (valid && pos && neg && margin > best_margin) {
      best_margin = margin;
      best = line;
    }
  }
  if (best) return best;

  std::vector<double> angles = ctx.directions.angles;
  std::sort(angles.begin(), angles.end());
  for (double psi : angles) {
    const Vec2 n = normal_of(psi);
    std::vector<std::pair<double, double>> spans;
    for (const auto& comp : comps) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (int node : comp) {
        const double t = n.dot(node_point(ctx.graph, node));
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
      spans.emplace_back(lo, hi);
    }
    std::sort(spans.begin(), spans.end());
    double reach = spans.front().second, gap = std::numeric_limits<double>::infinity(), cut = 0.0;
    for (std::size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].first > reach && spans[i].first - reach < gap) {
        gap = spans[i].first - reach;
        cut = 0.5 * (spans[i].first + reach);
      }
      reach = std::max(reach, spans[i].second);
    }
    if (std::isfinite(gap)) return Line2{n * cut, direction_of(psi)};
  }
  return std::nullopt;
}

std::vector<Room> split_room(const Room& room, int depth, const SplitContext& ctx) {
  const auto comps = significant_components(room, ctx.grid, ctx.graph, ctx.params.min_component_nodes);
  if (comps.size() < 2) return {room};
  const std::string name = "room " + std::to_string(room.id);
  if (depth >= ctx.params.max_split_depth) {
    ctx.warnings.push_back(name + ": still disconnected at the split depth limit");
    return {room};
  }
  const auto line = find_separator(comps, ctx);
  if (!line) {
    ctx.warnings.push_back(name + ": no separating line for disconnected free space");
    return {room};
  }
  Room pos, neg;
  pos.id = neg.id = room.id;
  for (std::size_t i = 0; i < room.pieces.size(); ++i) {
    auto [p, q] = split_convex(room.pieces[i], *line);
    if (!p.empty()) {
      pos.pieces.push_back(std::move(p));
      pos.face_of_piece.push_back(room.face_of_piece[i]);
    }
    if (!q.empty()) {
      neg.pieces.push_back(std::move(q));
      neg.face_of_piece.push_back(room.face_of_piece[i]);
    }
  }
  if (pos.pieces.empty() || neg.pieces.empty()) {
    ctx.warnings.push_back(name + ": separating line misses the room polygon");
    return {room};
  }
  std::vector<Room> out = split_room(pos, depth + 1, ctx);
  for (Room& r : split_room(neg, depth + 1, ctx)) out.push_back(std::move(r));
  return out;
}

}  // namespace

double Room::area() const {
  double a = 0.0;
  for (const Polygon& p : pieces) a += signed_area(p);
  return a;
}

bool Room::contains(const Vec2& p) const {
  return std::any_of(pieces.begin(), pieces.end(),
                     [&](const Polygon& piece) { return convex_contains<double>(std::span<const Vec2>(piece), p); });
}

void FloorPlan::normalize() {
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    Room& r = rooms[i];
    r.id = static_cast<int>(i) + 1;
    r.faces = r.face_of_piece;
    std::sort(r.faces.begin(), r.faces.end());
    r.faces.erase(std::unique(r.faces.begin(), r.faces.end()), r.faces.end());
    r.boundary = union_boundary(r.pieces);
  }
}

std::vector<char> exterior_faces(const Arrangement& arr) {
  std::vector<char> out(arr.faces.size(), 0);
  for (const Face& f : arr.faces) {
    if (!arr.touches_box(f.id)) continue;
    const bool bare = std::all_of(f.edges.begin(), f.edges.end(),
                                  [&](int e) { return arr.edges[static_cast<std::size_t>(e)].weight == 0.0; });
    out[static_cast<std::size_t>(f.id)] = bare;
  }
  return out;
}

std::vector<std::int64_t> face_free_cells(const Arrangement& arr, const OccupancyGrid& grid) {
  std::vector<std::int64_t> out(arr.faces.size(), 0);
  for (const Face& f : arr.faces) {
    for_each_center_in(f.polygon, grid.width(), grid.height(), [&](int c, int r) {
      if (grid.at(c, r) == kFree) ++out[static_cast<std::size_t>(f.id)];
    });
  }
  return out;
}

std::vector<std::vector<int>> cluster_faces(const Arrangement& arr, std::span<const char> excluded,
                                            double wall_weight_threshold) {
  const std::size_t n = arr.faces.size();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<int>> out;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start] || (start < excluded.size() && excluded[start])) continue;
    std::vector<int> comp, stack{static_cast<int>(start)};
    seen[start] = 1;
    while (!stack.empty()) {
      const int f = stack.back();
      stack.pop_back();
      comp.push_back(f);
      for (const auto& [g, e] : arr.neighbors(f)) {
        const ArrEdge& edge = arr.edges[static_cast<std::size_t>(e)];
        const auto gi = static_cast<std::size_t>(g);
        if (edge.weight >= wall_weight_threshold || edge.retained) continue;
        if (seen[gi] || (gi < excluded.size() && excluded[gi])) continue;
        seen[gi] = 1;
        stack.push_back(g);
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

Room merge_faces(std::span<const int> faces, const Arrangement& arr) {
  if (faces.empty()) throw std::invalid_argument("merge_faces: empty face set");
  std::vector<int> ids(faces.begin(), faces.end());
  std::sort(ids.begin(), ids.end());
  std::vector<char> reached(ids.size(), 0);
  std::vector<int> stack{0};
  reached[0] = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (const auto& [g, e] : arr.neighbors(ids[static_cast<std::size_t>(i)])) {
      auto it = std::lower_bound(ids.begin(), ids.end(), g);
      if (it == ids.end() || *it != g) continue;
      const auto j = static_cast<std::size_t>(it - ids.begin());
      if (!reached[j]) {
        reached[j] = 1;
        stack.push_back(static_cast<int>(j));
      }
    }
  }
  if (std::find(reached.begin(), reached.end(), 0) != reached.end()) {
    throw std::invalid_argument("merge_faces: faces are not edge-connected");
  }
  Room room;
  for (int f : ids) {
    room.pieces.push_back(arr.faces[static_cast<std::size_t>(f)].polygon);
    room.face_of_piece.push_back(f);
  }
  room.faces = ids;
  room.boundary = union_boundary(room.pieces);
  return room;
}

Raster<std::uint8_t> room_cells(const Room& room, const OccupancyGrid& grid) {
  Raster<std::uint8_t> mask = Raster<std::uint8_t>::Zero(grid.height(), grid.width());
  for (const Polygon& piece : room.pieces) {
    for_each_center_in(piece, grid.width(), grid.height(), [&](int c, int r) {
      if (grid.at(c, r) == kFree) mask(r, c) = 1;
    });
  }
  return mask;
}

LabelGrid segment_map(const OccupancyGrid& grid, const FloorPlan& floorplan) {
  if (floorplan.rooms.empty()) throw std::invalid_argument("segment_map: empty floor plan");
  LabelGrid labels = LabelGrid::Zero(grid.height(), grid.width());
  for (const Room& room : floorplan.rooms) {
    for (const Polygon& piece : room.pieces) {
      for_each_center_in(piece, grid.width(), grid.height(), [&](int c, int r) {
        if (grid.at(c, r) == kFree && labels(r, c) == 0) labels(r, c) = room.id;
      });
    }
  }
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (grid.at(c, r) != kFree || labels(r, c) != 0) continue;
      const Vec2 p(c + 0.5, r + 0.5);
      double best = std::numeric_limits<double>::infinity();
      int best_id = 0;
      for (const Room& room : floorplan.rooms) {
        const auto& loops = room.boundary.empty() ? room.pieces : room.boundary;
        double d = std::numeric_limits<double>::infinity();
        for (const Polygon& loop : loops) d = std::min(d, point_polygon_distance(p, loop));
        if (d < best) {
          best = d;
          best_id = room.id;
        }
      }
      labels(r, c) = best_id;
    }
  }
  return labels;
}

std::vector<std::vector<int>> significant_components(const Room& room, const OccupancyGrid& grid,
                                                     const TopoGraph& graph, int min_nodes) {
  auto comps = room_components(room_cells(room, grid), graph);
  std::erase_if(comps, [&](const std::vector<int>& c) { return static_cast<int>(c.size()) < min_nodes; });
  return comps;
}

FloorPlan split_disconnected(const FloorPlan& floorplan, const OccupancyGrid& grid, const TopoGraph& graph,
                             std::span<const RepresentativeLine> lines, const DirectionSet& directions,
                             const RoomParams& params) {
  FloorPlan out;
  out.warnings = floorplan.warnings;
  const SplitContext ctx{grid, graph, lines, directions, params, out.warnings};
  for (const Room& room : floorplan.rooms) {
    for (Room& r : split_room(room, 0, ctx)) out.rooms.push_back(std::move(r));
  }
  out.normalize();
  return out;
}

}  // namespace rose2
