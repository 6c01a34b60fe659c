#pragma once

// Rooms from arrangement faces: clustering, polygon union, per-cell
// assignment and topological splitting.

#include "rose2/arrangement.hpp"
#include "rose2/topology.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rose2 {

struct Room {
  int id = 0;  // 1-based, matches the label in the segmented map
  /// Convex pieces whose union is the room; face_of_piece[i] is the source face.
  std::vector<Polygon> pieces;
  std::vector<int> face_of_piece;
  /// Distinct source faces, ascending.
  std::vector<int> faces;
  /// Union boundary: outer loops positive, holes negative.
  std::vector<Polygon> boundary;

  double area() const;
  bool contains(const Vec2& p) const;
};

struct FloorPlan {
  std::vector<Room> rooms;
  std::vector<std::string> warnings;

  /// Renumbers ids to 1..n in order and rebuilds boundaries.
  void normalize();
};

struct RoomParams {
  /// Edges with weight at or above this act as walls between faces.
  double wall_weight_threshold = 0.5;
  /// Faces whose Free cells cover less than this fraction of their area are
  /// unobserved and take no part in clustering.
  double min_face_free_fraction = 0.05;
  /// Face clusters with less Free area than this are treated as exterior.
  double min_room_area_m2 = 1.0;
  /// Topograph components with fewer nodes are ignored when splitting.
  int min_component_nodes = 10;
  int max_split_depth = 8;
};

/// Faces touching the box whose edges all carry zero weight.
std::vector<char> exterior_faces(const Arrangement& arrangement);

/// Free cells per face, counted at cell centers.
std::vector<std::int64_t> face_free_cells(const Arrangement& arrangement, const OccupancyGrid& grid);

/// Connected components of faces under open adjacency (weight below the
/// threshold and not retained). Excluded faces are skipped. Components are
/// ascending and ordered by smallest face id.
std::vector<std::vector<int>> cluster_faces(const Arrangement& arrangement, std::span<const char> excluded,
                                            double wall_weight_threshold);

/// Polygon union of faces that share edges; throws std::invalid_argument when
/// the set is not edge-connected.
Room merge_faces(std::span<const int> faces, const Arrangement& arrangement);

/// Free cells of `grid` whose centers lie inside `room`.
Raster<std::uint8_t> room_cells(const Room& room, const OccupancyGrid& grid);

/// Free cells take the room containing their center (lower id on ties), or
/// the room of the nearest polygon. Other cells stay 0.
LabelGrid segment_map(const OccupancyGrid& grid, const FloorPlan& floorplan);

/// Splits rooms whose free-space skeleton falls apart into several
/// components, preferring an existing line, else a dominant direction.
FloorPlan split_disconnected(const FloorPlan& floorplan, const OccupancyGrid& grid, const TopoGraph& graph,
                             std::span<const RepresentativeLine> lines, const DirectionSet& directions,
                             const RoomParams& params = {});

/// Nontrivial skeleton components inside a room.
std::vector<std::vector<int>> significant_components(const Room& room, const OccupancyGrid& grid,
                                                     const TopoGraph& graph, int min_nodes);

}  // namespace rose2
