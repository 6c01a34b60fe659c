#pragma once

// Arrangement of representative lines clipped to the map box: convex faces,
// shared edges, and how much of each edge is covered by wall evidence.

#include "rose2/walls.hpp"

#include <span>
#include <vector>

namespace rose2 {

/// Side tags: >= 0 a representative line index, kBoxSide for the bounding
/// box, and chord_tag(k) for the k-th inserted chord.
inline constexpr int kBoxSide = -1;
constexpr int chord_tag(int chord) { return -2 - chord; }
constexpr int chord_of_tag(int tag) { return -2 - tag; }

struct Face {
  int id = -1;
  /// Vertex ids into Arrangement::vertices, positively oriented.
  std::vector<int> vertex_ids;
  /// side_tags[i] tags the side vertex_ids[i] -> vertex_ids[i + 1].
  std::vector<int> side_tags;
  Polygon polygon;
  double area = 0.0;
  std::vector<int> edges;
};

struct ArrEdge {
  int id = -1;
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  /// Face on the positive side of a -> b, and the other one (-1 outside the box).
  int face_left = -1;
  int face_right = -1;
  /// Representative line index, or -1.
  int line = -1;
  /// Chord index, or -1.
  int chord = -1;
  double weight = 0.0;
  bool retained = false;

  double length() const { return (b - a).norm(); }
  bool interior() const { return face_left >= 0 && face_right >= 0; }
  bool on_box() const { return line < 0 && chord < 0; }
  int other_face(int f) const { return f == face_left ? face_right : face_left; }
};

/// Finite piece of wall evidence kept after its line was filtered out.
struct RetainedEdge {
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  double direction = 0.0;
  double weight = 0.0;
  int cluster = -1;
};

struct Arrangement {
  std::vector<RepresentativeLine> lines;
  std::vector<RetainedEdge> chords;
  BoundingBox bbox;
  std::vector<Vec2> vertices;
  std::vector<Face> faces;
  std::vector<ArrEdge> edges;

  /// Faces sharing an interior edge with `face`, ascending, with the edge ids.
  std::vector<std::pair<int, int>> neighbors(int face) const;
  /// Index of the face containing `p`, or -1.
  int locate(const Vec2& p) const;
  bool touches_box(int face) const;
};

/// Lines are sorted by (direction, offset) before insertion so the result
/// does not depend on input order.
Arrangement build_arrangement(std::vector<RepresentativeLine> lines, const BoundingBox& bbox);

/// Splits every face the chord crosses from side to side; partial crossings
/// are ignored. Rebuilds the edge list; chord edges come back retained with
/// their stored weight, all others with weight 0.
void insert_chord(Arrangement& arrangement, const RetainedEdge& chord);

/// Coverage of one edge by the projected segments of its line's cluster.
double edge_weight(const ArrEdge& edge, const Arrangement& arrangement,
                   std::span<const WallCluster> clusters, double band_halfwidth);

void compute_weights(Arrangement& arrangement, std::span<const WallCluster> clusters,
                     double band_halfwidth);

/// Length-weighted coverage of each representative line over its edges.
std::vector<double> line_coverage(const Arrangement& arrangement);

struct LineFilterResult {
  std::vector<RepresentativeLine> kept;
  std::vector<int> removed;  // indices into Arrangement::lines
  std::vector<RetainedEdge> retained;
};

LineFilterResult filter_lines(const Arrangement& arrangement, double min_total_coverage = 0.1,
                              double keep_edge_coverage = 0.8);

/// Arrangement of the kept lines with the retained edges inserted as chords,
/// weights recomputed.
Arrangement refine_arrangement(const LineFilterResult& filtered, const BoundingBox& bbox,
                               std::span<const WallCluster> clusters, double band_halfwidth);

}  // namespace rose2
