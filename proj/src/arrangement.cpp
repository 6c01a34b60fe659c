#include "rose2/arrangement.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace rose2 {

namespace {

constexpr double kSideTol = 1e-7;   // vertex-on-line classification, cells
constexpr double kWeldTol = 1e-7;   // vertices closer than this are merged
constexpr double kChordTol = 0.5;   // slack when matching a chord to a face chord

class Builder {
 public:
  explicit Builder(Arrangement& arr) : arr_(arr) {
    for (const Face& f : arr_.faces) register_sides(f);
  }

  int weld(const Vec2& p) {
    for (std::size_t i = 0; i < arr_.vertices.size(); ++i) {
      if ((arr_.vertices[i] - p).norm() <= kWeldTol) return static_cast<int>(i);
    }
    arr_.vertices.push_back(p);
    return static_cast<int>(arr_.vertices.size() - 1);
  }

  void add_face(std::vector<int> ids, std::vector<int> tags) {
    Face f;
    f.id = static_cast<int>(arr_.faces.size());
    f.vertex_ids = std::move(ids);
    f.side_tags = std::move(tags);
    register_sides(f);
    arr_.faces.push_back(std::move(f));
  }

  /// Splits face `fi` by `line`; returns false when the line misses its interior.
  bool split(int fi, const Line2& line, int tag) {
    Face& face = arr_.faces[static_cast<std::size_t>(fi)];
    const std::size_t n = face.vertex_ids.size();
    std::vector<double> d(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = line.signed_distance(vertex(face.vertex_ids[i]));
      has_pos |= d[i] > kSideTol;
      has_neg |= d[i] < -kSideTol;
    }
    if (!has_pos || !has_neg) return false;

    unregister_sides(face);
    std::vector<int> ids, tags;
    std::vector<double> dist;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      const int u = face.vertex_ids[i], v = face.vertex_ids[j];
      ids.push_back(u);
      tags.push_back(face.side_tags[i]);
      dist.push_back(d[i]);
      if ((d[i] > kSideTol && d[j] < -kSideTol) || (d[i] < -kSideTol && d[j] > kSideTol)) {
        const Vec2 p = vertex(u) + (vertex(v) - vertex(u)) * (d[i] / (d[i] - d[j]));
        const int w = weld(p);
        insert_into_neighbor(u, v, w);
        ids.push_back(w);
        tags.push_back(face.side_tags[i]);
        dist.push_back(0.0);
      }
    }

    auto part = [&](bool positive) {
      std::vector<int> out_ids, out_tags;
      const std::size_t m = ids.size();
      auto inside = [&](std::size_t k) { return positive ? dist[k] >= -kSideTol : dist[k] <= kSideTol; };
      std::vector<std::size_t> keep;
      for (std::size_t k = 0; k < m; ++k) {
        if (inside(k)) keep.push_back(k);
      }
      for (std::size_t q = 0; q < keep.size(); ++q) {
        const std::size_t k = keep[q];
        const std::size_t next = keep[(q + 1) % keep.size()];
        out_ids.push_back(ids[k]);
        out_tags.push_back(next == (k + 1) % m ? tags[k] : tag);
      }
      return std::pair{out_ids, out_tags};
    };
    auto [pos_ids, pos_tags] = part(true);
    auto [neg_ids, neg_tags] = part(false);

    face.vertex_ids = std::move(pos_ids);
    face.side_tags = std::move(pos_tags);
    register_sides(face);
    add_face(std::move(neg_ids), std::move(neg_tags));
    return true;
  }

  void finalize() {
    std::map<std::pair<int, int>, int> side_face;
    for (Face& f : arr_.faces) {
      f.polygon.clear();
      for (int id : f.vertex_ids) f.polygon.push_back(vertex(id));
      f.area = signed_area(f.polygon);
      f.edges.clear();
      for (std::size_t i = 0; i < f.vertex_ids.size(); ++i) {
        side_face[{f.vertex_ids[i], f.vertex_ids[(i + 1) % f.vertex_ids.size()]}] = f.id;
      }
    }
    arr_.edges.clear();
    for (Face& f : arr_.faces) {
      for (std::size_t i = 0; i < f.vertex_ids.size(); ++i) {
        const int u = f.vertex_ids[i], v = f.vertex_ids[(i + 1) % f.vertex_ids.size()];
        auto rev = side_face.find({v, u});
        if (rev != side_face.end() && u > v) continue;  // emitted from the other face
        ArrEdge e;
        e.id = static_cast<int>(arr_.edges.size());
        e.a = vertex(u);
        e.b = vertex(v);
        e.face_left = f.id;
        e.face_right = rev != side_face.end() ? rev->second : -1;
        const int tag = f.side_tags[i];
        if (tag >= 0) e.line = tag;
        if (tag <= -2) e.chord = chord_of_tag(tag);
        arr_.edges.push_back(e);
      }
    }
    for (const ArrEdge& e : arr_.edges) {
      arr_.faces[static_cast<std::size_t>(e.face_left)].edges.push_back(e.id);
      if (e.face_right >= 0) arr_.faces[static_cast<std::size_t>(e.face_right)].edges.push_back(e.id);
    }
  }

  const Vec2& vertex(int id) const { return arr_.vertices[static_cast<std::size_t>(id)]; }

 private:
  void register_sides(const Face& f) {
    for (std::size_t i = 0; i < f.vertex_ids.size(); ++i) {
      sides_[{f.vertex_ids[i], f.vertex_ids[(i + 1) % f.vertex_ids.size()]}] = f.id;
    }
  }

  void unregister_sides(const Face& f) {
    for (std::size_t i = 0; i < f.vertex_ids.size(); ++i) {
      sides_.erase({f.vertex_ids[i], f.vertex_ids[(i + 1) % f.vertex_ids.size()]});
    }
  }

  // Keeps faces edge-to-edge: the face across side u->v gets w on its v->u side.
  void insert_into_neighbor(int u, int v, int w) {
    auto it = sides_.find({v, u});
    if (it == sides_.end()) return;
    Face& g = arr_.faces[static_cast<std::size_t>(it->second)];
    sides_.erase(it);
    for (std::size_t i = 0; i < g.vertex_ids.size(); ++i) {
      if (g.vertex_ids[i] == v && g.vertex_ids[(i + 1) % g.vertex_ids.size()] == u) {
        g.vertex_ids.insert(g.vertex_ids.begin() + static_cast<std::ptrdiff_t>(i + 1), w);
        g.side_tags.insert(g.side_tags.begin() + static_cast<std::ptrdiff_t>(i + 1), g.side_tags[i]);
        sides_[{v, w}] = g.id;
        sides_[{w, u}] = g.id;
        return;
      }
    }
  }

  Arrangement& arr_;
  std::map<std::pair<int, int>, int> sides_;
};

}  // namespace

std::vector<std::pair<int, int>> Arrangement::neighbors(int face) const {
  std::vector<std::pair<int, int>> out;
  for (int e : faces[static_cast<std::size_t>(face)].edges) {
    const ArrEdge& edge = edges[static_cast<std::size_t>(e)];
    if (edge.interior()) out.emplace_back(edge.other_face(face), e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int Arrangement::locate(const Vec2& p) const {
  for (const Face& f : faces) {
    if (convex_contains<double>(std::span<const Vec2>(f.polygon), p)) return f.id;
  }
  return -1;
}

bool Arrangement::touches_box(int face) const {
  const auto& tags = faces[static_cast<std::size_t>(face)].side_tags;
  return std::find(tags.begin(), tags.end(), kBoxSide) != tags.end();
}

namespace {

Arrangement build_unchecked(std::vector<RepresentativeLine> lines, const BoundingBox& bbox) {
  std::stable_sort(lines.begin(), lines.end(), [](const RepresentativeLine& a, const RepresentativeLine& b) {
    if (a.direction != b.direction) return a.direction < b.direction;
    return a.offset() < b.offset();
  });
  Arrangement arr;
  arr.lines = std::move(lines);
  arr.bbox = bbox;
  Builder builder(arr);
  const std::vector<int> corners{builder.weld(bbox.lo), builder.weld(Vec2(bbox.hi.x(), bbox.lo.y())),
                                 builder.weld(bbox.hi), builder.weld(Vec2(bbox.lo.x(), bbox.hi.y()))};
  builder.add_face(corners, std::vector<int>(4, kBoxSide));
  for (std::size_t li = 0; li < arr.lines.size(); ++li) {
    const Line2 line = arr.lines[li].line();
    const std::size_t existing = arr.faces.size();
    for (std::size_t fi = 0; fi < existing; ++fi) {
      builder.split(static_cast<int>(fi), line, static_cast<int>(li));
    }
  }
  builder.finalize();
  return arr;
}

}  // namespace

Arrangement build_arrangement(std::vector<RepresentativeLine> lines, const BoundingBox& bbox) {
  if (lines.empty()) throw PipelineError("arrangement", "no representative lines");
  return build_unchecked(std::move(lines), bbox);
}

void insert_chord(Arrangement& arr, const RetainedEdge& chord) {
  const int index = static_cast<int>(arr.chords.size());
  arr.chords.push_back(chord);
  const Vec2 dir = (chord.b - chord.a).normalized();
  const Line2 line{chord.a, dir};
  const double ca = 0.0, cb = (chord.b - chord.a).norm();
  Builder builder(arr);
  const std::size_t existing = arr.faces.size();
  for (std::size_t fi = 0; fi < existing; ++fi) {
    const Face& f = arr.faces[fi];
    // Parameter range of the supporting line inside this face.
    double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
    const std::size_t n = f.vertex_ids.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = builder.vertex(f.vertex_ids[i]);
      const Vec2& q = builder.vertex(f.vertex_ids[(i + 1) % n]);
      const double dp = line.signed_distance(p), dq = line.signed_distance(q);
      if (std::abs(dp) <= kSideTol) {
        tmin = std::min(tmin, line.param(p));
        tmax = std::max(tmax, line.param(p));
      }
      if ((dp > kSideTol && dq < -kSideTol) || (dp < -kSideTol && dq > kSideTol)) {
        const double t = line.param(p + (q - p) * (dp / (dp - dq)));
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
      }
    }
    if (!(tmax > tmin)) continue;
    if (ca <= tmin + kChordTol && cb >= tmax - kChordTol) {
      builder.split(static_cast<int>(fi), line, chord_tag(index));
    }
  }
  builder.finalize();
  for (ArrEdge& e : arr.edges) {
    if (e.chord < 0) continue;
    e.weight = arr.chords[static_cast<std::size_t>(e.chord)].weight;
    e.retained = true;
  }
}

double edge_weight(const ArrEdge& edge, const Arrangement& arr, std::span<const WallCluster> clusters,
                   double band_halfwidth) {
  if (edge.chord >= 0) return arr.chords[static_cast<std::size_t>(edge.chord)].weight;
  if (edge.line < 0) return 0.0;
  const RepresentativeLine& rep = arr.lines[static_cast<std::size_t>(edge.line)];
  if (rep.cluster < 0 || rep.cluster >= static_cast<int>(clusters.size())) return 0.0;
  const Line2 line = rep.line();
  double lo = line.param(edge.a), hi = line.param(edge.b);
  if (lo > hi) std::swap(lo, hi);
  if (!(hi > lo)) return 0.0;
  std::vector<std::pair<double, double>> intervals;
  for (const LineSegment& s : clusters[static_cast<std::size_t>(rep.cluster)].segments) {
    if (std::abs(line.signed_distance(s.midpoint())) > band_halfwidth) continue;
    double t1 = line.param(s.a()), t2 = line.param(s.b());
    if (t1 > t2) std::swap(t1, t2);
    t1 = std::max(t1, lo);
    t2 = std::min(t2, hi);
    if (t2 > t1) intervals.emplace_back(t1, t2);
  }
  std::sort(intervals.begin(), intervals.end());
  double covered = 0.0, run_lo = 0.0, run_hi = -std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : intervals) {
    if (a > run_hi) {
      if (std::isfinite(run_hi)) covered += run_hi - run_lo;
      run_lo = a;
      run_hi = b;
    } else {
      run_hi = std::max(run_hi, b);
    }
  }
  if (std::isfinite(run_hi)) covered += run_hi - run_lo;
  return std::clamp(covered / (hi - lo), 0.0, 1.0);
}

void compute_weights(Arrangement& arr, std::span<const WallCluster> clusters, double band_halfwidth) {
  for (ArrEdge& e : arr.edges) {
    e.weight = edge_weight(e, arr, clusters, band_halfwidth);
    e.retained = e.chord >= 0;
  }
}

std::vector<double> line_coverage(const Arrangement& arr) {
  std::vector<double> covered(arr.lines.size(), 0.0), total(arr.lines.size(), 0.0);
  for (const ArrEdge& e : arr.edges) {
    if (e.line < 0) continue;
    covered[static_cast<std::size_t>(e.line)] += e.weight * e.length();
    total[static_cast<std::size_t>(e.line)] += e.length();
  }
  std::vector<double> out(arr.lines.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (total[i] > 0.0) out[i] = covered[i] / total[i];
  }
  return out;
}

LineFilterResult filter_lines(const Arrangement& arr, double min_total_coverage, double keep_edge_coverage) {
  LineFilterResult result;
  const std::vector<double> coverage = line_coverage(arr);
  for (std::size_t i = 0; i < arr.lines.size(); ++i) {
    if (coverage[i] >= min_total_coverage) {
      result.kept.push_back(arr.lines[i]);
      continue;
    }
    result.removed.push_back(static_cast<int>(i));
    for (const ArrEdge& e : arr.edges) {
      if (e.line == static_cast<int>(i) && e.weight >= keep_edge_coverage) {
        result.retained.push_back(RetainedEdge{e.a, e.b, arr.lines[i].direction, e.weight, arr.lines[i].cluster});
      }
    }
  }
  return result;
}

Arrangement refine_arrangement(const LineFilterResult& filtered, const BoundingBox& bbox,
                               std::span<const WallCluster> clusters, double band_halfwidth) {
  // With every line filtered out the box itself is the only face.
  Arrangement arr = build_unchecked(filtered.kept, bbox);
  for (const RetainedEdge& chord : filtered.retained) insert_chord(arr, chord);
  compute_weights(arr, clusters, band_halfwidth);
  return arr;
}

}  // namespace rose2
