#include "rose2/arrangement.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>

namespace rose2 {
namespace {

constexpr double kPi = std::numbers::pi;
const BoundingBox kBox{Vec2::Zero(), Vec2(100, 100)};

RepresentativeLine make_line(double direction, Vec2 anchor, int cluster = -1, const BoundingBox& box = kBox) {
  RepresentativeLine l;
  l.direction = direction;
  l.anchor = anchor;
  l.cluster = cluster;
  clip_line_to_box(l.line(), box.lo, box.hi, l.chord_a, l.chord_b);
  return l;
}

RepresentativeLine hline(double y, int cluster = -1) { return make_line(0.0, Vec2(0, y), cluster); }
RepresentativeLine vline(double x, int cluster = -1) { return make_line(kPi / 2, Vec2(x, 0), cluster); }

WallCluster cluster_of(std::vector<LineSegment> segs, double direction) {
  WallCluster c;
  c.segments = std::move(segs);
  c.direction = direction;
  c.aligned = true;
  return c;
}

double total_area(const Arrangement& a) {
  double s = 0;
  for (const Face& f : a.faces) s += f.area;
  return s;
}

void check_structure(const Arrangement& a) {
  EXPECT_NEAR(total_area(a), a.bbox.area(), 1e-6 * a.bbox.area());
  for (const Face& f : a.faces) {
    EXPECT_GT(f.area, 0.0);
    EXPECT_NEAR(signed_area(f.polygon), f.area, 1e-9 * std::max(1.0, f.area));
    // Convex and positively oriented.
    const std::size_t n = f.polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 e1 = f.polygon[(i + 1) % n] - f.polygon[i];
      const Vec2 e2 = f.polygon[(i + 2) % n] - f.polygon[(i + 1) % n];
      EXPECT_GE(e1.x() * e2.y() - e1.y() * e2.x(), -1e-9);
    }
  }
  for (const ArrEdge& e : a.edges) {
    EXPECT_GE(e.weight, 0.0);
    EXPECT_LE(e.weight, 1.0);
    EXPECT_GE(e.face_left, 0);
    if (e.on_box()) {
      EXPECT_EQ(e.face_right, -1);
    } else {
      EXPECT_GE(e.face_right, 0) << "interior edge " << e.id;
    }
    for (int f : {e.face_left, e.face_right}) {
      if (f < 0) continue;
      const auto& edges = a.faces[static_cast<std::size_t>(f)].edges;
      EXPECT_NE(std::find(edges.begin(), edges.end(), e.id), edges.end());
    }
  }
  for (const Face& f : a.faces) {
    for (const auto& [g, edge] : a.neighbors(f.id)) {
      const auto back = a.neighbors(g);
      EXPECT_NE(std::find_if(back.begin(), back.end(), [&](const auto& p) { return p.first == f.id; }), back.end());
    }
  }
}

int interior_edges(const Arrangement& a) {
  return static_cast<int>(std::count_if(a.edges.begin(), a.edges.end(), [](const ArrEdge& e) { return e.interior(); }));
}

TEST(Build, OneLineTwoFaces) {
  const Arrangement a = build_arrangement({hline(30)}, kBox);
  EXPECT_EQ(a.faces.size(), 2u);
  EXPECT_EQ(interior_edges(a), 1);
  check_structure(a);
}

TEST(Build, TwoPerpendicularLinesFourFaces) {
  const Arrangement a = build_arrangement({hline(30), vline(60)}, kBox);
  EXPECT_EQ(a.faces.size(), 4u);
  EXPECT_EQ(interior_edges(a), 4);
  check_structure(a);
}

TEST(Build, GridFaceCountFormula) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(1.0, 99.0);
  for (int n1 = 0; n1 <= 5; ++n1) {
    for (int n2 = 0; n2 <= 5; ++n2) {
      if (n1 + n2 == 0) continue;
      std::vector<RepresentativeLine> lines;
      for (int i = 0; i < n1; ++i) lines.push_back(hline(pos(rng)));
      for (int i = 0; i < n2; ++i) lines.push_back(vline(pos(rng)));
      const Arrangement a = build_arrangement(lines, kBox);
      EXPECT_EQ(a.faces.size(), static_cast<std::size_t>((n1 + 1) * (n2 + 1)));
      check_structure(a);
    }
  }
}

TEST(Build, AreaConservationRandomLines) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> pos(0.0, 100.0), ang(0.0, kPi);
  std::uniform_int_distribution<int> count(1, 12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RepresentativeLine> lines;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) lines.push_back(make_line(ang(rng), Vec2(pos(rng), pos(rng))));
    const Arrangement a = build_arrangement(lines, kBox);
    EXPECT_NEAR(total_area(a), 1e4, 1e-6 * 1e4) << "trial " << trial;
    check_structure(a);
  }
}

TEST(Build, ConcurrentLinesWeld) {
  // Three lines through one point: six faces, no slivers.
  const Vec2 p(50, 50);
  const Arrangement a = build_arrangement({make_line(0.0, p), make_line(kPi / 2, p), make_line(kPi / 4, p)}, kBox);
  EXPECT_EQ(a.faces.size(), 6u);
  check_structure(a);
}

TEST(Build, InputOrderDoesNotMatter) {
  std::vector<RepresentativeLine> lines{hline(20), vline(70), make_line(0.4, Vec2(30, 40)), hline(80)};
  const Arrangement a = build_arrangement(lines, kBox);
  std::reverse(lines.begin(), lines.end());
  const Arrangement b = build_arrangement(lines, kBox);
  ASSERT_EQ(a.faces.size(), b.faces.size());
  for (std::size_t i = 0; i < a.faces.size(); ++i) {
    ASSERT_EQ(a.faces[i].polygon.size(), b.faces[i].polygon.size());
    for (std::size_t k = 0; k < a.faces[i].polygon.size(); ++k) EXPECT_EQ(a.faces[i].polygon[k], b.faces[i].polygon[k]);
  }
}

TEST(Build, ZeroLinesIsPipelineError) { EXPECT_THROW(build_arrangement({}, kBox), PipelineError); }

TEST(Locate, CentroidsFindTheirFace) {
  const Arrangement a = build_arrangement({hline(30), vline(60), make_line(0.7, Vec2(40, 40))}, kBox);
  for (const Face& f : a.faces) EXPECT_EQ(a.locate(centroid(f.polygon)), f.id);
  EXPECT_EQ(a.locate(Vec2(-5, 5)), -1);
}

// Edge of line y = 50 between the vertical lines x = 20 and x = 70.
const ArrEdge& middle_edge(const Arrangement& a) {
  for (const ArrEdge& e : a.edges) {
    if (e.line >= 0 && a.lines[static_cast<std::size_t>(e.line)].direction == 0.0 &&
        std::abs(std::min(e.a.x(), e.b.x()) - 20) < 1e-9 && std::abs(std::max(e.a.x(), e.b.x()) - 70) < 1e-9)
      return e;
  }
  throw std::logic_error("middle edge missing");
}

Arrangement three_lines() { return build_arrangement({hline(50, 0), vline(20), vline(70)}, kBox); }

LineSegment hseg(double x0, double x1, double y) { return LineSegment(Vec2(x0, y), Vec2(x1, y), 0.0); }

TEST(Weight, SpanningSegmentIsOne) {
  const Arrangement a = three_lines();
  const std::vector<WallCluster> c{cluster_of({hseg(20, 70, 50)}, 0.0)};
  EXPECT_DOUBLE_EQ(edge_weight(middle_edge(a), a, c, 10.0), 1.0);
}

TEST(Weight, NoEvidenceIsZero) {
  const Arrangement a = three_lines();
  EXPECT_DOUBLE_EQ(edge_weight(middle_edge(a), a, std::vector<WallCluster>{cluster_of({}, 0.0)}, 10.0), 0.0);
  // Segments outside the band do not count.
  const std::vector<WallCluster> far{cluster_of({hseg(20, 70, 65)}, 0.0)};
  EXPECT_DOUBLE_EQ(edge_weight(middle_edge(a), a, far, 10.0), 0.0);
}

TEST(Weight, HalfOverlappingIntervals) {
  const Arrangement a = three_lines();
  const std::vector<WallCluster> c{cluster_of({hseg(25, 45, 50), hseg(35, 55, 50.5)}, 0.0)};
  EXPECT_DOUBLE_EQ(edge_weight(middle_edge(a), a, c, 10.0), 0.6);
}

TEST(Weight, IntervalUnionMatchesUnitCellCount) {
  // Integer endpoints make the union length an exact count of unit cells.
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> x(0, 100), n(0, 6);
  const Arrangement a = three_lines();
  const ArrEdge& e = middle_edge(a);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LineSegment> segs;
    std::vector<char> covered(100, 0);
    const int k = n(rng);
    for (int i = 0; i < k; ++i) {
      int lo = x(rng), hi = x(rng);
      if (lo == hi) continue;
      if (lo > hi) std::swap(lo, hi);
      segs.push_back(hseg(lo, hi, 50));
      for (int c = lo; c < hi; ++c) covered[static_cast<std::size_t>(c)] = 1;
    }
    int count = 0;
    for (int c = 20; c < 70; ++c) count += covered[static_cast<std::size_t>(c)];
    const std::vector<WallCluster> cl{cluster_of(segs, 0.0)};
    EXPECT_NEAR(edge_weight(e, a, cl, 5.0), count / 50.0, 1e-12);
  }
}

TEST(Weight, InvariantUnderTranslation) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> pos(0, 100), shift(-500, 500);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec2 t(shift(rng), shift(rng));
    const BoundingBox moved{kBox.lo + t, kBox.hi + t};
    std::vector<LineSegment> segs, segs_t;
    for (int i = 0; i < 4; ++i) {
      const double x0 = pos(rng), y = 40 + pos(rng) / 20;
      segs.push_back(hseg(x0, x0 + 15, y));
      segs_t.emplace_back(segs.back().a() + t, segs.back().b() + t, 0.0);
    }
    Arrangement a = build_arrangement({hline(45, 0), vline(30), make_line(kPi / 2, Vec2(75, 0))}, kBox);
    Arrangement b = build_arrangement({make_line(0.0, Vec2(0, 45) + t, 0, moved), make_line(kPi / 2, Vec2(30, 0) + t, -1, moved),
                                       make_line(kPi / 2, Vec2(75, 0) + t, -1, moved)},
                                      moved);
    compute_weights(a, std::vector<WallCluster>{cluster_of(segs, 0.0)}, 5.0);
    compute_weights(b, std::vector<WallCluster>{cluster_of(segs_t, 0.0)}, 5.0);
    ASSERT_EQ(a.edges.size(), b.edges.size());
    for (std::size_t i = 0; i < a.edges.size(); ++i) EXPECT_NEAR(a.edges[i].weight, b.edges[i].weight, 1e-9);
  }
}

TEST(Weight, AlwaysInUnitInterval) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-20, 120), ang(0, kPi);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RepresentativeLine> lines;
    std::vector<WallCluster> clusters;
    for (int i = 0; i < 5; ++i) {
      const double d = ang(rng);
      const Vec2 p(pos(rng), pos(rng));
      lines.push_back(make_line(d, p, i));
      std::vector<LineSegment> segs;
      for (int k = 0; k < 4; ++k) {
        const double s = pos(rng);
        const Vec2 q = p + s * direction_of(d);
        segs.emplace_back(q, q + 30 * direction_of(d), d);
      }
      clusters.push_back(cluster_of(segs, d));
    }
    Arrangement a = build_arrangement(lines, kBox);
    compute_weights(a, clusters, 10.0);
    for (const ArrEdge& e : a.edges) {
      EXPECT_GE(e.weight, 0.0);
      EXPECT_LE(e.weight, 1.0);
    }
  }
}

// Arrangement with hand-set weights on the edges of line y = 50.
Arrangement weighted(std::vector<double> weights) {
  Arrangement a = build_arrangement({hline(50, 0), vline(20, 1), vline(70, 2)}, kBox);
  std::size_t k = 0;
  std::vector<ArrEdge*> edges;
  for (ArrEdge& e : a.edges)
    if (e.line >= 0 && a.lines[static_cast<std::size_t>(e.line)].direction == 0.0) edges.push_back(&e);
  std::sort(edges.begin(), edges.end(), [](auto* x, auto* y) { return std::min(x->a.x(), x->b.x()) < std::min(y->a.x(), y->b.x()); });
  for (ArrEdge* e : edges) e->weight = weights[k++];
  for (ArrEdge& e : a.edges)
    if (e.line >= 0 && a.lines[static_cast<std::size_t>(e.line)].direction != 0.0) e.weight = 1.0;
  return a;
}

TEST(Filter, FullyCoveredLineKept) {
  const LineFilterResult r = filter_lines(weighted({1.0, 1.0, 1.0}));
  EXPECT_EQ(r.kept.size(), 3u);
  EXPECT_TRUE(r.removed.empty());
}

TEST(Filter, ZeroLineRemovedWithoutRetained) {
  const LineFilterResult r = filter_lines(weighted({0.0, 0.0, 0.0}));
  EXPECT_EQ(r.kept.size(), 2u);
  EXPECT_EQ(r.removed.size(), 1u);
  EXPECT_TRUE(r.retained.empty());
}

TEST(Filter, WeakLineKeepsStrongEdge) {
  // Edges of y = 50 have lengths 5, 65 and 30; only the first is covered.
  Arrangement a = build_arrangement({hline(50, 0), vline(5, 1), vline(70, 2)}, kBox);
  for (ArrEdge& e : a.edges) {
    const bool horizontal = e.line >= 0 && a.lines[static_cast<std::size_t>(e.line)].direction == 0.0;
    e.weight = horizontal ? (std::max(e.a.x(), e.b.x()) <= 5.0 + 1e-9 ? 0.9 : 0.0) : 1.0;
  }
  // Overall coverage 0.9 * 5 / 100 = 0.045 < 0.1.
  EXPECT_NEAR(line_coverage(a)[0], 0.045, 1e-12);
  const LineFilterResult r = filter_lines(a);
  ASSERT_EQ(r.removed.size(), 1u);
  ASSERT_EQ(r.retained.size(), 1u);
  EXPECT_DOUBLE_EQ(r.retained[0].weight, 0.9);
  EXPECT_NEAR(std::abs(r.retained[0].b.x() - r.retained[0].a.x()), 5.0, 1e-9);
}

TEST(Refine, FacesAreUnionsOfOldFaces) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(5, 95), ang(0, kPi);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<RepresentativeLine> lines;
    for (int i = 0; i < 6; ++i) lines.push_back(make_line(ang(rng), Vec2(pos(rng), pos(rng)), i));
    Arrangement full = build_arrangement(lines, kBox);
    for (ArrEdge& e : full.edges) e.weight = 0.0;
    // Mark a random subset of lines fully covered.
    std::vector<char> strong(full.lines.size());
    for (auto& s : strong) s = coin(rng);
    for (ArrEdge& e : full.edges)
      if (e.line >= 0 && strong[static_cast<std::size_t>(e.line)]) e.weight = 1.0;
    const LineFilterResult f = filter_lines(full);
    const Arrangement refined = refine_arrangement(f, kBox, {}, 5.0);
    check_structure(refined);
    std::vector<double> area(refined.faces.size(), 0.0);
    for (const Face& old : full.faces) {
      const int owner = refined.locate(centroid(old.polygon));
      ASSERT_GE(owner, 0);
      area[static_cast<std::size_t>(owner)] += old.area;
    }
    for (const Face& f2 : refined.faces) EXPECT_NEAR(area[static_cast<std::size_t>(f2.id)], f2.area, 1e-6 * f2.area);
  }
}

TEST(Chord, SplitsOnlyCrossedFaces) {
  Arrangement a = build_arrangement({vline(50)}, kBox);
  RetainedEdge chord{Vec2(0, 30), Vec2(50, 30), 0.0, 1.0, -1};
  insert_chord(a, chord);
  EXPECT_EQ(a.faces.size(), 3u);
  check_structure(a);
  int chords = 0;
  for (const ArrEdge& e : a.edges) {
    if (e.chord < 0) continue;
    ++chords;
    EXPECT_TRUE(e.retained);
    EXPECT_DOUBLE_EQ(e.weight, 1.0);
  }
  EXPECT_EQ(chords, 1);
  // A chord that stops halfway through a face changes nothing.
  Arrangement b = build_arrangement({vline(50)}, kBox);
  insert_chord(b, RetainedEdge{Vec2(60, 30), Vec2(80, 30), 0.0, 1.0, -1});
  EXPECT_EQ(b.faces.size(), 2u);
}

TEST(Refine, EverythingFilteredLeavesTheBox) {
  LineFilterResult f;
  const Arrangement a = refine_arrangement(f, kBox, {}, 5.0);
  ASSERT_EQ(a.faces.size(), 1u);
  EXPECT_NEAR(a.faces[0].area, 1e4, 1e-9);
}

}  // namespace
}  // namespace rose2
