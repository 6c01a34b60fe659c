#include "rose2/geometry.hpp"

#include <limits>
#include <map>
#include <numbers>
#include <unordered_map>

namespace rose2 {

std::pair<Polygon, Polygon> split_convex(const Polygon& poly, const Line2& line, double tol) {
  Polygon pos, neg;
  const std::size_t n = poly.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = line.signed_distance(poly[i]);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (d[i] >= -tol) pos.push_back(poly[i]);
    if (d[i] <= tol) neg.push_back(poly[i]);
    if ((d[i] > tol && d[j] < -tol) || (d[i] < -tol && d[j] > tol)) {
      const Vec2 p = poly[i] + (poly[j] - poly[i]) * (d[i] / (d[i] - d[j]));
      pos.push_back(p);
      neg.push_back(p);
    }
  }
  auto degenerate = [](const Polygon& p) {
    return p.size() < 3 || std::abs(signed_area(p)) <= 1e-12;
  };
  if (degenerate(pos)) pos.clear();
  if (degenerate(neg)) neg.clear();
  return {std::move(pos), std::move(neg)};
}

bool clip_line_to_box(const Line2& line, const Vec2& lo, const Vec2& hi, Vec2& a, Vec2& b) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 2; ++axis) {
    const double p = line.point[axis], d = line.dir[axis];
    if (std::abs(d) < 1e-15) {
      if (p < lo[axis] || p > hi[axis]) return false;
      continue;
    }
    double ta = (lo[axis] - p) / d, tb = (hi[axis] - p) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (!(t1 > t0)) return false;
  a = line.at(t0);
  b = line.at(t1);
  return true;
}

Polygon simplify_collinear(const Polygon& loop, double tol) {
  Polygon out = loop;
  bool changed = true;
  while (changed && out.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < out.size() && out.size() > 3; ++i) {
      const Vec2& prev = out[(i + out.size() - 1) % out.size()];
      const Vec2& next = out[(i + 1) % out.size()];
      const Vec2 a = out[i] - prev, b = next - out[i];
      const double scale = a.norm() * b.norm();
      if (a.norm() < tol || (std::abs(cross<double>(a, b)) <= tol * scale && a.dot(b) > 0)) {
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  return out;
}

namespace {

// Tolerance-based vertex welding on a hash grid.
class VertexWelder {
 public:
  explicit VertexWelder(double tol) : tol_(tol) {}

  int add(const Vec2& p) {
    const long kx = key(p.x()), ky = key(p.y());
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = grid_.find({kx + dx, ky + dy});
        if (it == grid_.end()) continue;
        for (int id : it->second) {
          if ((points_[static_cast<std::size_t>(id)] - p).norm() <= tol_) return id;
        }
      }
    }
    const int id = static_cast<int>(points_.size());
    points_.push_back(p);
    grid_[{kx, ky}].push_back(id);
    return id;
  }

  const std::vector<Vec2>& points() const { return points_; }

 private:
  long key(double v) const { return static_cast<long>(std::floor(v / (4.0 * tol_))); }

  double tol_;
  std::vector<Vec2> points_;
  std::map<std::pair<long, long>, std::vector<int>> grid_;
};

}  // namespace

std::vector<Polygon> union_boundary(std::span<const Polygon> pieces, double snap_tol) {
  VertexWelder welder(snap_tol);
  std::vector<std::vector<int>> loops;
  for (const Polygon& piece : pieces) {
    std::vector<int> ids;
    for (const Vec2& p : piece) {
      const int id = welder.add(p);
      if (ids.empty() || ids.back() != id) ids.push_back(id);
    }
    while (ids.size() > 1 && ids.front() == ids.back()) ids.pop_back();
    if (ids.size() >= 3) loops.push_back(std::move(ids));
  }
  const auto& pts = welder.points();

  // Directed edges, subdivided at any welded vertex lying on them so that
  // T-junctions cancel correctly.
  std::map<std::pair<int, int>, int> directed;
  for (const auto& ids : loops) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const int u = ids[i], v = ids[(i + 1) % ids.size()];
      const Vec2 a = pts[static_cast<std::size_t>(u)], b = pts[static_cast<std::size_t>(v)];
      const Vec2 ab = b - a;
      const double len = ab.norm();
      std::vector<std::pair<double, int>> inner;
      for (std::size_t w = 0; w < pts.size(); ++w) {
        if (static_cast<int>(w) == u || static_cast<int>(w) == v) continue;
        const double t = (pts[w] - a).dot(ab) / (len * len);
        if (t <= 0.0 || t >= 1.0) continue;
        if (std::abs(cross<double>(ab, pts[w] - a)) / len <= snap_tol) inner.emplace_back(t, static_cast<int>(w));
      }
      std::sort(inner.begin(), inner.end());
      int prev = u;
      inner.emplace_back(1.0, v);
      for (const auto& [t, w] : inner) {
        auto rev = directed.find({w, prev});
        if (rev != directed.end()) {
          if (--rev->second == 0) directed.erase(rev);
        } else {
          ++directed[{prev, w}];
        }
        prev = w;
      }
    }
  }

  std::multimap<int, int> outgoing;
  for (const auto& [edge, count] : directed) {
    for (int k = 0; k < count; ++k) outgoing.emplace(edge.first, edge.second);
  }

  std::vector<Polygon> result;
  while (!outgoing.empty()) {
    auto first = outgoing.begin();
    const int start = first->first;
    int prev = start;
    int cur = first->second;
    outgoing.erase(first);
    std::vector<int> loop{start};
    std::size_t guard = 0;
    while (cur != start && guard++ < 1000000) {
      loop.push_back(cur);
      auto [lo, hi] = outgoing.equal_range(cur);
      if (lo == hi) break;
      const Vec2 din = pts[static_cast<std::size_t>(cur)] - pts[static_cast<std::size_t>(prev)];
      auto best = lo;
      double best_turn = -std::numeric_limits<double>::infinity();
      for (auto it = lo; it != hi; ++it) {
        const Vec2 dout = pts[static_cast<std::size_t>(it->second)] - pts[static_cast<std::size_t>(cur)];
        const double turn = std::atan2(cross<double>(din, dout), din.dot(dout));
        if (turn > best_turn) {
          best_turn = turn;
          best = it;
        }
      }
      prev = cur;
      cur = best->second;
      outgoing.erase(best);
    }
    Polygon poly;
    for (int id : loop) poly.push_back(pts[static_cast<std::size_t>(id)]);
    poly = simplify_collinear(poly);
    if (poly.size() >= 3 && std::abs(signed_area(poly)) > 1e-12) result.push_back(std::move(poly));
  }
  std::stable_sort(result.begin(), result.end(),
                   [](const Polygon& a, const Polygon& b) { return signed_area(a) > signed_area(b); });
  return result;
}

double point_polygon_distance(const Vec2& p, const Polygon& loop) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < loop.size(); ++i) {
    best = std::min(best, point_segment_distance<double>(p, loop[i], loop[(i + 1) % loop.size()]));
  }
  return best;
}

bool loops_contain(std::span<const Polygon> loops, const Vec2& p) {
  bool inside = false;
  for (const Polygon& loop : loops) {
    for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
      const Vec2& a = loop[i];
      const Vec2& b = loop[j];
      if ((a.y() > p.y()) != (b.y() > p.y()) &&
          p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x()) {
        inside = !inside;
      }
    }
  }
  return inside;
}

}  // namespace rose2
