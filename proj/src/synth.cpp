#include "rose2/synth.hpp"

#include "rose2/image_io.hpp"
#include "rose2/topology.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace rose2 {

namespace {

struct Rect {
  double x0, y0, x1, y1;
  int label;
  bool contains(const Vec2& p) const { return p.x() >= x0 && p.x() < x1 && p.y() >= y0 && p.y() < y1; }
};

struct Building {
  double width = 0.0;
  double height = 0.0;
  std::vector<Rect> doors;
  std::vector<Rect> spaces;  // rooms and corridors
};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return hi <= lo ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
}

Building layout(const SynthSpec& s, std::mt19937_64& rng) {
  const double t = s.wall_thickness_m, dw = s.door_width_m, cw = s.corridor_width_m;
  std::vector<double> widths(static_cast<std::size_t>(s.cols)), heights(static_cast<std::size_t>(s.rows));
  for (double& w : widths) w = uniform(rng, s.room_min_m, s.room_max_m);
  for (double& h : heights) h = uniform(rng, s.room_min_m, s.room_max_m);

  Building b;
  std::vector<double> xs, ys, corridor_y;
  double x = t;
  for (double w : widths) {
    xs.push_back(x);
    x += w + t;
  }
  b.width = x;
  double y = t;
  for (int i = 0; i < s.rows; ++i) {
    ys.push_back(y);
    y += heights[static_cast<std::size_t>(i)] + t;
    if (i + 1 < s.rows) {
      corridor_y.push_back(y);
      y += cw + t;
    }
  }
  b.height = y;

  auto label_of = [&](int i, int j) { return i * s.cols + j + 1; };
  for (int i = 0; i < s.rows; ++i) {
    for (int j = 0; j < s.cols; ++j) {
      const double x0 = xs[static_cast<std::size_t>(j)], y0 = ys[static_cast<std::size_t>(i)];
      b.spaces.push_back({x0, y0, x0 + widths[static_cast<std::size_t>(j)], y0 + heights[static_cast<std::size_t>(i)],
                          label_of(i, j)});
    }
  }
  for (std::size_t k = 0; k < corridor_y.size(); ++k) {
    b.spaces.push_back({t, corridor_y[k], b.width - t, corridor_y[k] + cw, s.rows * s.cols + static_cast<int>(k) + 1});
  }

  const double inset = 0.3 + dw / 2;
  for (int i = 0; i < s.rows; ++i) {
    for (int j = 0; j < s.cols; ++j) {
      const Rect& room = b.spaces[static_cast<std::size_t>(label_of(i, j) - 1)];
      const double cx = uniform(rng, room.x0 + inset, room.x1 - inset);
      auto horizontal_door = [&](double wall_y0) {
        b.doors.push_back({cx - dw / 2, wall_y0, cx + dw / 2, wall_y0 + t, room.label});
      };
      if (s.rows == 1) {
        if (j + 1 < s.cols) {
          const double cy = uniform(rng, room.y0 + inset, room.y1 - inset);
          b.doors.push_back({room.x1, cy - dw / 2, room.x1 + t, cy + dw / 2, room.label});
        }
        continue;
      }
      if (i == 0 || (j == 0 && i + 1 < s.rows)) horizontal_door(room.y1);
      if (i > 0) horizontal_door(room.y0 - t);
    }
  }
  return b;
}

}  // namespace

void SynthSpec::validate() const {
  if (rows < 1 || cols < 1) throw std::invalid_argument("synth: rows and cols must be positive");
  for (double v : {room_min_m, room_max_m, corridor_width_m, wall_thickness_m, door_width_m, resolution}) {
    if (!(v > 0.0)) throw std::invalid_argument("synth: physical sizes must be positive");
  }
  for (double v : {clutter_density, flip_rate, coverage}) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("synth: rates must lie in [0, 1]");
  }
  if (room_max_m < room_min_m) throw std::invalid_argument("synth: room_max_m < room_min_m");
  if (room_min_m < door_width_m + 0.6) throw std::invalid_argument("synth: rooms too small for doors");
  if (width < 0 || height < 0 || margin_m < 0.0) throw std::invalid_argument("synth: negative raster size");
}

void to_json(nlohmann::json& j, const SynthSpec& s) {
  j = nlohmann::json{{"seed", s.seed},
                     {"rows", s.rows},
                     {"cols", s.cols},
                     {"room_min_m", s.room_min_m},
                     {"room_max_m", s.room_max_m},
                     {"corridor_width_m", s.corridor_width_m},
                     {"wall_thickness_m", s.wall_thickness_m},
                     {"door_width_m", s.door_width_m},
                     {"rotation_deg", s.rotation_deg},
                     {"clutter_density", s.clutter_density},
                     {"clutter_points", s.clutter_points},
                     {"clutter_rectangles", s.clutter_rectangles},
                     {"flip_rate", s.flip_rate},
                     {"coverage", s.coverage},
                     {"resolution", s.resolution},
                     {"width", s.width},
                     {"height", s.height},
                     {"margin_m", s.margin_m},
                     {"clutter_clearance_m", s.clutter_clearance_m}};
}

void from_json(const nlohmann::json& j, SynthSpec& s) {
  const SynthSpec d;
  s.seed = j.value("seed", d.seed);
  s.rows = j.value("rows", d.rows);
  s.cols = j.value("cols", d.cols);
  s.room_min_m = j.value("room_min_m", d.room_min_m);
  s.room_max_m = j.value("room_max_m", d.room_max_m);
  s.corridor_width_m = j.value("corridor_width_m", d.corridor_width_m);
  s.wall_thickness_m = j.value("wall_thickness_m", d.wall_thickness_m);
  s.door_width_m = j.value("door_width_m", d.door_width_m);
  s.rotation_deg = j.value("rotation_deg", d.rotation_deg);
  s.clutter_density = j.value("clutter_density", d.clutter_density);
  s.clutter_points = j.value("clutter_points", d.clutter_points);
  s.clutter_rectangles = j.value("clutter_rectangles", d.clutter_rectangles);
  s.flip_rate = j.value("flip_rate", d.flip_rate);
  s.coverage = j.value("coverage", d.coverage);
  s.resolution = j.value("resolution", d.resolution);
  s.width = j.value("width", d.width);
  s.height = j.value("height", d.height);
  s.margin_m = j.value("margin_m", d.margin_m);
  s.clutter_clearance_m = j.value("clutter_clearance_m", d.clutter_clearance_m);
}

SynthMap generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const Building building = layout(spec, rng);
  const double res = spec.resolution;
  const double theta = spec.rotation_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(theta), sn = std::sin(theta);
  const double extent_x = building.width * std::abs(cs) + building.height * std::abs(sn);
  const double extent_y = building.width * std::abs(sn) + building.height * std::abs(cs);
  const int width = spec.width > 0 ? spec.width : static_cast<int>(std::ceil((extent_x + 2 * spec.margin_m) / res));
  const int height = spec.height > 0 ? spec.height : static_cast<int>(std::ceil((extent_y + 2 * spec.margin_m) / res));
  if (extent_x / res > width || extent_y / res > height) {
    throw InputError("synth: building does not fit the requested raster");
  }

  SynthMap out;
  out.grid = OccupancyGrid(width, height, res, Vec2::Zero(), kUnknown);
  out.labels = LabelGrid::Zero(height, width);
  out.clutter = Raster<std::uint8_t>::Zero(height, width);
  out.walls = Raster<std::uint8_t>::Zero(height, width);
  Raster<std::uint8_t> door = Raster<std::uint8_t>::Zero(height, width);

  const Vec2 map_center(0.5 * width * res, 0.5 * height * res);
  const Vec2 building_center(0.5 * building.width, 0.5 * building.height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const Vec2 d = Vec2((c + 0.5) * res, (r + 0.5) * res) - map_center;
      const Vec2 b = building_center + Vec2(cs * d.x() + sn * d.y(), -sn * d.x() + cs * d.y());
      if (b.x() < 0 || b.y() < 0 || b.x() >= building.width || b.y() >= building.height) continue;
      int label = 0;
      for (const Rect& rect : building.doors) {
        if (rect.contains(b)) {
          label = rect.label;
          door(r, c) = 1;
          break;
        }
      }
      for (std::size_t k = 0; label == 0 && k < building.spaces.size(); ++k) {
        if (building.spaces[k].contains(b)) label = building.spaces[k].label;
      }
      if (label == 0) {
        out.grid.set(c, r, kOccupied);
        out.walls(r, c) = 1;
      } else {
        out.grid.set(c, r, kFree);
        out.labels(r, c) = label;
      }
    }
  }

  // Cells far enough from walls and doors may take clutter.
  const Raster<std::uint8_t> non_free = (out.grid.mask(kFree) == 0).cast<std::uint8_t>();
  const auto wall_dist = distance_transform<double>(non_free, true).distance;
  const auto door_dist = distance_transform<double>(door, false).distance;
  const double clearance = spec.clutter_clearance_m / res;
  Raster<std::uint8_t> eligible = Raster<std::uint8_t>::Zero(height, width);
  std::vector<CellIndex> candidates;
  std::size_t free_cells = 0;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (out.grid.at(c, r) != kFree) continue;
      ++free_cells;
      if (wall_dist(r, c) >= clearance && door_dist(r, c) >= clearance + 0.5 * spec.door_width_m / res) {
        eligible(r, c) = 1;
        candidates.push_back({c, r});
      }
    }
  }
  auto mark = [&](int c, int r) {
    out.grid.set(c, r, kOccupied);
    out.labels(r, c) = 0;
    out.clutter(r, c) = 1;
  };

  const auto budget = static_cast<std::size_t>(std::llround(spec.clutter_density * static_cast<double>(free_cells)));
  std::size_t placed = 0;
  const bool any_kind = spec.clutter_points || spec.clutter_rectangles;
  for (std::size_t attempt = 0; any_kind && !candidates.empty() && placed < budget && attempt < 50 * budget + 1000;
       ++attempt) {
    const CellIndex at = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
    const bool rectangle = spec.clutter_rectangles && (!spec.clutter_points || (rng() & 1u));
    if (!rectangle) {
      if (out.clutter(at.row, at.col) == 0) {
        mark(at.col, at.row);
        ++placed;
      }
      continue;
    }
    const double sx = uniform(rng, 0.3, 1.2) / res, sy = uniform(rng, 0.3, 1.2) / res;
    const double phi = uniform(rng, 0.0, std::numbers::pi);
    const Vec2 u(std::cos(phi), std::sin(phi)), v(-std::sin(phi), std::cos(phi));
    const int reach = static_cast<int>(std::ceil(0.5 * std::hypot(sx, sy)));
    std::vector<CellIndex> cells;
    bool ok = true;
    for (int r = at.row - reach; ok && r <= at.row + reach; ++r) {
      for (int c = at.col - reach; ok && c <= at.col + reach; ++c) {
        const Vec2 d(c - at.col, r - at.row);
        if (std::abs(d.dot(u)) > 0.5 * sx || std::abs(d.dot(v)) > 0.5 * sy) continue;
        if (!out.grid.in_bounds(c, r) || eligible(r, c) == 0) {
          ok = false;
        } else if (out.clutter(r, c) == 0) {
          cells.push_back({c, r});
        }
      }
    }
    if (!ok || cells.empty() || placed + cells.size() > budget) continue;
    for (const CellIndex& cell : cells) mark(cell.col, cell.row);
    placed += cells.size();
  }

  if (spec.flip_rate > 0.0) {
    std::bernoulli_distribution flip(spec.flip_rate);
    for (const CellIndex& cell : candidates) {
      if (out.clutter(cell.row, cell.col) == 0 && flip(rng)) mark(cell.col, cell.row);
    }
  }

  if (spec.coverage < 1.0) {
    // Randomized growth over Free space stands in for partial exploration.
    std::vector<CellIndex> free_list;
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        if (out.grid.at(c, r) == kFree) free_list.push_back({c, r});
      }
    }
    const auto target = static_cast<std::size_t>(std::llround(spec.coverage * static_cast<double>(free_list.size())));
    Raster<std::uint8_t> seen = Raster<std::uint8_t>::Zero(height, width);
    std::vector<CellIndex> frontier;
    std::size_t visited = 0;
    auto pick_free = [&] {
      return free_list[std::uniform_int_distribution<std::size_t>(0, free_list.size() - 1)(rng)];
    };
    while (visited < target) {
      if (frontier.empty()) {
        CellIndex s = pick_free();
        while (seen(s.row, s.col) != 0) s = pick_free();
        seen(s.row, s.col) = 1;
        frontier.push_back(s);
      }
      const std::size_t k = std::uniform_int_distribution<std::size_t>(0, frontier.size() - 1)(rng);
      const CellIndex cur = frontier[k];
      frontier[k] = frontier.back();
      frontier.pop_back();
      seen(cur.row, cur.col) = 2;
      ++visited;
      constexpr int dr[4] = {-1, 0, 1, 0}, dc[4] = {0, 1, 0, -1};
      for (int n = 0; n < 4; ++n) {
        const int rr = cur.row + dr[n], cc = cur.col + dc[n];
        if (out.grid.in_bounds(cc, rr) && out.grid.at(cc, rr) == kFree && seen(rr, cc) == 0) {
          seen(rr, cc) = 1;
          frontier.push_back({cc, rr});
        }
      }
    }
    constexpr int kSensorReach = 3;  // cells
    Raster<std::uint8_t> near = Raster<std::uint8_t>::Zero(height, width);
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        if (seen(r, c) != 2) continue;
        for (int rr = std::max(0, r - kSensorReach); rr <= std::min(height - 1, r + kSensorReach); ++rr) {
          for (int cc = std::max(0, c - kSensorReach); cc <= std::min(width - 1, c + kSensorReach); ++cc) near(rr, cc) = 1;
        }
      }
    }
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        const Cell cell = out.grid.at(c, r);
        const bool drop = cell == kFree ? seen(r, c) != 2 : (cell == kOccupied && near(r, c) == 0);
        if (!drop) continue;
        out.grid.set(c, r, kUnknown);
        out.labels(r, c) = 0;
        out.clutter(r, c) = 0;
        out.walls(r, c) = 0;
      }
    }
  }

  out.directions.angles = {wrap_pi(theta), wrap_pi(theta + std::numbers::pi / 2)};
  std::sort(out.directions.angles.begin(), out.directions.angles.end());
  out.directions.scores = {1.0, 1.0};
  return out;
}

void save_synth(const SynthMap& map, const SynthSpec& spec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_map(map.grid, dir / "map.yaml");
  save_labels(map.labels, dir / "gt.png");
  io::write_text_atomic(dir / "spec.json", nlohmann::json(spec).dump(2) + "\n");
}

}  // namespace rose2
