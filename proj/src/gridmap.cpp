#include "rose2/gridmap.hpp"

#include "rose2/format.hpp"
#include "rose2/image_io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace rose2 {
namespace fs = std::filesystem;

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, Vec2 origin, Cell fill)
    : resolution_(resolution), origin_(std::move(origin)) {
  if (width < 0 || height < 0) throw InputError("grid dimensions must be non-negative");
  if (!(resolution > 0.0)) throw InputError("resolution must be positive");
  cells_ = Raster<std::uint8_t>::Constant(height, width, fill);
}

OccupancyGrid::OccupancyGrid(Raster<std::uint8_t> cells, double resolution, Vec2 origin)
    : cells_(std::move(cells)), resolution_(resolution), origin_(std::move(origin)) {
  if (!(resolution > 0.0)) throw InputError("resolution must be positive");
  if (cells_.size() && cells_.maxCoeff() > kUnknown) throw InputError("cell state out of range");
}

std::size_t OccupancyGrid::count(Cell c) const {
  return static_cast<std::size_t>((cells_ == static_cast<std::uint8_t>(c)).count());
}

Raster<std::uint8_t> OccupancyGrid::mask(Cell c) const {
  return (cells_ == static_cast<std::uint8_t>(c)).cast<std::uint8_t>();
}

MapMetadata load_metadata(const fs::path& metadata_path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(metadata_path.string());
  } catch (const YAML::Exception& e) {
    throw InputError("cannot parse metadata " + metadata_path.string() + ": " + e.what());
  }
  if (!root.IsMap()) throw InputError(metadata_path.string() + ": metadata is not a key/value map");
  MapMetadata meta;
  auto require = [&](const char* key) {
    if (!root[key]) throw InputError(metadata_path.string() + ": missing field '" + key + "'");
    return root[key];
  };
  try {
    if (root["image"]) meta.image = root["image"].as<std::string>();
    meta.resolution = require("resolution").as<double>();
    const YAML::Node origin = require("origin");
    if (!origin.IsSequence() || origin.size() < 2)
      throw InputError(metadata_path.string() + ": origin must be [x, y, yaw]");
    meta.origin = Vec2(origin[0].as<double>(), origin[1].as<double>());
    if (root["negate"]) meta.negate = root["negate"].as<int>() != 0;
    meta.occupied_thresh = require("occupied_thresh").as<double>();
    meta.free_thresh = require("free_thresh").as<double>();
  } catch (const YAML::Exception& e) {
    throw InputError(metadata_path.string() + ": bad field value: " + e.what());
  }
  if (!(meta.resolution > 0.0)) throw InputError("resolution must be positive");
  if (!(0.0 <= meta.free_thresh && meta.free_thresh < meta.occupied_thresh &&
        meta.occupied_thresh <= 1.0))
    throw InputError("thresholds must satisfy 0 <= free_thresh < occupied_thresh <= 1");
  return meta;
}

OccupancyGrid threshold_raster(const Raster<std::uint8_t>& gray, const MapMetadata& meta) {
  if (!(0.0 <= meta.free_thresh && meta.free_thresh < meta.occupied_thresh &&
        meta.occupied_thresh <= 1.0))
    throw InputError("thresholds must satisfy 0 <= free_thresh < occupied_thresh <= 1");
  Raster<std::uint8_t> cells(gray.rows(), gray.cols());
  for (Eigen::Index i = 0; i < gray.size(); ++i) {
    const double v = gray.data()[i];
    const double darkness = meta.negate ? v / 255.0 : (255.0 - v) / 255.0;
    Cell c = kUnknown;
    if (darkness >= meta.occupied_thresh) {
      c = kOccupied;
    } else if (darkness <= meta.free_thresh) {
      c = kFree;
    }
    cells.data()[i] = c;
  }
  return OccupancyGrid(std::move(cells), meta.resolution, meta.origin);
}

OccupancyGrid load_map(const fs::path& raster_path, const MapMetadata& meta) {
  return threshold_raster(io::read_gray(raster_path), meta);
}

OccupancyGrid load_map(const fs::path& metadata_path) {
  const MapMetadata meta = load_metadata(metadata_path);
  if (meta.image.empty()) throw InputError(metadata_path.string() + ": missing field 'image'");
  fs::path image = meta.image;
  if (image.is_relative()) image = metadata_path.parent_path() / image;
  return load_map(image, meta);
}

fs::path save_map(const OccupancyGrid& grid, const fs::path& yaml_path) {
  fs::path image = yaml_path;
  image.replace_extension(".pgm");
  Raster<std::uint8_t> gray(grid.height(), grid.width());
  for (Eigen::Index i = 0; i < gray.size(); ++i) {
    switch (grid.cells().data()[i]) {
      case kFree: gray.data()[i] = 254; break;
      case kOccupied: gray.data()[i] = 0; break;
      default: gray.data()[i] = 205; break;
    }
  }
  io::write_pgm(gray, image);
  std::ostringstream yaml;
  yaml << "image: " << image.filename().string() << "\n"
       << "resolution: " << format_double(grid.resolution()) << "\n"
       << "origin: [" << format_double(grid.origin().x()) << ", "
       << format_double(grid.origin().y()) << ", 0.0]\n"
       << "negate: 0\n"
       << "occupied_thresh: 0.65\n"
       << "free_thresh: 0.196\n";
  io::write_text_atomic(yaml_path, yaml.str());
  return yaml_path;
}

PointSet occupied_points(const OccupancyGrid& grid) {
  PointSet points;
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (grid.at(c, r) == kOccupied) points.push_back({c, r});
    }
  }
  return points;
}

LabelGrid normalize_labels(const LabelGrid& labels) {
  std::map<std::int32_t, std::int32_t> remap;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels.data()[i] > 0) remap.emplace(labels.data()[i], 0);
  }
  std::int32_t next = 1;
  for (auto& [from, to] : remap) to = next++;
  LabelGrid out = LabelGrid::Zero(labels.rows(), labels.cols());
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels.data()[i] > 0) out.data()[i] = remap[labels.data()[i]];
  }
  return out;
}

LabelGrid normalize_labels(const LabelGrid& labels, const OccupancyGrid& grid) {
  if (labels.rows() != grid.height() || labels.cols() != grid.width())
    throw InputError("label grid dimensions differ from the occupancy grid");
  LabelGrid masked = labels;
  for (Eigen::Index i = 0; i < masked.size(); ++i) {
    if (grid.cells().data()[i] != kFree) masked.data()[i] = 0;
  }
  return normalize_labels(masked);
}

std::array<std::uint8_t, 3> room_color(std::int32_t id) {
  if (id <= 0) return {0, 0, 0};
  // Golden-ratio hue walk; saturation and value alternate so neighbors differ.
  const double hue = std::fmod(0.13 + 0.618033988749895 * id, 1.0) * 6.0;
  const double sat = (id % 2) ? 0.65 : 0.45;
  const double val = (id % 3 == 0) ? 0.80 : 0.95;
  const int sector = static_cast<int>(hue);
  const double f = hue - sector;
  const double p = val * (1 - sat), q = val * (1 - sat * f), t = val * (1 - sat * (1 - f));
  double r = val, g = t, b = p;
  switch (sector % 6) {
    case 0: r = val, g = t, b = p; break;
    case 1: r = q, g = val, b = p; break;
    case 2: r = p, g = val, b = t; break;
    case 3: r = p, g = q, b = val; break;
    case 4: r = t, g = p, b = val; break;
    default: r = val, g = p, b = q; break;
  }
  auto to8 = [](double x) { return static_cast<std::uint8_t>(std::lround(x * 255.0)); };
  return {to8(r), to8(g), to8(b)};
}

void save_labels(const LabelGrid& labels, const fs::path& path) {
  const std::int32_t max_id = labels.size() ? labels.maxCoeff() : 0;
  if (max_id > 255) throw InputError("indexed PNG holds at most 255 rooms");
  if (labels.size() && labels.minCoeff() < 0) throw InputError("negative room id");
  std::vector<std::array<std::uint8_t, 3>> palette;
  for (std::int32_t id = 0; id <= max_id; ++id) palette.push_back(room_color(id));
  io::write_indexed_png(labels.cast<std::uint8_t>(), palette, path);
}

LabelGrid load_labels(const fs::path& path) {
  return io::read_index_png(path).cast<std::int32_t>();
}

namespace {

void plot(Raster<std::uint8_t>& rgb, int x, int y, const std::array<std::uint8_t, 3>& color) {
  const int width = static_cast<int>(rgb.cols() / 3);
  if (x < 0 || y < 0 || x >= width || y >= rgb.rows()) return;
  for (int k = 0; k < 3; ++k) rgb(y, 3 * x + k) = color[k];
}

void draw_line(Raster<std::uint8_t>& rgb, int x0, int y0, int x1, int y1,
               const std::array<std::uint8_t, 3>& color) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    plot(rgb, x0, y0, color);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) err += dy, x0 += sx;
    if (e2 <= dx) err += dx, y0 += sy;
  }
}

}  // namespace

Raster<std::uint8_t> render_rgb(const OccupancyGrid& grid, const LabelGrid* segmentation,
                                std::span<const Polygon> floorplan) {
  if (segmentation && (segmentation->rows() != grid.height() || segmentation->cols() != grid.width()))
    throw InputError("segmentation overlay dimensions differ from the grid");
  Raster<std::uint8_t> rgb(grid.height(), 3 * grid.width());
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      std::array<std::uint8_t, 3> color{128, 128, 128};
      if (grid.at(c, r) == kFree) color = {255, 255, 255};
      if (grid.at(c, r) == kOccupied) color = {0, 0, 0};
      if (segmentation && (*segmentation)(r, c) > 0) color = room_color((*segmentation)(r, c));
      for (int k = 0; k < 3; ++k) rgb(r, 3 * c + k) = color[k];
    }
  }
  const std::array<std::uint8_t, 3> outline{220, 0, 0};
  for (const Polygon& poly : floorplan) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % poly.size()];
      auto px = [&](double x, int limit) {
        return std::clamp(static_cast<int>(std::floor(x)), 0, std::max(0, limit - 1));
      };
      draw_line(rgb, px(a.x(), grid.width()), px(a.y(), grid.height()), px(b.x(), grid.width()),
                px(b.y(), grid.height()), outline);
    }
  }
  return rgb;
}

void render(const OccupancyGrid& grid, const LabelGrid* segmentation,
            std::span<const Polygon> floorplan, const fs::path& out_path) {
  io::write_rgb_png(render_rgb(grid, segmentation, floorplan), out_path);
}

}  // namespace rose2
