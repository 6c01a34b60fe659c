#pragma once

#include "rose2/types.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace rose2 {

enum Cell : std::uint8_t { kFree = 0, kOccupied = 1, kUnknown = 2 };

/// Trinary occupancy grid. Cell (0,0) is the top-left raster pixel; continuous
/// geometry puts cell centers at (col + 0.5, row + 0.5).
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(int width, int height, double resolution, Vec2 origin = Vec2::Zero(),
                Cell fill = kUnknown);
  OccupancyGrid(Raster<std::uint8_t> cells, double resolution, Vec2 origin = Vec2::Zero());

  int width() const { return static_cast<int>(cells_.cols()); }
  int height() const { return static_cast<int>(cells_.rows()); }
  double resolution() const { return resolution_; }
  const Vec2& origin() const { return origin_; }

  Cell at(int col, int row) const { return static_cast<Cell>(cells_(row, col)); }
  void set(int col, int row, Cell c) { cells_(row, col) = c; }
  bool in_bounds(int col, int row) const {
    return col >= 0 && row >= 0 && col < width() && row < height();
  }

  const Raster<std::uint8_t>& cells() const { return cells_; }
  Raster<std::uint8_t>& cells() { return cells_; }

  std::size_t count(Cell c) const;
  /// Boolean mask (1/0) of the cells equal to `c`.
  Raster<std::uint8_t> mask(Cell c) const;

 private:
  Raster<std::uint8_t> cells_;
  double resolution_ = 0.05;
  Vec2 origin_ = Vec2::Zero();
};

/// Per-cell room ids; 0 means unlabeled.
using LabelGrid = Raster<std::int32_t>;

struct CellIndex {
  int col = 0;
  int row = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

using PointSet = std::vector<CellIndex>;

/// Map-server style sidecar metadata.
struct MapMetadata {
  std::filesystem::path image;
  double resolution = 0.05;
  Vec2 origin = Vec2::Zero();
  bool negate = false;
  double occupied_thresh = 0.65;
  double free_thresh = 0.196;
};

MapMetadata load_metadata(const std::filesystem::path& metadata_path);

/// Thresholds an 8-bit grayscale raster into a trinary grid.
OccupancyGrid threshold_raster(const Raster<std::uint8_t>& gray, const MapMetadata& meta);

OccupancyGrid load_map(const std::filesystem::path& raster_path, const MapMetadata& meta);
/// Loads the sidecar and the raster it names (relative to the sidecar).
OccupancyGrid load_map(const std::filesystem::path& metadata_path);

/// Writes `<stem>.pgm` and `<stem>.yaml`; returns the sidecar path.
std::filesystem::path save_map(const OccupancyGrid& grid, const std::filesystem::path& yaml_path);

PointSet occupied_points(const OccupancyGrid& grid);

/// Clears labels off non-Free cells and renumbers ids to 1..n in ascending
/// order of the original ids.
LabelGrid normalize_labels(const LabelGrid& labels, const OccupancyGrid& grid);
LabelGrid normalize_labels(const LabelGrid& labels);

/// Indexed PNG, palette index = room id, index 0 unlabeled.
void save_labels(const LabelGrid& labels, const std::filesystem::path& path);
LabelGrid load_labels(const std::filesystem::path& path);

/// Fixed RGB palette used for room ids (id 0 maps to black).
std::array<std::uint8_t, 3> room_color(std::int32_t id);

/// Deterministic RGB rendering: Free white, Occupied black, Unknown mid-gray;
/// labeled cells take their palette color and polygon outlines are drawn red.
void render(const OccupancyGrid& grid, const LabelGrid* segmentation,
            std::span<const Polygon> floorplan, const std::filesystem::path& out_path);

Raster<std::uint8_t> render_rgb(const OccupancyGrid& grid, const LabelGrid* segmentation,
                                std::span<const Polygon> floorplan);

}  // namespace rose2
