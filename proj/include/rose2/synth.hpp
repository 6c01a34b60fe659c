#pragma once

// Synthetic cluttered and partial maps with exact ground truth.

#include "rose2/gridmap.hpp"
#include "rose2/rose.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>

namespace rose2 {

struct SynthSpec {
  std::uint64_t seed = 1;
  int rows = 2;  // rows of rooms; a corridor runs between consecutive rows
  int cols = 3;
  double room_min_m = 3.5;
  double room_max_m = 5.0;
  double corridor_width_m = 1.6;
  double wall_thickness_m = 0.15;
  double door_width_m = 0.9;
  double rotation_deg = 0.0;
  /// Fraction of Free cells turned into clutter.
  double clutter_density = 0.0;
  bool clutter_points = true;
  bool clutter_rectangles = true;
  /// Per-cell probability of a spurious Occupied reading on Free space.
  double flip_rate = 0.0;
  /// Fraction of Free cells kept observed; the rest become Unknown.
  double coverage = 1.0;
  double resolution = 0.05;
  /// Raster size; 0 fits the building plus a margin.
  int width = 0;
  int height = 0;
  double margin_m = 1.0;
  /// Clutter keeps this clearance from walls and doors.
  double clutter_clearance_m = 0.25;

  /// Throws std::invalid_argument on nonpositive sizes or rates outside [0, 1].
  void validate() const;
};

void to_json(nlohmann::json& j, const SynthSpec& s);
void from_json(const nlohmann::json& j, SynthSpec& s);

struct SynthMap {
  OccupancyGrid grid;
  LabelGrid labels;
  DirectionSet directions;
  /// 1 on clutter and noise cells.
  Raster<std::uint8_t> clutter;
  /// 1 on observed wall cells.
  Raster<std::uint8_t> walls;
};

/// Deterministic for a fixed spec. Throws InputError when the building does
/// not fit the requested raster.
SynthMap generate(const SynthSpec& spec);

/// Writes map.pgm, map.yaml, gt.png and spec.json into `dir`.
void save_synth(const SynthMap& map, const SynthSpec& spec, const std::filesystem::path& dir);

}  // namespace rose2
