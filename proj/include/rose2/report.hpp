#pragma once

// Output artifacts of a segmentation run. Everything here is a pure function
// of its inputs so repeated runs produce identical bytes.

#include "rose2/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <span>
#include <string>

namespace rose2 {

/// Cell coordinates to map-frame meters: the origin is the lower-left
/// corner of the raster and y points up.
Vec2 to_meters(const Vec2& cell_point, const OccupancyGrid& grid);

/// SVG in cell coordinates: map raster outline, representative lines, and
/// room boundaries when `plan` is given.
std::string lines_svg(const OccupancyGrid& grid, std::span<const RepresentativeLine> lines, const FloorPlan* plan);

/// Rooms as boundary loops in cells and in meters, plus ids and warnings.
nlohmann::json floorplan_json(const FloorPlan& plan, const OccupancyGrid& grid);

nlohmann::json timing_json(std::span<const StageTiming> timings);

/// Hough segments colored by wall cluster.
std::string segments_svg(const OccupancyGrid& grid, const WallResult& walls);
nlohmann::json arrangement_json(const Arrangement& arrangement);
/// Edges shaded from red (weight 0) to blue (weight 1).
std::string arrangement_svg(const OccupancyGrid& grid, const Arrangement& arrangement);
nlohmann::json graph_json(const TopoGraph& graph);
std::string histogram_csv(const DirectionHistogram& histogram);
/// Log magnitude, scaled to 0..255.
Raster<std::uint8_t> spectrum_image(const Spectrum& spectrum);
std::string spectrum_csv(const Spectrum& spectrum);

/// Writes clean_map.{pgm,yaml}, lines.svg, floorplan.json, segmented.png and
/// timing.json into `dir`; with `debug`, also a debug/ subdirectory. Every
/// file goes through a temp file and a rename.
void write_segment_outputs(const PipelineResult& result, const OccupancyGrid& input, const std::filesystem::path& dir,
                           bool debug);

}  // namespace rose2
