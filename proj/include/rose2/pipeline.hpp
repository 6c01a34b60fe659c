#pragma once

// End-to-end structure extraction and room segmentation.

#include "rose2/rooms.hpp"

#include <string>
#include <vector>

namespace rose2 {

struct ArrangementParams {
  double min_total_coverage = 0.1;
  double keep_edge_coverage = 0.8;
};

struct PipelineConfig {
  RoseParams rose;
  WallParams walls;
  ArrangementParams arrangement;
  RoomParams rooms;
  TopologyParams topology;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineResult {
  RoseResult rose;
  CleanMap clean;
  WallResult walls;
  Arrangement full_arrangement;
  Arrangement arrangement;
  FloorPlan floorplan;
  LabelGrid segmented;
  TopoGraph graph;
  std::vector<StageTiming> timings;
};

/// rose -> walls -> arrangement -> rooms -> topology split. Stage failures
/// surface as PipelineError carrying the stage name.
PipelineResult run_pipeline(const OccupancyGrid& grid, const PipelineConfig& config);

/// Floor plan before topological splitting: clustered faces, with exterior
/// and near-empty clusters dropped.
FloorPlan build_floorplan(const Arrangement& arrangement, const OccupancyGrid& grid, const RoomParams& params);

}  // namespace rose2
