#include "rose2/pipeline.hpp"

#include <algorithm>
#include <chrono>

namespace rose2 {

namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& out) : out_(out), start_(std::chrono::steady_clock::now()) {}

  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    out_.push_back({stage, std::chrono::duration<double>(now - start_).count()});
    start_ = now;
  }

 private:
  std::vector<StageTiming>& out_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

FloorPlan build_floorplan(const Arrangement& arrangement, const OccupancyGrid& grid, const RoomParams& params) {
  std::vector<char> exterior = exterior_faces(arrangement);
  const std::vector<std::int64_t> free_cells = face_free_cells(arrangement, grid);
  for (const Face& f : arrangement.faces) {
    const auto i = static_cast<std::size_t>(f.id);
    if (static_cast<double>(free_cells[i]) < params.min_face_free_fraction * f.area) exterior[i] = 1;
  }
  const double min_cells = params.min_room_area_m2 / (grid.resolution() * grid.resolution());
  FloorPlan plan;
  for (const auto& cluster : cluster_faces(arrangement, exterior, params.wall_weight_threshold)) {
    Room room = merge_faces(cluster, arrangement);
    if (static_cast<double>(room_cells(room, grid).count()) < min_cells) continue;
    plan.rooms.push_back(std::move(room));
  }
  if (plan.rooms.empty()) {
    // Keep the partition total: the whole box becomes one room.
    Room whole;
    const BoundingBox& b = arrangement.bbox;
    whole.pieces.push_back({b.lo, Vec2(b.hi.x(), b.lo.y()), b.hi, Vec2(b.lo.x(), b.hi.y())});
    whole.face_of_piece.push_back(-1);
    plan.rooms.push_back(std::move(whole));
    plan.warnings.push_back("no room with enough free space; using the whole map");
  }
  plan.normalize();
  return plan;
}

PipelineResult run_pipeline(const OccupancyGrid& grid, const PipelineConfig& config) {
  PipelineResult out;
  StageClock clock(out.timings);

  out.rose = analyze_structure(grid, config.rose);
  out.clean = auto_threshold(grid, out.rose.scores, hough_segment_counter(config.walls.hough),
                             RatioInterval{config.rose.ratio_low, config.rose.ratio_high});
  clock.lap("rose");

  out.walls = detect_walls(out.clean.grid, out.rose.directions, config.walls);
  if (out.walls.lines.empty()) throw PipelineError("walls", "no wall lines detected");
  clock.lap("walls");

  const BoundingBox bbox = BoundingBox::of(grid);
  const double band = 0.5 * config.walls.doorway_width_m / grid.resolution();
  out.full_arrangement = build_arrangement(out.walls.lines, bbox);
  compute_weights(out.full_arrangement, out.walls.clusters, band);
  const LineFilterResult filtered = filter_lines(out.full_arrangement, config.arrangement.min_total_coverage,
                                                 config.arrangement.keep_edge_coverage);
  out.arrangement = refine_arrangement(filtered, bbox, out.walls.clusters, band);
  clock.lap("arrangement");

  FloorPlan plan = build_floorplan(out.arrangement, out.clean.grid, config.rooms);
  clock.lap("rooms");

  out.graph = voronoi_graph(out.clean.grid, config.topology);
  out.floorplan = split_disconnected(plan, out.clean.grid, out.graph, out.arrangement.lines, out.rose.directions,
                                     config.rooms);
  out.segmented = segment_map(grid, out.floorplan);
  // A split can leave a piece with no observed Free cell (all clutter or
  // Unknown on the input map). Such rooms would break the id range.
  std::vector<std::int64_t> cells(out.floorplan.rooms.size() + 1, 0);
  for (Eigen::Index i = 0; i < out.segmented.size(); ++i) ++cells[static_cast<std::size_t>(out.segmented.data()[i])];
  const auto empty = [&](const Room& r) { return cells[static_cast<std::size_t>(r.id)] == 0; };
  if (out.floorplan.rooms.size() > 1 && std::any_of(out.floorplan.rooms.begin(), out.floorplan.rooms.end(), empty)) {
    std::erase_if(out.floorplan.rooms, empty);
    out.floorplan.normalize();
    out.segmented = segment_map(grid, out.floorplan);
  }
  clock.lap("topology");
  return out;
}

}  // namespace rose2
