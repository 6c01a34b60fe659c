#pragma once

// TOML-style key-value configuration. Every tunable is listed once in
// visit_config; the defaults are the struct initializers.

#include "rose2/baselines.hpp"
#include "rose2/pipeline.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace rose2 {

struct Config {
  PipelineConfig pipeline;
  BaselineParams baselines;
};

/// Calls `v(section, key, field)` for every tunable, in file order.
template <typename Visitor>
void visit_config(Config& c, Visitor&& v) {
  RoseParams& r = c.pipeline.rose;
  v("rose", "histogram_bins", r.histogram_bins);
  v("rose", "max_directions", r.max_directions);
  v("rose", "min_prominence", r.min_prominence);
  v("rose", "merge_radius_deg", r.merge_radius_deg);
  v("rose", "ridge_half_width_deg", r.ridge_half_width_deg);
  v("rose", "smoothing_half_width", r.smoothing_half_width);
  v("rose", "ratio_low", r.ratio_low);
  v("rose", "ratio_high", r.ratio_high);

  HoughParams& h = c.pipeline.walls.hough;
  v("hough", "rho_res", h.rho_res);
  v("hough", "theta_res_deg", h.theta_res_deg);
  v("hough", "votes", h.votes);
  v("hough", "min_len", h.min_len);
  v("hough", "max_gap", h.max_gap);
  v("hough", "seed", h.seed);

  WallParams& w = c.pipeline.walls;
  v("walls", "angular_eps_deg", w.angular_eps_deg);
  v("walls", "dbscan_eps", w.dbscan_eps);
  v("walls", "dbscan_min_pts", w.dbscan_min_pts);
  v("walls", "doorway_width_m", w.doorway_width_m);

  ArrangementParams& a = c.pipeline.arrangement;
  v("arrangement", "min_total_coverage", a.min_total_coverage);
  v("arrangement", "keep_edge_coverage", a.keep_edge_coverage);

  RoomParams& m = c.pipeline.rooms;
  v("rooms", "wall_weight_threshold", m.wall_weight_threshold);
  v("rooms", "min_face_free_fraction", m.min_face_free_fraction);
  v("rooms", "min_room_area_m2", m.min_room_area_m2);
  v("rooms", "min_component_nodes", m.min_component_nodes);
  v("rooms", "max_split_depth", m.max_split_depth);

  v("topology", "ridge_angle_deg", c.pipeline.topology.ridge_angle_deg);

  BaselineParams& b = c.baselines;
  v("baselines", "room_min_m2", b.room_min_m2);
  v("baselines", "room_max_m2", b.room_max_m2);
  v("baselines", "critical_radius_m", b.critical_radius_m);
  v("baselines", "critical_rise_m", b.critical_rise_m);
}

/// Unknown sections or keys and unparsable values raise InputError. Values
/// may be quoted; `#` starts a comment.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

/// Applies one `section.key=value` override.
void apply_override(Config& config, std::string_view assignment);

/// Full document with every key, suitable for parse_config.
std::string to_toml(const Config& config);

}  // namespace rose2
