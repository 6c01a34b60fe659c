#include "rose2/cli.hpp"

#include "rose2/eval.hpp"
#include "rose2/format.hpp"
#include "rose2/image_io.hpp"
#include "rose2/report.hpp"
#include "rose2/synth.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace rose2 {

namespace fs = std::filesystem;
using nlohmann::json;

LabelGrid segment_by_method(const std::string& method, const OccupancyGrid& grid, const Config& config) {
  if (method == "rose2") return run_pipeline(grid, config.pipeline).segmented;
  if (method == "morph") return morphological_segment(grid, config.baselines);
  if (method == "dist") return distance_segment(grid, config.baselines);
  if (method == "voronoi") return voronoi_segment(grid, config.baselines);
  throw InputError("unknown method " + method);
}

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

struct MethodOutcome {
  bool ok = false;
  std::string error;
  MatchReport report;
};

}  // namespace

BatchManifest load_manifest(const fs::path& path) {
  const json doc = read_json(path);
  const fs::path base = path.parent_path();
  BatchManifest manifest;
  try {
    if (doc.contains("methods")) {
      manifest.methods = doc.at("methods").get<std::vector<std::string>>();
    } else {
      manifest.methods.assign(std::begin(kMethods), std::end(kMethods));
    }
    for (const std::string& m : manifest.methods) {
      if (std::find(std::begin(kMethods), std::end(kMethods), m) == std::end(kMethods))
        throw InputError("manifest: unknown method " + m);
    }
    for (const json& entry : doc.value("maps", json::array())) {
      BatchEntry e;
      e.map = base / entry.at("map").get<std::string>();
      e.gt = base / entry.at("gt").get<std::string>();
      e.name = entry.value("name", e.map.stem().string());
      manifest.maps.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return manifest;
}

std::string run_batch(const BatchManifest& manifest, const Config& config, int threads) {
  const std::size_t n_maps = manifest.maps.size(), n_methods = manifest.methods.size();
  std::vector<std::vector<MethodOutcome>> results(n_maps, std::vector<MethodOutcome>(n_methods));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_maps; i = next++) {
      const BatchEntry& entry = manifest.maps[i];
      OccupancyGrid grid;
      LabelGrid gt;
      try {
        grid = load_map(entry.map);
        gt = load_labels(entry.gt);
      } catch (const std::exception& e) {
        for (auto& r : results[i]) r.error = e.what();
        continue;
      }
      for (std::size_t m = 0; m < n_methods; ++m) {
        try {
          results[i][m].report = evaluate(segment_by_method(manifest.methods[m], grid, config), gt);
          results[i][m].ok = true;
        } catch (const std::exception& e) {
          results[i][m].error = e.what();
        }
      }
    }
  };
  const int pool = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(n_maps, 1))));
  std::vector<std::thread> workers;
  for (int t = 1; t < pool; ++t) workers.emplace_back(worker);
  worker();
  for (auto& t : workers) t.join();

  std::ostringstream csv;
  csv << "map,method,status,precision,recall,iou,segmented_rooms,gt_rooms,error\n";
  for (std::size_t i = 0; i < n_maps; ++i) {
    for (std::size_t m = 0; m < n_methods; ++m) {
      const MethodOutcome& r = results[i][m];
      csv << csv_field(manifest.maps[i].name) << ',' << manifest.methods[m] << ',';
      if (r.ok) {
        csv << "ok," << fixed(r.report.precision, 4) << ',' << fixed(r.report.recall, 4) << ','
            << fixed(r.report.mean_iou, 4) << ',' << r.report.segmented_rooms << ',' << r.report.gt_rooms << ",\n";
      } else {
        csv << "failed,,,,,," << csv_field(r.error) << '\n';
      }
    }
  }
  if (n_maps == 0) return csv.str();
  for (std::size_t m = 0; m < n_methods; ++m) {
    std::vector<std::array<double, 3>> values;
    for (std::size_t i = 0; i < n_maps; ++i) {
      const MethodOutcome& r = results[i][m];
      if (r.ok) values.push_back({r.report.precision, r.report.recall, r.report.mean_iou});
    }
    csv << "ALL," << manifest.methods[m] << ",aggregate(n=" << values.size() << ')';
    for (int k = 0; k < 3; ++k) {
      double mean = 0.0, var = 0.0;
      for (const auto& v : values) mean += v[static_cast<std::size_t>(k)];
      if (!values.empty()) mean /= static_cast<double>(values.size());
      for (const auto& v : values) var += std::pow(v[static_cast<std::size_t>(k)] - mean, 2);
      const double sd = values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
      csv << ',' << csv_field(fixed(mean, 2) + " (" + fixed(sd, 2) + ")");
    }
    csv << ",,,\n";
  }
  return csv.str();
}

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  std::int64_t seed = -1;
};

Config effective_config(const CommonOptions& o) {
  Config config = o.config_path.empty() ? Config{} : load_config(o.config_path);
  for (const std::string& s : o.overrides) apply_override(config, s);
  if (o.seed >= 0) config.pipeline.walls.hough.seed = static_cast<std::uint64_t>(o.seed);
  return config;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "TOML-style config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.overrides, "Override one key, section.key=value (repeatable)");
  cmd->add_option("--seed", o.seed, "Random seed override")->check(CLI::NonNegativeNumber);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure extraction and room segmentation for 2D occupancy grid maps", "rose2"};
  app.require_subcommand(1);

  CommonOptions seg_opts;
  std::string seg_map;
  bool debug = false;
  CLI::App* seg = app.add_subcommand("segment", "Segment one map into rooms");
  seg->add_option("map", seg_map, "Map metadata sidecar (YAML)")->required();
  seg->add_option("--out", seg_opts.out, "Output directory")->required();
  seg->add_flag("--debug-dumps", debug, "Also write intermediate artifacts");
  add_common(seg, seg_opts);

  std::string ev_seg, ev_gt, ev_out;
  CLI::App* ev = app.add_subcommand("evaluate", "Compare a segmented label image with ground truth");
  ev->add_option("segmented", ev_seg, "Segmented indexed PNG")->required();
  ev->add_option("gt", ev_gt, "Ground-truth indexed PNG")->required();
  ev->add_option("--out", ev_out, "Metrics JSON path (stdout when omitted)");

  CommonOptions batch_opts;
  std::string manifest_path;
  int threads = 1;
  CLI::App* batch = app.add_subcommand("batch", "Run every method over a manifest and summarize as CSV");
  batch->add_option("manifest", manifest_path, "Manifest JSON")->required();
  batch->add_option("--out", batch_opts.out, "Output directory")->required();
  batch->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  add_common(batch, batch_opts);

  std::string spec_path, synth_out;
  std::int64_t synth_seed = -1;
  CLI::App* syn = app.add_subcommand("synth", "Generate a synthetic map with ground truth");
  syn->add_option("spec", spec_path, "SynthSpec JSON (defaults when omitted)");
  syn->add_option("--out", synth_out, "Output directory")->required();
  syn->add_option("--seed", synth_seed, "Seed override")->check(CLI::NonNegativeNumber);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*seg) {
      const Config config = effective_config(seg_opts);
      const OccupancyGrid grid = load_map(seg_map);
      const PipelineResult result = run_pipeline(grid, config.pipeline);
      write_segment_outputs(result, grid, seg_opts.out, debug);
      io::write_text_atomic(fs::path(seg_opts.out) / "config.toml", to_toml(config));
      for (const std::string& w : result.floorplan.warnings) err << "warning: " << w << '\n';
      out << result.floorplan.rooms.size() << " rooms\n";
    } else if (*ev) {
      const MatchReport report = evaluate(load_labels(ev_seg), load_labels(ev_gt));
      const std::string text = to_json(report).dump(2) + "\n";
      if (ev_out.empty()) {
        out << text;
      } else {
        io::write_text_atomic(ev_out, text);
      }
    } else if (*batch) {
      const Config config = effective_config(batch_opts);
      const BatchManifest manifest = load_manifest(manifest_path);
      fs::create_directories(batch_opts.out);
      io::write_text_atomic(fs::path(batch_opts.out) / "config.toml", to_toml(config));
      io::write_text_atomic(fs::path(batch_opts.out) / "summary.csv", run_batch(manifest, config, threads));
    } else if (*syn) {
      SynthSpec spec;
      if (!spec_path.empty()) {
        try {
          spec = read_json(spec_path).get<SynthSpec>();
        } catch (const json::exception& e) {
          throw InputError(spec_path + ": " + e.what());
        }
      }
      if (synth_seed >= 0) spec.seed = static_cast<std::uint64_t>(synth_seed);
      try {
        spec.validate();
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
      }
      save_synth(generate(spec), spec, synth_out);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const PipelineError& e) {
    err << "error: " << e.what() << '\n';  // what() starts with the stage name
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rose2
