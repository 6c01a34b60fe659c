#pragma once

// Command-line front end: segment, evaluate, batch and synth.
// Exit codes: 0 success, 1 malformed input, 2 pipeline failure.

#include "rose2/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rose2 {

inline constexpr const char* kMethods[] = {"rose2", "morph", "dist", "voronoi"};

/// Segmentation by one of kMethods; unknown names raise InputError.
LabelGrid segment_by_method(const std::string& method, const OccupancyGrid& grid, const Config& config);

struct BatchEntry {
  std::string name;
  std::filesystem::path map;  // metadata sidecar
  std::filesystem::path gt;
};

struct BatchManifest {
  std::vector<BatchEntry> maps;
  std::vector<std::string> methods;
};

/// JSON: {"methods": [...], "maps": [{"name", "map", "gt"}]}. Relative paths
/// resolve against the manifest directory; methods default to all four.
BatchManifest load_manifest(const std::filesystem::path& path);

/// Per-map rows in manifest order (methods in manifest order within a map),
/// then one `mean (stddev)` row per method over its successful maps.
std::string run_batch(const BatchManifest& manifest, const Config& config, int threads);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rose2
