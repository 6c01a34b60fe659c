#include "rose2/report.hpp"

#include "rose2/format.hpp"
#include "rose2/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rose2 {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string svg_header(const OccupancyGrid& grid) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << grid.width() << "\" height=\"" << grid.height()
      << "\" viewBox=\"0 0 " << grid.width() << ' ' << grid.height() << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << grid.width() << "\" height=\"" << grid.height()
      << "\" fill=\"white\" stroke=\"gray\"/>\n";
  return out.str();
}

std::string hex(const std::array<std::uint8_t, 3>& rgb) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

void svg_line(std::ostringstream& out, const Vec2& a, const Vec2& b, const std::string& color, double width) {
  out << "<line x1=\"" << format_double(a.x()) << "\" y1=\"" << format_double(a.y()) << "\" x2=\""
      << format_double(b.x()) << "\" y2=\"" << format_double(b.y()) << "\" stroke=\"" << color
      << "\" stroke-width=\"" << format_double(width) << "\"/>\n";
}

void svg_polygon(std::ostringstream& out, const Polygon& poly, const std::string& stroke, const std::string& fill) {
  out << "<polygon points=\"";
  for (std::size_t i = 0; i < poly.size(); ++i) {
    out << (i ? " " : "") << format_double(poly[i].x()) << ',' << format_double(poly[i].y());
  }
  out << "\" stroke=\"" << stroke << "\" fill=\"" << fill << "\" fill-opacity=\"0.25\"/>\n";
}

json points_json(const Polygon& loop) {
  json out = json::array();
  for (const Vec2& p : loop) out.push_back({p.x(), p.y()});
  return out;
}

}  // namespace

Vec2 to_meters(const Vec2& p, const OccupancyGrid& grid) {
  const double res = grid.resolution();
  return {grid.origin().x() + p.x() * res, grid.origin().y() + (grid.height() - p.y()) * res};
}

std::string lines_svg(const OccupancyGrid& grid, std::span<const RepresentativeLine> lines, const FloorPlan* plan) {
  std::ostringstream out;
  out << svg_header(grid);
  if (plan) {
    for (const Room& room : plan->rooms) {
      for (const Polygon& loop : room.boundary) svg_polygon(out, loop, "black", hex(room_color(room.id)));
    }
  }
  for (const RepresentativeLine& line : lines) svg_line(out, line.chord_a, line.chord_b, "#1f4fd0", 1.0);
  out << "</svg>\n";
  return out.str();
}

json floorplan_json(const FloorPlan& plan, const OccupancyGrid& grid) {
  json rooms = json::array();
  for (const Room& room : plan.rooms) {
    json cells = json::array(), meters = json::array();
    for (const Polygon& loop : room.boundary) {
      cells.push_back(points_json(loop));
      Polygon m;
      for (const Vec2& p : loop) m.push_back(to_meters(p, grid));
      meters.push_back(points_json(m));
    }
    const double res = grid.resolution();
    rooms.push_back({{"id", room.id},
                     {"area_cells", room.area()},
                     {"area_m2", room.area() * res * res},
                     {"faces", room.faces},
                     {"boundary_cells", cells},
                     {"boundary_m", meters}});
  }
  return {{"resolution", grid.resolution()},
          {"width", grid.width()},
          {"height", grid.height()},
          {"rooms", rooms},
          {"warnings", plan.warnings}};
}

json timing_json(std::span<const StageTiming> timings) {
  json stages = json::object();
  double total = 0.0;
  for (const StageTiming& t : timings) {
    stages[t.stage] = t.seconds;
    total += t.seconds;
  }
  return {{"stages", stages}, {"total", total}};
}

std::string segments_svg(const OccupancyGrid& grid, const WallResult& walls) {
  std::ostringstream out;
  out << svg_header(grid);
  for (const LineSegment& s : walls.segments) svg_line(out, s.a(), s.b(), "#bbbbbb", 0.5);
  for (std::size_t k = 0; k < walls.clusters.size(); ++k) {
    const std::string color = hex(room_color(static_cast<std::int32_t>(k) + 1));
    for (const LineSegment& s : walls.clusters[k].segments) svg_line(out, s.a(), s.b(), color, 1.5);
  }
  out << "</svg>\n";
  return out.str();
}

json arrangement_json(const Arrangement& arrangement) {
  json faces = json::array(), edges = json::array();
  for (const Face& f : arrangement.faces) {
    faces.push_back({{"id", f.id}, {"area", f.area}, {"polygon", points_json(f.polygon)}, {"edges", f.edges}});
  }
  for (const ArrEdge& e : arrangement.edges) {
    edges.push_back({{"id", e.id},
                     {"a", {e.a.x(), e.a.y()}},
                     {"b", {e.b.x(), e.b.y()}},
                     {"faces", {e.face_left, e.face_right}},
                     {"line", e.line},
                     {"chord", e.chord},
                     {"weight", e.weight},
                     {"retained", e.retained}});
  }
  return {{"faces", faces}, {"edges", edges}};
}

std::string arrangement_svg(const OccupancyGrid& grid, const Arrangement& arrangement) {
  std::ostringstream out;
  out << svg_header(grid);
  for (const ArrEdge& e : arrangement.edges) {
    const double w = std::clamp(e.weight, 0.0, 1.0);
    const auto level = [](double t) { return static_cast<std::uint8_t>(std::lround(255.0 * t)); };
    svg_line(out, e.a, e.b, hex({level(1.0 - w), 0, level(w)}), 1.0);
  }
  out << "</svg>\n";
  return out.str();
}

json graph_json(const TopoGraph& graph) {
  json nodes = json::array(), edges = json::array();
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    nodes.push_back({graph.nodes[i].col, graph.nodes[i].row, graph.clearance[i]});
  }
  for (const auto& [a, b] : graph.edges) edges.push_back({a, b});
  return {{"width", graph.width}, {"height", graph.height}, {"nodes", nodes}, {"edges", edges}};
}

std::string histogram_csv(const DirectionHistogram& histogram) {
  std::ostringstream out;
  out << "bin,angle_deg,amplitude\n";
  for (std::size_t i = 0; i < histogram.amplitude.size(); ++i) {
    out << i << ',' << format_double(histogram.bin_center(static_cast<int>(i)) * 180.0 / std::numbers::pi) << ','
        << format_double(histogram.amplitude[i]) << '\n';
  }
  return out.str();
}

Raster<std::uint8_t> spectrum_image(const Spectrum& spectrum) {
  const Raster<double> logmag = (spectrum.bins.abs() + 1.0).log();
  const double hi = logmag.size() ? logmag.maxCoeff() : 0.0;
  if (hi <= 0.0) return Raster<std::uint8_t>::Zero(logmag.rows(), logmag.cols());
  return (logmag * (255.0 / hi)).round().cast<std::uint8_t>();
}

std::string spectrum_csv(const Spectrum& spectrum) {
  std::ostringstream out;
  for (Eigen::Index r = 0; r < spectrum.bins.rows(); ++r) {
    for (Eigen::Index c = 0; c < spectrum.bins.cols(); ++c) {
      out << (c ? "," : "") << format_double(std::abs(spectrum.bins(r, c)));
    }
    out << '\n';
  }
  return out.str();
}

void write_segment_outputs(const PipelineResult& result, const OccupancyGrid& input, const fs::path& dir,
                           bool debug) {
  fs::create_directories(dir);
  save_map(result.clean.grid, dir / "clean_map.yaml");
  io::write_text_atomic(dir / "lines.svg", lines_svg(input, result.arrangement.lines, &result.floorplan));
  io::write_text_atomic(dir / "floorplan.json", floorplan_json(result.floorplan, input).dump(2) + "\n");
  save_labels(result.segmented, dir / "segmented.png");
  io::write_text_atomic(dir / "timing.json", timing_json(result.timings).dump(2) + "\n");
  if (!debug) return;

  const fs::path dbg = dir / "debug";
  fs::create_directories(dbg);
  io::write_gray_png(spectrum_image(result.rose.spectrum), dbg / "spectrum.png");
  io::write_text_atomic(dbg / "spectrum.csv", spectrum_csv(result.rose.spectrum));
  io::write_text_atomic(dbg / "histogram.csv", histogram_csv(result.rose.histogram));
  io::write_text_atomic(dbg / "segments.svg", segments_svg(input, result.walls));
  io::write_text_atomic(dbg / "arrangement_full.json", arrangement_json(result.full_arrangement).dump() + "\n");
  io::write_text_atomic(dbg / "arrangement_full.svg", arrangement_svg(input, result.full_arrangement));
  io::write_text_atomic(dbg / "arrangement.json", arrangement_json(result.arrangement).dump() + "\n");
  io::write_text_atomic(dbg / "arrangement.svg", arrangement_svg(input, result.arrangement));
  io::write_text_atomic(dbg / "graph.json", graph_json(result.graph).dump() + "\n");

  std::vector<Polygon> outlines;
  for (const Room& room : result.floorplan.rooms) {
    outlines.insert(outlines.end(), room.boundary.begin(), room.boundary.end());
  }
  Raster<std::uint8_t> overlay = render_rgb(result.clean.grid, nullptr, outlines);
  for (const CellIndex& n : result.graph.nodes) {
    overlay(n.row, 3 * n.col) = 0;
    overlay(n.row, 3 * n.col + 1) = 160;
    overlay(n.row, 3 * n.col + 2) = 0;
  }
  io::write_rgb_png(overlay, dbg / "skeleton.png");
}

}  // namespace rose2
