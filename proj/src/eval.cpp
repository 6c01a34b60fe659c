#include "rose2/eval.hpp"

#include <algorithm>

namespace rose2 {

Contingency contingency(const LabelGrid& segmented, const LabelGrid& gt) {
  if (segmented.rows() != gt.rows() || segmented.cols() != gt.cols()) {
    throw InputError("label grids differ in size");
  }
  Contingency t;
  for (Eigen::Index i = 0; i < segmented.size(); ++i) {
    const std::int32_t s = segmented.data()[i], g = gt.data()[i];
    if (s == 0 && g == 0) continue;
    ++t.overlap[{s, g}];
    if (s != 0) ++t.segmented_area[s];
    if (g != 0) ++t.gt_area[g];
  }
  return t;
}

std::map<std::int32_t, std::int32_t> match_rooms(const Contingency& table) {
  std::map<std::int32_t, std::int32_t> mapping;
  std::map<std::int32_t, std::int64_t> best;
  for (const auto& [s, area] : table.segmented_area) {
    mapping[s] = 0;
    best[s] = 0;
  }
  // Keys ascend by (s, g), so a strict improvement keeps the lower gt id on ties.
  for (const auto& [key, count] : table.overlap) {
    const auto [s, g] = key;
    if (s == 0 || g == 0) continue;
    if (count > best[s]) {
      best[s] = count;
      mapping[s] = g;
    }
  }
  return mapping;
}

std::map<std::int32_t, std::int32_t> match_rooms(const LabelGrid& segmented, const LabelGrid& gt) {
  return match_rooms(contingency(segmented, gt));
}

double iou(const Raster<std::uint8_t>& a, const Raster<std::uint8_t>& b) {
  std::int64_t inter = 0, uni = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const bool x = a.data()[i] != 0, y = b.data()[i] != 0;
    inter += x && y;
    uni += x || y;
  }
  return uni == 0 ? 0.0 : 100.0 * static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

std::int64_t overlap_of(const Contingency& t, std::int32_t s, std::int32_t g) {
  auto it = t.overlap.find({s, g});
  return it == t.overlap.end() ? 0 : it->second;
}

std::map<std::int32_t, std::int64_t> best_gt_overlap(const Contingency& t) {
  std::map<std::int32_t, std::int64_t> best;
  for (const auto& [g, area] : t.gt_area) best[g] = 0;
  for (const auto& [key, count] : t.overlap) {
    if (key.first != 0 && key.second != 0) best[key.second] = std::max(best[key.second], count);
  }
  return best;
}

}  // namespace

PrecisionRecall precision_recall(const Contingency& table, const std::map<std::int32_t, std::int32_t>& mapping) {
  PrecisionRecall pr;
  for (const auto& [s, area] : table.segmented_area) {
    auto it = mapping.find(s);
    const std::int32_t g = it == mapping.end() ? 0 : it->second;
    if (g != 0) pr.precision += 100.0 * static_cast<double>(overlap_of(table, s, g)) / static_cast<double>(area);
  }
  if (!table.segmented_area.empty()) pr.precision /= static_cast<double>(table.segmented_area.size());
  for (const auto& [g, best] : best_gt_overlap(table)) {
    pr.recall += 100.0 * static_cast<double>(best) / static_cast<double>(table.gt_area.at(g));
  }
  if (!table.gt_area.empty()) pr.recall /= static_cast<double>(table.gt_area.size());
  return pr;
}

MatchReport evaluate(const LabelGrid& segmented, const LabelGrid& gt) {
  const Contingency table = contingency(segmented, gt);
  const auto mapping = match_rooms(table);
  MatchReport report;
  std::int64_t matched_cells = 0, segmented_cells = 0;
  for (const auto& [s, area] : table.segmented_area) {
    RoomMatch m;
    m.room = s;
    m.gt = mapping.at(s);
    if (m.gt != 0) {
      m.intersection = overlap_of(table, s, m.gt);
      m.union_cells = area + table.gt_area.at(m.gt) - m.intersection;
      m.iou = 100.0 * static_cast<double>(m.intersection) / static_cast<double>(m.union_cells);
      m.precision = 100.0 * static_cast<double>(m.intersection) / static_cast<double>(area);
    } else {
      m.union_cells = area;
    }
    matched_cells += m.intersection;
    segmented_cells += area;
    report.mean_iou += m.iou;
    report.rooms.push_back(m);
  }
  for (const auto& [g, best] : best_gt_overlap(table)) {
    report.gt_recall[g] = 100.0 * static_cast<double>(best) / static_cast<double>(table.gt_area.at(g));
  }
  const PrecisionRecall pr = precision_recall(table, mapping);
  report.precision = pr.precision;
  report.recall = pr.recall;
  report.segmented_rooms = static_cast<int>(table.segmented_area.size());
  report.gt_rooms = static_cast<int>(table.gt_area.size());
  if (!report.rooms.empty()) report.mean_iou /= static_cast<double>(report.rooms.size());
  if (segmented_cells > 0) {
    report.weighted_precision = 100.0 * static_cast<double>(matched_cells) / static_cast<double>(segmented_cells);
  }
  return report;
}

nlohmann::json to_json(const MatchReport& report) {
  nlohmann::json rooms = nlohmann::json::array();
  for (const RoomMatch& m : report.rooms) {
    rooms.push_back({{"room", m.room},
                     {"gt", m.gt},
                     {"intersection", m.intersection},
                     {"union", m.union_cells},
                     {"iou", m.iou},
                     {"precision", m.precision}});
  }
  nlohmann::json gt = nlohmann::json::array();
  for (const auto& [g, recall] : report.gt_recall) gt.push_back({{"gt", g}, {"recall", recall}});
  return {{"rooms", rooms},
          {"gt_rooms", gt},
          {"map",
           {{"precision", report.precision},
            {"recall", report.recall},
            {"mean_iou", report.mean_iou},
            {"weighted_precision", report.weighted_precision},
            {"segmented_room_count", report.segmented_rooms},
            {"gt_room_count", report.gt_rooms}}}};
}

}  // namespace rose2
