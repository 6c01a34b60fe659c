#pragma once

// Room matching and overlap metrics between a segmentation and ground truth.
// Label 0 is unlabeled and never counted.

#include "rose2/gridmap.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <vector>

namespace rose2 {

/// Cell counts of every (segmented id, gt id) pair; 0 rows/cols hold the
/// cells labeled on one side only.
struct Contingency {
  std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> overlap;
  std::map<std::int32_t, std::int64_t> segmented_area;
  std::map<std::int32_t, std::int64_t> gt_area;
};

/// Throws InputError when dimensions differ.
Contingency contingency(const LabelGrid& segmented, const LabelGrid& gt);

/// Segmented id -> gt id of maximum overlap (ties to the lower gt id); 0
/// when the room overlaps no gt room.
std::map<std::int32_t, std::int32_t> match_rooms(const LabelGrid& segmented, const LabelGrid& gt);
std::map<std::int32_t, std::int32_t> match_rooms(const Contingency& table);

/// 100 |a ∩ b| / |a ∪ b| over nonzero cells; 0 when the union is empty.
double iou(const Raster<std::uint8_t>& a, const Raster<std::uint8_t>& b);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

/// Unweighted means in [0, 100]: precision over segmented rooms, recall over
/// gt rooms.
PrecisionRecall precision_recall(const Contingency& table, const std::map<std::int32_t, std::int32_t>& mapping);

struct RoomMatch {
  std::int32_t room = 0;
  std::int32_t gt = 0;
  std::int64_t intersection = 0;
  std::int64_t union_cells = 0;
  double iou = 0.0;
  double precision = 0.0;
};

struct MatchReport {
  std::vector<RoomMatch> rooms;
  std::map<std::int32_t, double> gt_recall;
  double precision = 0.0;
  double recall = 0.0;
  double mean_iou = 0.0;
  /// Area-weighted precision over all segmented cells.
  double weighted_precision = 0.0;
  int segmented_rooms = 0;
  int gt_rooms = 0;
};

MatchReport evaluate(const LabelGrid& segmented, const LabelGrid& gt);

nlohmann::json to_json(const MatchReport& report);

}  // namespace rose2
