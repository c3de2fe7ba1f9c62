#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atelier/error.hpp"
#include "atelier/model.hpp"

namespace atelier {

inline constexpr std::array<std::string_view, 7> kDetectionColumns = {"image_id", "raw_label", "confidence", "ymin",
                                                                      "xmin",     "ymax",      "xmax"};

// "Human face" -> "human_face", "Person/Man" -> "person_man".
std::string normalize_label(std::string_view raw);

struct DetectionParseResult {
    std::vector<DetectionRecord> records;
    std::vector<Issue> issues;
};

DetectionParseResult parse_detections_csv(std::string_view content);

std::string serialize_detections_csv(std::span<const DetectionRecord> records);

// Per image: drop blocklisted labels and anything under min_confidence, then
// keep the max_per_image most confident. Images appear in first-seen order;
// within an image, confidence descends and equal confidences keep input order.
std::vector<DetectionRecord> filter_detections(std::span<const DetectionRecord> records,
                                               const DetectionFilterConfig& config);

}  // namespace atelier
