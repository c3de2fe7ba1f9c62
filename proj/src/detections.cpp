#include "atelier/detections.hpp"

#include <algorithm>
#include <unordered_map>

#include "atelier/csv.hpp"
#include "atelier/text.hpp"

namespace atelier {

std::string normalize_label(std::string_view raw) {
    std::string out;
    bool pending = false;
    for (char c : text::trim(raw)) {
        if (text::is_space(c) || c == '/') {
            pending = true;
            continue;
        }
        if (pending) out += '_';
        pending = false;
        out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    }
    return out;
}

DetectionParseResult parse_detections_csv(std::string_view content) {
    const auto rows = csv::parse_utf8(content);
    if (rows.empty()) throw Error(ErrorCode::missing_header, "missing column: image_id (empty document)");
    const csv::Header h(rows.front(), kDetectionColumns);

    DetectionParseResult out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != h.width()) {
            out.issues.push_back({row.number, "",
                                  "expected " + std::to_string(h.width()) + " fields, found " +
                                      std::to_string(row.fields.size())});
            continue;
        }
        const std::size_t before = out.issues.size();
        auto number = [&](std::string_view col) {
            const std::string& v = h.get(row, col);
            auto parsed = text::parse_double(v);
            if (!parsed) out.issues.push_back({row.number, std::string(col), "not a decimal number: '" + v + "'"});
            return parsed.value_or(0.0);
        };
        DetectionRecord d;
        d.image_id = h.get(row, "image_id");
        d.raw_label = h.get(row, "raw_label");
        d.label = normalize_label(d.raw_label);
        d.confidence = number("confidence");
        d.box = {number("ymin"), number("xmin"), number("ymax"), number("xmax")};
        if (out.issues.size() != before) continue;

        if (d.image_id.empty()) out.issues.push_back({row.number, "image_id", "empty"});
        if (d.label.empty()) out.issues.push_back({row.number, "raw_label", "empty"});
        if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
            out.issues.push_back({row.number, "confidence", "outside [0, 1]: " + h.get(row, "confidence")});
        }
        if (!d.box.valid()) {
            out.issues.push_back({row.number, "box", "requires 0 <= ymin < ymax <= 1 and 0 <= xmin < xmax <= 1"});
        }
        if (out.issues.size() != before) continue;
        out.records.push_back(std::move(d));
    }
    return out;
}

std::string serialize_detections_csv(std::span<const DetectionRecord> records) {
    std::string out;
    std::vector<std::string> cells(kDetectionColumns.begin(), kDetectionColumns.end());
    csv::append_row(out, cells);
    for (const auto& d : records) {
        cells = {d.image_id,
                 d.raw_label,
                 text::format_double(d.confidence),
                 text::format_double(d.box.ymin),
                 text::format_double(d.box.xmin),
                 text::format_double(d.box.ymax),
                 text::format_double(d.box.xmax)};
        csv::append_row(out, cells);
    }
    return out;
}

std::vector<DetectionRecord> filter_detections(std::span<const DetectionRecord> records,
                                               const DetectionFilterConfig& config) {
    config.validate();

    // Group positions per image in first-appearance order of the input,
    // counting rows that are dropped below.
    std::vector<std::vector<std::size_t>> groups;
    std::unordered_map<std::string_view, std::size_t> group_of;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& d = records[i];
        auto [it, inserted] = group_of.try_emplace(d.image_id, groups.size());
        if (inserted) groups.emplace_back();
        if (d.confidence < config.min_confidence) continue;
        if (!config.label_blocklist.empty() && config.label_blocklist.contains(d.label)) continue;
        groups[it->second].push_back(i);
    }

    std::vector<DetectionRecord> out;
    const auto limit = static_cast<std::size_t>(config.max_per_image);
    for (auto& group : groups) {
        // Stable on input position, so ties never need the label tiebreak.
        std::stable_sort(group.begin(), group.end(),
                         [&](std::size_t a, std::size_t b) { return records[a].confidence > records[b].confidence; });
        if (group.size() > limit) group.resize(limit);
        for (std::size_t i : group) out.push_back(records[i]);
    }
    return out;
}

}  // namespace atelier
