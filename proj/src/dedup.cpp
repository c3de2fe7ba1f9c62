#include "atelier/dedup.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <numeric>
#include <unordered_map>

#include "atelier/csv.hpp"
#include "atelier/error.hpp"

namespace atelier {

namespace {

constexpr int kCols = 9;
constexpr int kRows = 8;

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

// Per-cell weights for every source coordinate on one axis.
std::vector<std::vector<std::pair<int, std::uint64_t>>> axis_weights(int extent, int cells) {
    std::vector<std::vector<std::pair<int, std::uint64_t>>> out(static_cast<std::size_t>(extent));
    for (int k = 0; k < extent; ++k) {
        const long long lo = static_cast<long long>(k) * cells;
        const long long hi = lo + cells;
        const int first = static_cast<int>(lo / extent);
        const int last = static_cast<int>(std::min<long long>((hi - 1) / extent, cells - 1));
        for (int c = first; c <= last; ++c) {
            const long long cell_lo = static_cast<long long>(c) * extent;
            const long long cell_hi = cell_lo + extent;
            const long long overlap = std::min(hi, cell_hi) - std::max(lo, cell_lo);
            if (overlap > 0) out[static_cast<std::size_t>(k)].emplace_back(c, static_cast<std::uint64_t>(overlap));
        }
    }
    return out;
}

}  // namespace

std::uint64_t perceptual_hash(const GrayImage& image) {
    if (image.width <= 0 || image.height <= 0 ||
        image.pixels.size() != static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height)) {
        throw Error(ErrorCode::undecodable_image, "image has no pixels");
    }
    const auto wx = axis_weights(image.width, kCols);
    const auto wy = axis_weights(image.height, kRows);

    std::array<std::array<std::uint64_t, kCols>, kRows> cell{};
    std::array<std::uint64_t, kCols> row_sum{};
    for (int y = 0; y < image.height; ++y) {
        row_sum.fill(0);
        for (int x = 0; x < image.width; ++x) {
            const std::uint64_t p = image.at(x, y);
            for (const auto& [c, w] : wx[static_cast<std::size_t>(x)]) row_sum[static_cast<std::size_t>(c)] += w * p;
        }
        for (const auto& [r, w] : wy[static_cast<std::size_t>(y)]) {
            for (int c = 0; c < kCols; ++c) {
                cell[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] += w * row_sum[static_cast<std::size_t>(c)];
            }
        }
    }

    std::uint64_t hash = 0;
    for (int i = 0; i < kRows; ++i) {
        for (int j = 0; j < 8; ++j) {
            const auto& row = cell[static_cast<std::size_t>(i)];
            if (row[static_cast<std::size_t>(j)] > row[static_cast<std::size_t>(j + 1)]) {
                hash |= std::uint64_t{1} << (i * 8 + j);
            }
        }
    }
    return hash;
}

int hamming_distance(std::uint64_t a, std::uint64_t b) noexcept { return std::popcount(a ^ b); }

std::vector<DuplicateCluster> find_duplicates(std::span<const HashEntry> entries, int threshold) {
    threshold = std::clamp(threshold, 0, 64);
    const std::size_t n = entries.size();
    {
        std::unordered_map<std::string_view, int> seen;
        for (const auto& e : entries) {
            if (++seen[e.id] > 1) throw Error(ErrorCode::duplicate_id, "hash entry id repeats: " + e.id);
        }
    }

    UnionFind uf(n);
    auto link = [&](std::size_t a, std::size_t b) {
        if (uf.find(a) == uf.find(b)) return;
        if (hamming_distance(entries[a].phash, entries[b].phash) <= threshold) uf.unite(a, b);
    };

    if (threshold >= 16) {
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) link(a, b);
        }
    } else {
        // Pigeonhole: split the 64 bits into threshold + 1 disjoint chunks.
        // Two hashes within threshold bits agree exactly on at least one
        // chunk, so only entries sharing a chunk value need comparing.
        const int chunks = threshold + 1;
        for (int k = 0; k < chunks; ++k) {
            const int lo = k * 64 / chunks;
            const int hi = (k + 1) * 64 / chunks;
            const std::uint64_t mask = (hi - lo == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << (hi - lo)) - 1);
            std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
            for (std::size_t i = 0; i < n; ++i) buckets[(entries[i].phash >> lo) & mask].push_back(i);
            for (const auto& [_, members] : buckets) {
                for (std::size_t a = 0; a < members.size(); ++a) {
                    for (std::size_t b = a + 1; b < members.size(); ++b) link(members[a], members[b]);
                }
            }
        }
    }

    std::map<std::size_t, DuplicateCluster> by_root;
    for (std::size_t i = 0; i < n; ++i) by_root[uf.find(i)].member_ids.push_back(entries[i].id);
    std::vector<DuplicateCluster> out;
    out.reserve(by_root.size());
    for (auto& [_, cluster] : by_root) {
        std::sort(cluster.member_ids.begin(), cluster.member_ids.end());
        out.push_back(std::move(cluster));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.member_ids.front() < b.member_ids.front(); });
    return out;
}

std::size_t filled_field_count(const ArtworkRecord& r) {
    std::size_t n = 0;
    n += !r.title.empty();
    n += !r.artist.empty();
    n += r.year_min.has_value();
    n += r.year_max.has_value();
    n += !r.location_name.empty();
    n += r.location_type != LocationType::unknown;
    n += r.latitude.has_value();
    n += r.longitude.has_value();
    n += !r.source_url.empty();
    n += !r.copyright.empty();
    n += !r.image_path.empty();
    return n;
}

std::vector<DuplicateCluster> select_survivors(std::vector<DuplicateCluster> clusters,
                                               std::span<const ArtworkRecord> records) {
    std::unordered_map<std::string_view, const ArtworkRecord*> by_id;
    for (const auto& r : records) by_id.emplace(r.id, &r);

    for (auto& cluster : clusters) {
        const ArtworkRecord* best = nullptr;
        std::size_t best_fields = 0;
        for (const auto& id : cluster.member_ids) {
            auto it = by_id.find(id);
            if (it == by_id.end()) throw Error(ErrorCode::unknown_member_id, "no record for cluster member '" + id + "'");
            const ArtworkRecord* r = it->second;
            const std::size_t fields = filled_field_count(*r);
            const bool better = !best || fields > best_fields ||
                                (fields == best_fields && (source_priority(r->source) < source_priority(best->source) ||
                                                           (r->source == best->source && r->id < best->id)));
            if (better) {
                best = r;
                best_fields = fields;
            }
        }
        if (best) cluster.survivor_id = best->id;
    }
    return clusters;
}

std::vector<DedupReportRow> dedup_report(std::span<const DuplicateCluster> clusters, std::span<const HashEntry> entries) {
    std::unordered_map<std::string_view, std::uint64_t> hash_of;
    for (const auto& e : entries) hash_of.emplace(e.id, e.phash);
    std::vector<DedupReportRow> out;
    for (const auto& c : clusters) {
        if (!c.survivor_id) continue;
        const auto survivor_hash = hash_of.at(*c.survivor_id);
        for (const auto& id : c.member_ids) {
            if (id == *c.survivor_id) continue;
            out.push_back({*c.survivor_id, id, hamming_distance(survivor_hash, hash_of.at(id))});
        }
    }
    return out;
}

std::string serialize_dedup_report(std::span<const DedupReportRow> rows) {
    std::string out;
    csv::append_row(out, {"survivor_id", "removed_id", "distance_bits"});
    for (const auto& r : rows) csv::append_row(out, {r.survivor_id, r.removed_id, std::to_string(r.distance_bits)});
    return out;
}

}  // namespace atelier
