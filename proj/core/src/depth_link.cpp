#include <spinetrack/depth_link.hpp>

#include <spinetrack/assign.hpp>
#include <spinetrack/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <unordered_map>

namespace spinetrack {

namespace {

std::string make_id(const std::string& prefix, long n) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06ld", n);
    return prefix + buf;
}

struct OpenIdentity {
    std::string object_id;
    std::vector<Detection2D> members;
    int last_z = 0;
};

// Groups detections by z after checking they share one (stack, timepoint).
std::map<int, std::vector<Detection2D>> group_by_slice(
    const std::vector<Detection2D>& detections) {
    std::map<int, std::vector<Detection2D>> by_z;
    for (const auto& d : detections) {
        d.validate();
        if (d.stack_id != detections.front().stack_id ||
            d.timepoint != detections.front().timepoint)
            throw Error("link_depth: detections span multiple stacks or timepoints");
        by_z[d.z].push_back(d);
    }
    for (auto& [z, dets] : by_z)
        std::sort(dets.begin(), dets.end(),
                  [](const Detection2D& a, const Detection2D& b) { return a.id < b.id; });
    return by_z;
}

double center_distance(const BBox& a, const BBox& b) {
    const double dx = a.center_x() - b.center_x();
    const double dy = a.center_y() - b.center_y();
    return std::sqrt(dx * dx + dy * dy);
}

double median_value(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double depth_cost(const Detection2D& i, const Detection2D& j, const SliceOffsets& offsets,
                  const TrackingConfig& cfg, const EmbeddingStore* embeddings) {
    if (i.stack_id != j.stack_id || i.timepoint != j.timepoint)
        throw Error("depth_cost: detections from different stacks or timepoints");
    if (j.z != i.z + 1) throw Error("depth_cost: detections not on adjacent slices");
    cfg.validate();

    const double sp = spatial_cost(offsets.aligned(i.bbox, i.z), offsets.aligned(j.bbox, j.z));
    double cost = cfg.lambda_sp * sp;
    if (cfg.lambda_app > 0 && embeddings != nullptr) {
        const auto* vi = embeddings->find(i.id);
        const auto* vj = embeddings->find(j.id);
        if (vi != nullptr && vj != nullptr) cost += cfg.lambda_app * appearance_cost(*vi, *vj);
    }
    return cost;
}

DepthLinkResult link_depth(const std::vector<Detection2D>& detections,
                           const SliceOffsets& offsets, const TrackingConfig& cfg,
                           const EmbeddingStore* embeddings, const std::string& id_prefix) {
    cfg.validate();
    DepthLinkResult result;
    if (detections.empty()) return result;

    const bool use_app = cfg.lambda_app > 0 && embeddings != nullptr && !embeddings->empty();
    result.stats.appearance_used = use_app;

    auto by_z = group_by_slice(detections);
    for (const auto& [z, dets] : by_z)
        for (const auto& d : dets)
            if (static_cast<int>(offsets.offsets.size()) <= d.z)
                throw Error("link_depth: slice offsets shorter than detection z range");

    std::vector<OpenIdentity> open;
    std::vector<OpenIdentity> closed;
    long next_id = 0;

    auto open_identity = [&](const Detection2D& d) {
        open.push_back({make_id(id_prefix, next_id++), {d}, d.z});
    };

    for (auto& [zt, dets] : by_z) {
        // Retire identities that can no longer be bridged.
        std::vector<OpenIdentity> still_open;
        for (auto& ident : open) {
            if (zt - ident.last_z > cfg.gap_bridge + 1)
                closed.push_back(std::move(ident));
            else
                still_open.push_back(std::move(ident));
        }
        open = std::move(still_open);

        if (open.empty()) {
            for (const auto& d : dets) open_identity(d);
            continue;
        }

        std::vector<std::string> row_ids, col_ids;
        std::unordered_map<std::string, size_t> row_index, col_index;
        for (size_t r = 0; r < open.size(); ++r) {
            row_ids.push_back(open[r].object_id);
            row_index[open[r].object_id] = r;
        }
        for (size_t c = 0; c < dets.size(); ++c) {
            col_ids.push_back(dets[c].id);
            col_index[dets[c].id] = c;
        }

        CostMatrix matrix(row_ids, col_ids);
        std::vector<double> app_costs(open.size() * dets.size(),
                                      std::numeric_limits<double>::quiet_NaN());
        std::vector<double> present;
        for (size_t r = 0; r < open.size(); ++r) {
            const Detection2D& di = open[r].members.back();
            const BBox bi = offsets.aligned(di.bbox, di.z);
            for (size_t c = 0; c < dets.size(); ++c) {
                const Detection2D& dj = dets[c];
                const BBox bj = offsets.aligned(dj.bbox, dj.z);
                if (center_distance(bi, bj) > cfg.center_gate_px) {
                    matrix.forbid(r, c);
                    continue;
                }
                matrix.cost(r, c) = cfg.lambda_sp * spatial_cost(bi, bj);
                if (use_app) {
                    const auto* vi = embeddings->find(di.id);
                    const auto* vj = embeddings->find(dj.id);
                    if (vi != nullptr && vj != nullptr) {
                        const double a = appearance_cost(*vi, *vj);
                        app_costs[r * dets.size() + c] = a;
                        present.push_back(a);
                    }
                }
            }
        }
        if (use_app && !present.empty()) {
            // Pairs with a missing embedding are priced at the median
            // appearance cost of this matrix.
            const double median_app = median_value(present);
            for (size_t r = 0; r < open.size(); ++r)
                for (size_t c = 0; c < dets.size(); ++c) {
                    if (matrix.is_forbidden(r, c)) continue;
                    double a = app_costs[r * dets.size() + c];
                    if (std::isnan(a)) {
                        a = median_app;
                        ++result.stats.missing_embedding_pairs;
                    }
                    matrix.cost(r, c) += cfg.lambda_app * a;
                }
        }

        const MatchResult match =
            solve_gated(matrix, cfg.match_threshold_depth, cfg.gate_mode);
        for (const auto& p : match.pairs) {
            OpenIdentity& ident = open[row_index.at(p.row_id)];
            ident.members.push_back(dets[col_index.at(p.col_id)]);
            ident.last_z = zt;
            ++result.stats.pairs_matched;
        }
        for (const auto& col : match.unmatched_cols)
            open_identity(dets[col_index.at(col)]);
    }

    for (auto& ident : open) closed.push_back(std::move(ident));
    std::sort(closed.begin(), closed.end(),
              [](const OpenIdentity& a, const OpenIdentity& b) { return a.object_id < b.object_id; });
    result.stats.identities_created = next_id;
    for (auto& ident : closed)
        result.objects.push_back(build_object(ident.object_id, std::move(ident.members), embeddings));
    return result;
}

DepthLinkResult link_depth_iom_baseline(const std::vector<Detection2D>& detections,
                                        double threshold, const std::string& id_prefix) {
    DepthLinkResult result;
    if (detections.empty()) return result;

    auto by_z = group_by_slice(detections);
    std::vector<OpenIdentity> open;
    std::vector<OpenIdentity> closed;
    long next_id = 0;

    auto open_identity = [&](const Detection2D& d) {
        open.push_back({make_id(id_prefix, next_id++), {d}, d.z});
    };

    for (auto& [zt, dets] : by_z) {
        std::vector<OpenIdentity> still_open;
        for (auto& ident : open) {
            if (zt - ident.last_z > 1)
                closed.push_back(std::move(ident));
            else
                still_open.push_back(std::move(ident));
        }
        open = std::move(still_open);

        struct Candidate {
            double iom;
            size_t row, col;
        };
        std::vector<Candidate> candidates;
        for (size_t r = 0; r < open.size(); ++r)
            for (size_t c = 0; c < dets.size(); ++c) {
                const double v = iom(open[r].members.back().bbox, dets[c].bbox);
                if (v >= threshold) candidates.push_back({v, r, c});
            }
        std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
            if (a.iom != b.iom) return a.iom > b.iom;
            if (open[a.row].object_id != open[b.row].object_id)
                return open[a.row].object_id < open[b.row].object_id;
            return dets[a.col].id < dets[b.col].id;
        });

        std::vector<char> row_used(open.size(), 0), col_used(dets.size(), 0);
        for (const auto& cand : candidates) {
            if (row_used[cand.row] || col_used[cand.col]) continue;
            row_used[cand.row] = 1;
            col_used[cand.col] = 1;
            open[cand.row].members.push_back(dets[cand.col]);
            open[cand.row].last_z = zt;
            ++result.stats.pairs_matched;
        }
        for (size_t c = 0; c < dets.size(); ++c)
            if (!col_used[c]) open_identity(dets[c]);
    }

    for (auto& ident : open) closed.push_back(std::move(ident));
    std::sort(closed.begin(), closed.end(),
              [](const OpenIdentity& a, const OpenIdentity& b) { return a.object_id < b.object_id; });
    result.stats.identities_created = next_id;
    for (auto& ident : closed)
        result.objects.push_back(build_object(ident.object_id, std::move(ident.members)));
    return result;
}

}  // namespace spinetrack
