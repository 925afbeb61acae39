#include <spinetrack/model.hpp>

#include <spinetrack/appearance.hpp>
#include <spinetrack/image.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace spinetrack {

BBox::BBox(double x1_, double y1_, double x2_, double y2_)
    : x1(x1_), y1(y1_), x2(x2_), y2(y2_) {
    if (!(std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2)))
        throw Error("BBox: non-finite coordinate");
    if (!(x1 < x2 && y1 < y2))
        throw Error("BBox: degenerate box (" + std::to_string(x1) + "," + std::to_string(y1) +
                    "," + std::to_string(x2) + "," + std::to_string(y2) + ")");
}

void Detection2D::validate() const {
    if (id.empty()) throw Error("Detection2D: empty id");
    if (timepoint < 0) throw Error("Detection2D " + id + ": negative timepoint");
    if (z < 0) throw Error("Detection2D " + id + ": negative z");
    if (!(confidence >= 0.0 && confidence <= 1.0))
        throw Error("Detection2D " + id + ": confidence outside [0,1]");
}

TrackingConfig TrackingConfig::depth_defaults() {
    TrackingConfig cfg;
    cfg.lambda_sp = 1.0;
    cfg.lambda_app = 0.0;
    cfg.lambda_depth = 0.0;
    return cfg;
}

TrackingConfig TrackingConfig::depth_sp_app() {
    TrackingConfig cfg;
    cfg.lambda_sp = 0.5;
    cfg.lambda_app = 0.5;
    cfg.lambda_depth = 0.0;
    return cfg;
}

TrackingConfig TrackingConfig::time_defaults() {
    TrackingConfig cfg;
    cfg.lambda_sp = 0.4;
    cfg.lambda_depth = 0.4;
    cfg.lambda_app = 0.2;
    return cfg;
}

void TrackingConfig::validate() const {
    if (lambda_app < 0 || lambda_sp < 0 || lambda_depth < 0)
        throw Error("TrackingConfig: negative weight");
    if (lambda_app == 0 && lambda_sp == 0 && lambda_depth == 0)
        throw Error("TrackingConfig: all weights zero");
    if (!std::isfinite(match_threshold_depth) || !std::isfinite(match_threshold_time))
        throw Error("TrackingConfig: non-finite threshold");
    if (!(contrastive_margin > 0)) throw Error("TrackingConfig: margin must be positive");
    if (dilation_radius < 1) throw Error("TrackingConfig: dilation radius must be >= 1");
    if (gap_bridge < 0) throw Error("TrackingConfig: negative gap_bridge");
}

std::vector<Violation> validate_dataset(const std::vector<Detection2D>& detections,
                                        const std::vector<ImageStack>& stacks) {
    std::vector<Violation> out;
    std::unordered_map<std::string, int> stack_depth;
    for (const auto& s : stacks) stack_depth[s.stack_id] = s.depth;

    std::unordered_set<std::string> seen;
    for (const auto& d : detections) {
        if (!seen.insert(d.id).second)
            out.push_back({ViolationKind::DuplicateId, d.id, "duplicate detection id"});
        auto it = stack_depth.find(d.stack_id);
        if (it == stack_depth.end()) {
            out.push_back({ViolationKind::DanglingStackId, d.id,
                           "references unknown stack '" + d.stack_id + "'"});
        } else if (d.z >= it->second) {
            out.push_back({ViolationKind::ZOutOfRange, d.id,
                           "z=" + std::to_string(d.z) + " out of range for depth " +
                               std::to_string(it->second)});
        }
    }
    return out;
}

namespace {

double median_sorted(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SpineObject3D build_object(const std::string& object_id, std::vector<Detection2D> members,
                           const EmbeddingStore* store) {
    if (members.empty()) throw Error("build_object: empty member list");

    std::sort(members.begin(), members.end(),
              [](const Detection2D& a, const Detection2D& b) { return a.z < b.z; });

    SpineObject3D obj;
    obj.object_id = object_id;
    obj.timepoint = members.front().timepoint;
    const std::string& stack = members.front().stack_id;

    std::vector<double> xs1, ys1, xs2, ys2;
    for (const auto& d : members) {
        if (d.timepoint != obj.timepoint || d.stack_id != stack)
            throw Error("build_object: members span multiple stacks or timepoints");
        if (!obj.depth_set.insert(d.z).second)
            throw Error("build_object: duplicate z=" + std::to_string(d.z));
        obj.members.emplace_back(d.z, d.id);
        xs1.push_back(d.bbox.x1);
        ys1.push_back(d.bbox.y1);
        xs2.push_back(d.bbox.x2);
        ys2.push_back(d.bbox.y2);
    }
    obj.median_box = BBox(median_sorted(xs1), median_sorted(ys1),
                          median_sorted(xs2), median_sorted(ys2));

    if (store != nullptr) {
        std::vector<std::vector<double>> vecs;
        vecs.reserve(members.size());
        bool all_present = true;
        for (const auto& d : members) {
            const auto* e = store->find(d.id);
            if (e == nullptr) {
                all_present = false;
                break;
            }
            vecs.push_back(*e);
        }
        if (all_present) obj.mean_embedding = mean_embedding(vecs);
    }
    return obj;
}

}  // namespace spinetrack
