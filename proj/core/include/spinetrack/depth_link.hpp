#pragma once

#include <spinetrack/appearance.hpp>
#include <spinetrack/model.hpp>
#include <spinetrack/volume.hpp>

#include <string>
#include <vector>

namespace spinetrack {

/// Bookkeeping emitted by the linking stages.
struct LinkStats {
    long pairs_matched = 0;
    long identities_created = 0;
    long missing_embedding_pairs = 0;  // pairs priced with the median substitute
    bool appearance_used = false;
};

struct DepthLinkResult {
    std::vector<SpineObject3D> objects;
    LinkStats stats;
};

/// Matching cost between detections on adjacent slices of one stack:
/// lambda_app * appearance + lambda_sp * spatial on alignment-corrected
/// boxes. The appearance term is omitted when lambda_app is zero or either
/// embedding is missing. Throws Error when the detections are not on
/// adjacent slices of the same stack and timepoint.
double depth_cost(const Detection2D& i, const Detection2D& j, const SliceOffsets& offsets,
                  const TrackingConfig& cfg, const EmbeddingStore* embeddings = nullptr);

/// Links 2D detections of one (stack, timepoint) across depth into 3D
/// objects: ascending z, gated Hungarian assignment per adjacent slice pair,
/// unmatched detections start new identities. With cfg.gap_bridge = g,
/// identities stay open for up to g skipped slices. The returned objects
/// partition the input detections.
DepthLinkResult link_depth(const std::vector<Detection2D>& detections,
                           const SliceOffsets& offsets, const TrackingConfig& cfg,
                           const EmbeddingStore* embeddings = nullptr,
                           const std::string& id_prefix = "obj_");

/// Greedy adjacent-slice grouping baseline: pairs merge identities when
/// IoM >= threshold, highest IoM first. Boxes are used as-is (no alignment).
DepthLinkResult link_depth_iom_baseline(const std::vector<Detection2D>& detections,
                                        double threshold,
                                        const std::string& id_prefix = "obj_");

}  // namespace spinetrack
