#pragma once

#include <spinetrack/depth_link.hpp>
#include <spinetrack/model.hpp>
#include <spinetrack/volume.hpp>

#include <map>
#include <set>
#include <vector>

namespace spinetrack {

struct TimeLinkResult {
    std::vector<TimeTrack> tracks;
    LinkStats stats;
};

/// Depth-layer consistency between two objects, after shifting the first
/// set by z_offset into the second stack's frame. Overlapping sets score
/// 1 - |intersection| / min(|Z_i|, |Z_j|) in [0,1); disjoint sets score the
/// positive layer gap between their ranges (floored at one layer).
double depth_consistency_cost(const std::set<int>& z_i, const std::set<int>& z_j, int z_offset);

/// Total association cost across consecutive timepoints: weighted sum of the
/// spatial cost between the field-projected median box and the candidate's
/// median box, the depth-consistency cost, and the appearance cost between
/// mean embeddings (omitted when lambda_app is zero or either is missing).
double time_cost(const SpineObject3D& i, const SpineObject3D& j, const DeformationField& field,
                 int z_offset, const TrackingConfig& cfg);

/// Chains 3D objects at consecutive timepoints into tracks by gated
/// Hungarian assignment per timepoint pair. Matched objects extend tracks,
/// unmatched objects at t+1 start tracks, tracks unmatched at t end.
/// fields[t] and z_offsets[t] carry timepoint t onto t+1. The returned
/// tracks partition all objects.
TimeLinkResult link_time(const std::map<int, std::vector<SpineObject3D>>& objects_by_timepoint,
                         const std::vector<DeformationField>& fields,
                         const std::vector<int>& z_offsets, const TrackingConfig& cfg);

}  // namespace spinetrack
