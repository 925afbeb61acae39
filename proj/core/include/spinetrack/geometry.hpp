#pragma once

#include <spinetrack/model.hpp>

#include <algorithm>

namespace spinetrack {

inline double intersection_area(const BBox& a, const BBox& b) {
    const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (w <= 0.0 || h <= 0.0) return 0.0;
    return w * h;
}

/// Intersection over union, in [0,1].
inline double iou(const BBox& a, const BBox& b) {
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    return inter / uni;
}

/// Generalized IoU (Rezatofighi et al.): IoU minus the fraction of the
/// tightest enclosing box not covered by the union. Range (-1, 1].
inline double giou(const BBox& a, const BBox& b) {
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    const double enclosing = (std::max(a.x2, b.x2) - std::min(a.x1, b.x1)) *
                             (std::max(a.y2, b.y2) - std::min(a.y1, b.y1));
    return inter / uni - (enclosing - uni) / enclosing;
}

/// Intersection over the smaller box's area, in [0,1]. 1 for nested boxes.
inline double iom(const BBox& a, const BBox& b) {
    const double inter = intersection_area(a, b);
    return inter / std::min(a.area(), b.area());
}

/// Spatial matching cost: (1 - giou)/2, mapping the (-1,1] similarity into
/// [0,1) so it composes with the bounded appearance cost and a 0.5 gate.
inline double spatial_cost(const BBox& a, const BBox& b) {
    return (1.0 - giou(a, b)) / 2.0;
}

}  // namespace spinetrack
