#pragma once

#include <spinetrack/image.hpp>
#include <spinetrack/model.hpp>

#include <array>
#include <vector>

namespace spinetrack {

/// Per-slice translation into the coordinate frame of slice 0 of the same
/// stack. offsets[z] is the estimated translation of slice z's content
/// relative to slice 0: a detection at position p on slice z sits at
/// p - offsets[z] in the aligned frame.
struct SliceOffsets {
    std::vector<std::array<double, 2>> offsets;  // (dx, dy), offsets[0] == {0,0}
    std::vector<uint8_t> degenerate;             // flagged constant-intensity slices

    static SliceOffsets zero(int depth);
    BBox aligned(const BBox& box, int z) const {
        return box.translated(-offsets[z][0], -offsets[z][1]);
    }
};

struct AlignParams {
    int search_radius = 20;  // max per-step translation, pixels
    int stride = 1;          // pixel subsampling inside the correlation window
    double min_stddev = 1e-9;
};

/// Translation-only rigid alignment of consecutive slices by the normalized
/// cross-correlation peak over a bounded search window; per-slice offsets
/// are the cumulative sums anchored at slice 0. Constant-intensity slices
/// contribute a zero step and are flagged.
SliceOffsets align_slices(const ImageStack& stack, const AlignParams& params = {});

/// Signed integer slice shift between two stacks of the same field of view:
/// slice z of `a` corresponds to slice z + offset of `b`.
struct ZOffset {
    int offset = 0;
    bool flat_flagged = false;  // set when either intensity profile is flat
};

struct ZOffsetParams {
    int max_shift = 10;
};

/// Maximizes the normalized cross-correlation of per-slice mean-intensity
/// profiles over integer shifts. Exactly antisymmetric in its arguments.
ZOffset estimate_z_offset(const ImageStack& a, const ImageStack& b,
                          const ZOffsetParams& params = {});

/// Maximum intensity projection: per-pixel maximum over z.
Image2D mip(const ImageStack& stack);

/// Regular grid of 2D displacements over an image domain, evaluated anywhere
/// by bilinear interpolation (clamped beyond the outermost nodes). The field
/// carries coordinates of one timepoint's MIP onto the next:
/// p in image A corresponds to p + sample(p) in image B.
struct DeformationField {
    int grid_spacing = 16;
    int nx = 0;
    int ny = 0;
    int width = 0;   // image domain covered
    int height = 0;
    std::vector<std::array<double, 2>> displacements;  // row-major ny x nx

    std::array<double, 2>& node(int iy, int ix) {
        return displacements[static_cast<size_t>(iy) * nx + ix];
    }
    const std::array<double, 2>& node(int iy, int ix) const {
        return displacements[static_cast<size_t>(iy) * nx + ix];
    }

    std::array<double, 2> sample(double x, double y) const;

    static DeformationField identity(int width, int height, int grid_spacing);
    void validate() const;
};

struct DeformParams {
    int grid_spacing = 16;
    int patch_radius = 8;
    int search_radius = 32;
    double corr_floor = 0.3;  // nodes below this inherit the median of valid neighbors
};

/// Grid block matching between two images of identical size: each node takes
/// the displacement maximizing local normalized cross-correlation within the
/// search radius. Low-correlation or border nodes inherit the median of
/// valid neighbors.
DeformationField estimate_deformation(const Image2D& a, const Image2D& b,
                                      const DeformParams& params = {});

/// Displaces both box corners by the interpolated field and renormalizes
/// corner order. Throws Error if the projected box collapses.
BBox project_box(const BBox& box, const DeformationField& field);

}  // namespace spinetrack
