#include <spinetrack/volume.hpp>

#include <spinetrack/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace spinetrack {

SliceOffsets SliceOffsets::zero(int depth) {
    SliceOffsets so;
    so.offsets.assign(depth, {0.0, 0.0});
    so.degenerate.assign(depth, 0);
    return so;
}

namespace {

bool slice_is_constant(const uint16_t* p, size_t n) {
    for (size_t i = 1; i < n; ++i)
        if (p[i] != p[0]) return false;
    return true;
}

struct Shift {
    int dx = 0;
    int dy = 0;
    double ncc = -2.0;
};

bool better_shift(double ncc, int dx, int dy, const Shift& best) {
    if (ncc > best.ncc) return true;
    if (ncc < best.ncc) return false;
    const int r2 = dx * dx + dy * dy;
    const int best_r2 = best.dx * best.dx + best.dy * best.dy;
    if (r2 != best_r2) return r2 < best_r2;
    if (dy != best.dy) return dy < best.dy;
    return dx < best.dx;
}

// NCC peak between two equally sized slices over integer translations in
// [-radius, radius]^2, evaluated on an interior window of `a` so the overlap
// is constant across shifts. Sums use integer accumulators, so the peak
// location is exact.
Shift translation_peak(const uint16_t* a, const uint16_t* b, int width, int height,
                       int radius, int stride) {
    const int x0 = radius, x1 = width - radius;
    const int y0 = radius, y1 = height - radius;
    Shift best;
    if (x1 <= x0 || y1 <= y0) return best;  // image smaller than the search window

    uint64_t sum_a = 0, sum_aa = 0, n = 0;
    for (int y = y0; y < y1; y += stride)
        for (int x = x0; x < x1; x += stride) {
            const uint64_t v = a[static_cast<size_t>(y) * width + x];
            sum_a += v;
            sum_aa += v * v;
            ++n;
        }
    const double nd = static_cast<double>(n);
    const double var_a = static_cast<double>(sum_aa) - static_cast<double>(sum_a) * sum_a / nd;
    if (!(var_a > 0)) return best;

    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            uint64_t sum_b = 0, sum_bb = 0, sum_ab = 0;
            for (int y = y0; y < y1; y += stride) {
                const uint16_t* arow = a + static_cast<size_t>(y) * width;
                const uint16_t* brow = b + static_cast<size_t>(y + dy) * width + dx;
                for (int x = x0; x < x1; x += stride) {
                    const uint64_t va = arow[x];
                    const uint64_t vb = brow[x];
                    sum_b += vb;
                    sum_bb += vb * vb;
                    sum_ab += va * vb;
                }
            }
            const double var_b =
                static_cast<double>(sum_bb) - static_cast<double>(sum_b) * sum_b / nd;
            if (!(var_b > 0)) continue;
            const double cov =
                static_cast<double>(sum_ab) - static_cast<double>(sum_a) * sum_b / nd;
            const double ncc = cov / std::sqrt(var_a * var_b);
            if (better_shift(ncc, dx, dy, best)) best = {dx, dy, ncc};
        }
    }
    return best;
}

}  // namespace

SliceOffsets align_slices(const ImageStack& stack, const AlignParams& params) {
    stack.validate();
    SliceOffsets result = SliceOffsets::zero(stack.depth);
    if (stack.depth == 1) return result;

    const size_t slice_px = static_cast<size_t>(stack.width) * stack.height;
    std::vector<uint8_t> constant(stack.depth, 0);
    for (int z = 0; z < stack.depth; ++z)
        constant[z] = slice_is_constant(stack.slice_ptr(z), slice_px) ? 1 : 0;

    // Per-pair steps: content(z+1) ~ content(z) translated by step[z].
    std::vector<std::array<double, 2>> steps(stack.depth - 1, {0.0, 0.0});
    parallel_for(0, stack.depth - 1, [&](int z) {
        if (constant[z] || constant[z + 1]) return;  // no signal, step stays 0
        const Shift s = translation_peak(stack.slice_ptr(z), stack.slice_ptr(z + 1),
                                         stack.width, stack.height, params.search_radius,
                                         params.stride);
        if (s.ncc > -2.0) steps[z] = {static_cast<double>(s.dx), static_cast<double>(s.dy)};
    });

    for (int z = 1; z < stack.depth; ++z) {
        result.offsets[z][0] = result.offsets[z - 1][0] + steps[z - 1][0];
        result.offsets[z][1] = result.offsets[z - 1][1] + steps[z - 1][1];
        result.degenerate[z] = constant[z];
    }
    result.degenerate[0] = constant[0];
    return result;
}

namespace {

std::vector<double> mean_profile(const ImageStack& s) {
    std::vector<double> profile(s.depth);
    const size_t n = static_cast<size_t>(s.width) * s.height;
    for (int z = 0; z < s.depth; ++z) {
        uint64_t sum = 0;
        const uint16_t* p = s.slice_ptr(z);
        for (size_t i = 0; i < n; ++i) sum += p[i];
        profile[z] = static_cast<double>(sum) / static_cast<double>(n);
    }
    return profile;
}

bool profile_is_flat(const std::vector<double>& p) {
    for (size_t i = 1; i < p.size(); ++i)
        if (p[i] != p[0]) return false;
    return true;
}

// Argmax of profile NCC over integer shifts: pairs (a[i], b[i+s]).
// Ties prefer the smaller |s|, then the smaller s.
ZOffset z_peak(const std::vector<double>& a, const std::vector<double>& b, int max_shift) {
    const int da = static_cast<int>(a.size());
    const int db = static_cast<int>(b.size());
    const int limit = std::min(max_shift, std::min(da, db) - 1);

    int best_s = 0;
    double best_ncc = -2.0;
    bool found = false;
    for (int s = -limit; s <= limit; ++s) {
        const int lo = std::max(0, -s);
        const int hi = std::min(da, db - s);
        const int n = hi - lo;
        if (n < 2) continue;
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        for (int i = lo; i < hi; ++i) {
            const double va = a[i];
            const double vb = b[i + s];
            sa += va;
            sb += vb;
            saa += va * va;
            sbb += vb * vb;
            sab += va * vb;
        }
        const double nd = n;
        const double var_a = saa - sa * sa / nd;
        const double var_b = sbb - sb * sb / nd;
        if (!(var_a > 0) || !(var_b > 0)) continue;
        const double ncc = (sab - sa * sb / nd) / std::sqrt(var_a * var_b);
        const bool take = !found || ncc > best_ncc ||
                          (ncc == best_ncc &&
                           (std::abs(s) < std::abs(best_s) ||
                            (std::abs(s) == std::abs(best_s) && s < best_s)));
        if (take) {
            best_ncc = ncc;
            best_s = s;
            found = true;
        }
    }
    if (!found) return {0, true};
    return {best_s, false};
}

}  // namespace

ZOffset estimate_z_offset(const ImageStack& a, const ImageStack& b, const ZOffsetParams& params) {
    const auto prof_a = mean_profile(a);
    const auto prof_b = mean_profile(b);
    if (prof_a == prof_b) return {0, profile_is_flat(prof_a)};
    if (profile_is_flat(prof_a) || profile_is_flat(prof_b)) return {0, true};

    // Canonical argument order keeps the estimate exactly antisymmetric
    // even when the correlation peak is tied.
    if (prof_b < prof_a) {
        ZOffset r = z_peak(prof_b, prof_a, params.max_shift);
        r.offset = -r.offset;
        return r;
    }
    return z_peak(prof_a, prof_b, params.max_shift);
}

Image2D mip(const ImageStack& stack) {
    stack.validate();
    Image2D out(stack.width, stack.height);
    const size_t n = out.size();
    for (int z = 0; z < stack.depth; ++z) {
        const uint16_t* p = stack.slice_ptr(z);
        for (size_t i = 0; i < n; ++i) out.pixels[i] = std::max(out.pixels[i], p[i]);
    }
    return out;
}

std::array<double, 2> DeformationField::sample(double x, double y) const {
    if (nx == 1 && ny == 1) return node(0, 0);
    const double gx = std::clamp(x / grid_spacing, 0.0, static_cast<double>(nx - 1));
    const double gy = std::clamp(y / grid_spacing, 0.0, static_cast<double>(ny - 1));
    const int ix = std::min(static_cast<int>(gx), std::max(nx - 2, 0));
    const int iy = std::min(static_cast<int>(gy), std::max(ny - 2, 0));
    const double fx = gx - ix;
    const double fy = gy - iy;
    const int ix1 = std::min(ix + 1, nx - 1);
    const int iy1 = std::min(iy + 1, ny - 1);

    std::array<double, 2> out{};
    for (int k = 0; k < 2; ++k) {
        const double top = node(iy, ix)[k] * (1 - fx) + node(iy, ix1)[k] * fx;
        const double bot = node(iy1, ix)[k] * (1 - fx) + node(iy1, ix1)[k] * fx;
        out[k] = top * (1 - fy) + bot * fy;
    }
    return out;
}

DeformationField DeformationField::identity(int width, int height, int grid_spacing) {
    DeformationField f;
    f.grid_spacing = grid_spacing;
    f.width = width;
    f.height = height;
    f.nx = (width - 1) / grid_spacing + 1;
    f.ny = (height - 1) / grid_spacing + 1;
    f.displacements.assign(static_cast<size_t>(f.nx) * f.ny, {0.0, 0.0});
    return f;
}

void DeformationField::validate() const {
    if (grid_spacing <= 0) throw Error("DeformationField: non-positive grid spacing");
    if (nx < 1 || ny < 1) throw Error("DeformationField: empty grid");
    if (width <= 0 || height <= 0) throw Error("DeformationField: empty image domain");
    if (displacements.size() != static_cast<size_t>(nx) * ny)
        throw Error("DeformationField: displacement count does not match grid");
    for (const auto& d : displacements)
        if (!std::isfinite(d[0]) || !std::isfinite(d[1]))
            throw Error("DeformationField: non-finite displacement");
}

namespace {

struct PatchStats {
    double mean = 0;
    double var = 0;
};

PatchStats patch_stats(const Image2D& img, int cx, int cy, int r) {
    uint64_t sum = 0, sum2 = 0;
    for (int y = cy - r; y <= cy + r; ++y)
        for (int x = cx - r; x <= cx + r; ++x) {
            const uint64_t v = img.at(y, x);
            sum += v;
            sum2 += v * v;
        }
    const double n = static_cast<double>((2 * r + 1)) * (2 * r + 1);
    PatchStats s;
    s.mean = static_cast<double>(sum) / n;
    s.var = static_cast<double>(sum2) - static_cast<double>(sum) * sum / n;
    return s;
}

double patch_ncc(const Image2D& a, int ax, int ay, const Image2D& b, int bx, int by, int r,
                 const PatchStats& sa, const PatchStats& sb) {
    if (!(sa.var > 0) || !(sb.var > 0)) return -2.0;
    uint64_t sum_ab = 0;
    uint64_t sum_a = 0, sum_b = 0;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            const uint64_t va = a.at(ay + dy, ax + dx);
            const uint64_t vb = b.at(by + dy, bx + dx);
            sum_ab += va * vb;
            sum_a += va;
            sum_b += vb;
        }
    const double n = static_cast<double>((2 * r + 1)) * (2 * r + 1);
    const double cov = static_cast<double>(sum_ab) - static_cast<double>(sum_a) * sum_b / n;
    return cov / std::sqrt(sa.var * sb.var);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

DeformationField estimate_deformation(const Image2D& a, const Image2D& b,
                                      const DeformParams& params) {
    if (a.width != b.width || a.height != b.height)
        throw Error("estimate_deformation: image size mismatch");
    if (a.width == 0 || a.height == 0) throw Error("estimate_deformation: empty image");

    DeformationField field = DeformationField::identity(a.width, a.height, params.grid_spacing);
    const int pr = params.patch_radius;
    const int sr = params.search_radius;
    std::vector<uint8_t> valid(field.displacements.size(), 0);

    parallel_for(0, field.ny * field.nx, [&](int idx) {
        const int iy = idx / field.nx;
        const int ix = idx % field.nx;
        const int px = ix * field.grid_spacing;
        const int py = iy * field.grid_spacing;
        if (px - pr < 0 || px + pr >= a.width || py - pr < 0 || py + pr >= a.height)
            return;  // patch does not fit; node inherits from neighbors
        const PatchStats sa = patch_stats(a, px, py, pr);
        if (!(sa.var > 0)) return;

        Shift best;
        for (int sy = -sr; sy <= sr; ++sy) {
            for (int sx = -sr; sx <= sr; ++sx) {
                const int bx = px + sx, by = py + sy;
                if (bx - pr < 0 || bx + pr >= b.width || by - pr < 0 || by + pr >= b.height)
                    continue;
                const PatchStats sb = patch_stats(b, bx, by, pr);
                const double ncc = patch_ncc(a, px, py, b, bx, by, pr, sa, sb);
                if (ncc > -2.0 && better_shift(ncc, sx, sy, best)) best = {sx, sy, ncc};
            }
        }
        if (best.ncc >= params.corr_floor) {
            field.displacements[idx] = {static_cast<double>(best.dx),
                                        static_cast<double>(best.dy)};
            valid[idx] = 1;
        }
    });

    // Invalid nodes inherit the median of valid 8-neighbors, in synchronous
    // rounds so fill order does not matter.
    bool any_valid = std::any_of(valid.begin(), valid.end(), [](uint8_t v) { return v != 0; });
    if (!any_valid) return field;  // no texture anywhere: zero field

    while (true) {
        std::vector<int> fill;
        std::vector<std::array<double, 2>> fill_values;
        for (int iy = 0; iy < field.ny; ++iy) {
            for (int ix = 0; ix < field.nx; ++ix) {
                const int idx = iy * field.nx + ix;
                if (valid[idx]) continue;
                std::vector<double> xs, ys;
                for (int ny_ = -1; ny_ <= 1; ++ny_)
                    for (int nx_ = -1; nx_ <= 1; ++nx_) {
                        if (nx_ == 0 && ny_ == 0) continue;
                        const int jy = iy + ny_, jx = ix + nx_;
                        if (jx < 0 || jx >= field.nx || jy < 0 || jy >= field.ny) continue;
                        const int jdx = jy * field.nx + jx;
                        if (!valid[jdx]) continue;
                        xs.push_back(field.displacements[jdx][0]);
                        ys.push_back(field.displacements[jdx][1]);
                    }
                if (!xs.empty()) {
                    fill.push_back(idx);
                    fill_values.push_back({median_of(xs), median_of(ys)});
                }
            }
        }
        if (fill.empty()) break;
        for (size_t i = 0; i < fill.size(); ++i) {
            field.displacements[fill[i]] = fill_values[i];
            valid[fill[i]] = 1;
        }
        if (std::all_of(valid.begin(), valid.end(), [](uint8_t v) { return v != 0; })) break;
    }
    return field;
}

BBox project_box(const BBox& box, const DeformationField& field) {
    const auto d1 = field.sample(box.x1, box.y1);
    const auto d2 = field.sample(box.x2, box.y2);
    const double px1 = box.x1 + d1[0], py1 = box.y1 + d1[1];
    const double px2 = box.x2 + d2[0], py2 = box.y2 + d2[1];
    const double nx1 = std::min(px1, px2), nx2 = std::max(px1, px2);
    const double ny1 = std::min(py1, py2), ny2 = std::max(py1, py2);
    if (!(nx1 < nx2 && ny1 < ny2)) throw Error("project_box: projected box collapsed");
    return BBox(nx1, ny1, nx2, ny2);
}

}  // namespace spinetrack
