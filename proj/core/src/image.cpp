#include <spinetrack/image.hpp>

#include <numeric>

namespace spinetrack {

long Mask2D::count() const {
    return std::accumulate(data.begin(), data.end(), 0L,
                           [](long acc, uint8_t v) { return acc + (v != 0); });
}

ImageStack::ImageStack(std::string id, int tp, int w, int h, int d)
    : stack_id(std::move(id)),
      timepoint(tp),
      width(w),
      height(h),
      depth(d),
      pixels(static_cast<size_t>(w) * h * d, 0) {
    if (w <= 0 || h <= 0 || d <= 0) throw Error("ImageStack: non-positive dimension");
}

Image2D ImageStack::slice(int z) const {
    if (z < 0 || z >= depth) throw Error("ImageStack: slice index out of range");
    Image2D img(width, height);
    const uint16_t* src = slice_ptr(z);
    std::copy(src, src + static_cast<size_t>(width) * height, img.pixels.begin());
    return img;
}

void ImageStack::validate() const {
    if (width <= 0 || height <= 0 || depth <= 0)
        throw Error("ImageStack " + stack_id + ": non-positive dimension");
    if (pixels.size() != static_cast<size_t>(width) * height * depth)
        throw Error("ImageStack " + stack_id + ": pixel buffer does not match dimensions");
    for (double v : voxel_size_um)
        if (!(v > 0)) throw Error("ImageStack " + stack_id + ": non-positive voxel size");
}

}  // namespace spinetrack
