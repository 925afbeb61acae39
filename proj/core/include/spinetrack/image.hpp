#pragma once

#include <spinetrack/error.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace spinetrack {

/// 16-bit grayscale image, row-major.
struct Image2D {
    int width = 0;
    int height = 0;
    std::vector<uint16_t> pixels;

    Image2D() = default;
    Image2D(int w, int h, uint16_t fill = 0)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

    uint16_t at(int y, int x) const { return pixels[static_cast<size_t>(y) * width + x]; }
    uint16_t& at(int y, int x) { return pixels[static_cast<size_t>(y) * width + x]; }
    bool in_bounds(int y, int x) const { return x >= 0 && x < width && y >= 0 && y < height; }
    size_t size() const { return pixels.size(); }
};

/// Binary mask over an image domain (0 or 1 per pixel).
struct Mask2D {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    Mask2D() = default;
    Mask2D(int w, int h, uint8_t fill = 0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    uint8_t at(int y, int x) const { return data[static_cast<size_t>(y) * width + x]; }
    uint8_t& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
    bool in_bounds(int y, int x) const { return x >= 0 && x < width && y >= 0 && y < height; }
    long count() const;
    bool empty() const { return count() == 0; }
};

/// 16-bit grayscale volume with physical voxel size. Pixels are stored
/// z-major, then row-major within a slice.
struct ImageStack {
    std::string stack_id;
    int timepoint = 0;
    int width = 0;
    int height = 0;
    int depth = 0;
    std::array<double, 3> voxel_size_um{0.1075, 0.1075, 0.5};
    std::vector<uint16_t> pixels;

    ImageStack() = default;
    ImageStack(std::string id, int tp, int w, int h, int d);

    uint16_t at(int z, int y, int x) const {
        return pixels[(static_cast<size_t>(z) * height + y) * width + x];
    }
    uint16_t& at(int z, int y, int x) {
        return pixels[(static_cast<size_t>(z) * height + y) * width + x];
    }
    const uint16_t* slice_ptr(int z) const {
        return pixels.data() + static_cast<size_t>(z) * height * width;
    }
    Image2D slice(int z) const;

    /// Throws Error if the pixel buffer does not match the declared
    /// dimensions or a voxel size is non-positive.
    void validate() const;
};

}  // namespace spinetrack
