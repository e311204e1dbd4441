#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace polarface {

/// Grayscale image with real-valued intensities in [0, 1], stored row-major.
/// Throughout the library x indexes rows (0..height-1, top-down) and y
/// indexes columns (0..width-1, left-right). Quantization to integer
/// intensities happens only at the file boundary (see pgm.hpp).
struct GrayImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> pixels;

    GrayImage() = default;

    GrayImage(std::size_t h, std::size_t w, double fill = 0.0)
        : height(h), width(w), pixels(h * w, fill) {
        if (h == 0 || w == 0)
            throw std::invalid_argument("GrayImage: dimensions must be at least 1x1");
    }

    double& at(std::size_t x, std::size_t y) { return pixels[x * width + y]; }
    double at(std::size_t x, std::size_t y) const { return pixels[x * width + y]; }

    std::size_t size() const { return pixels.size(); }

    bool same_shape(const GrayImage& other) const {
        return height == other.height && width == other.width;
    }

    bool operator==(const GrayImage& other) const = default;
};

/// Nearest-neighbor resampling. Output pixel (i, j) takes input pixel
/// (floor((i + 0.5) * in_h / out_h), floor((j + 0.5) * in_w / out_w)),
/// clamped to valid indices. Never invents intensities.
inline GrayImage resize_nearest(const GrayImage& img, std::size_t out_h, std::size_t out_w) {
    if (out_h == 0 || out_w == 0)
        throw std::invalid_argument("resize_nearest: output dimensions must be positive");
    GrayImage out(out_h, out_w);
    const double in_h = static_cast<double>(img.height);
    const double in_w = static_cast<double>(img.width);
    for (std::size_t i = 0; i < out_h; ++i) {
        double sx = std::floor((i + 0.5) * in_h / static_cast<double>(out_h));
        std::size_t src_x = sx <= 0.0 ? 0 : static_cast<std::size_t>(sx);
        if (src_x >= img.height) src_x = img.height - 1;
        for (std::size_t j = 0; j < out_w; ++j) {
            double sy = std::floor((j + 0.5) * in_w / static_cast<double>(out_w));
            std::size_t src_y = sy <= 0.0 ? 0 : static_cast<std::size_t>(sy);
            if (src_y >= img.width) src_y = img.width - 1;
            out.at(i, j) = img.at(src_x, src_y);
        }
    }
    return out;
}

/// Mean absolute per-pixel difference between two same-shaped images.
inline double mean_abs_diff(const GrayImage& a, const GrayImage& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("mean_abs_diff: images are " + std::to_string(a.height) +
                                    "x" + std::to_string(a.width) + " vs " +
                                    std::to_string(b.height) + "x" + std::to_string(b.width));
    double sum = 0.0;
    for (std::size_t k = 0; k < a.pixels.size(); ++k)
        sum += std::abs(a.pixels[k] - b.pixels[k]);
    return sum / static_cast<double>(a.pixels.size());
}

}  // namespace polarface
