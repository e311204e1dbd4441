#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "polarface/image.hpp"

namespace polarface {

/// Geometry of a Cartesian-to-log-polar conversion for one source image.
/// The reference circle is the largest circle fully inside the image,
/// centered at (floor(M/2), floor(N/2)). The output is side x side with
/// side = base^exponent, the smallest power of `base` covering the radius.
struct PolarGeometry {
    std::size_t center_row = 0;  // m = floor(M/2)
    std::size_t center_col = 0;  // n = floor(N/2)
    double radius = 0.0;         // R, inscribed-circle radius
    unsigned base = 2;           // Z
    unsigned exponent = 0;       // q, smallest positive integer with Z^q >= R
    std::size_t side = 0;        // S = Z^q
};

inline PolarGeometry compute_geometry(std::size_t height, std::size_t width, unsigned base = 2) {
    if (base < 2) throw std::invalid_argument("compute_geometry: base must be >= 2");
    if (height < 3 || width < 3)
        throw std::invalid_argument("compute_geometry: image " + std::to_string(height) + "x" +
                                    std::to_string(width) +
                                    " too small; the reference circle needs radius >= 1");
    PolarGeometry g;
    g.center_row = height / 2;
    g.center_col = width / 2;
    const std::size_t r = std::min(std::min(g.center_row, g.center_col),
                                   std::min(height - 1 - g.center_row, width - 1 - g.center_col));
    g.radius = static_cast<double>(r);
    g.base = base;
    // q = ceil(log_base R), computed in integers to dodge rounding at exact
    // powers; clamped to >= 1 so the output side is always at least `base`.
    g.exponent = 1;
    std::size_t pow = base;
    while (pow < r) {
        pow *= base;
        ++g.exponent;
    }
    g.side = pow;
    return g;
}

/// Polar coordinates of one pixel relative to a geometry's center.
struct PolarCoord {
    double r = 0.0;
    double theta_deg = 0.0;  // in [0, 360)
};

/// r = sqrt((x-m)^2 + (y-n)^2); theta measured from the +x (row) axis toward
/// the +y (column) axis via the two-argument arctangent, mapped to [0, 360).
/// The center maps to (0, 0) by convention.
inline PolarCoord cart_to_polar(double x, double y, const PolarGeometry& g) {
    const double dx = x - static_cast<double>(g.center_row);
    const double dy = y - static_cast<double>(g.center_col);
    PolarCoord pc;
    pc.r = std::hypot(dx, dy);
    double theta = std::atan2(dy, dx) * (180.0 / 3.14159265358979323846);
    if (theta < 0.0) theta += 360.0;
    if (theta >= 360.0) theta -= 360.0;
    pc.theta_deg = theta;
    return pc;
}

/// Cartesian-to-log-polar conversion with fixed-size output. Rows sample the
/// log radius p = ln r uniformly over [ln 1, ln R] (row 0 innermost), columns
/// sample the angle uniformly over [0, 360) (column j at 360*j/S degrees).
/// Each output cell takes the nearest source pixel under the inverse map
/// x = m + r cos(theta), y = n + r sin(theta).
inline GrayImage log_polar_transform(const GrayImage& img, unsigned base = 2) {
    const PolarGeometry g = compute_geometry(img.height, img.width, base);
    const std::size_t side = g.side;
    GrayImage out(side, side);

    const double log_r_max = std::log(g.radius);
    const double row_step = side > 1 ? log_r_max / static_cast<double>(side - 1) : 0.0;
    const double col_step = 2.0 * 3.14159265358979323846 / static_cast<double>(side);
    const double m = static_cast<double>(g.center_row);
    const double n = static_cast<double>(g.center_col);

    for (std::size_t i = 0; i < side; ++i) {
        const double r = std::exp(static_cast<double>(i) * row_step);
        for (std::size_t j = 0; j < side; ++j) {
            const double theta = static_cast<double>(j) * col_step;
            const double x = m + r * std::cos(theta);
            const double y = n + r * std::sin(theta);
            double xi = std::round(x);
            double yi = std::round(y);
            if (xi < 0.0) xi = 0.0;
            if (yi < 0.0) yi = 0.0;
            std::size_t sx = static_cast<std::size_t>(xi);
            std::size_t sy = static_cast<std::size_t>(yi);
            if (sx >= img.height) sx = img.height - 1;
            if (sy >= img.width) sy = img.width - 1;
            out.at(i, j) = img.at(sx, sy);
        }
    }
    return out;
}

/// Column j of the output equals column (j - k) mod width of the input;
/// k may be negative or exceed the width.
inline GrayImage circular_column_shift(const GrayImage& img, long long k) {
    const long long w = static_cast<long long>(img.width);
    const long long shift = ((k % w) + w) % w;
    GrayImage out(img.height, img.width);
    for (std::size_t x = 0; x < img.height; ++x) {
        for (std::size_t y = 0; y < img.width; ++y) {
            const std::size_t src = static_cast<std::size_t>(
                (static_cast<long long>(y) - shift + w) % w);
            out.at(x, y) = img.at(x, src);
        }
    }
    return out;
}

}  // namespace polarface
