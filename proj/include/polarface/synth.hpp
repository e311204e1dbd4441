#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarface/image.hpp"
#include "polarface/pgm.hpp"
#include "polarface/rng.hpp"

namespace polarface {

/// One anisotropic Gaussian intensity blob. Center offsets are in pixels
/// relative to the base image center; sigmas along the blob's own axes.
struct GaussianBlob {
    double row = 0.0;
    double col = 0.0;
    double sigma_u = 3.0;
    double sigma_v = 3.0;
    double angle_deg = 0.0;
    double amplitude = 0.2;
};

/// Parameters of a face-like pattern: an elliptical head with a soft edge
/// carrying a set of blobs (eyes, nose, mouth, plus distinguishing marks).
struct FaceParams {
    std::size_t height = 101;
    std::size_t width = 101;
    double head_radius_row = 0.40;  // fraction of height
    double head_radius_col = 0.33;  // fraction of width
    double head_level = 0.55;
    double edge_softness = 5.0;  // pixels
    double background = 0.05;
    std::vector<GaussianBlob> blobs;
};

namespace detail {

inline double deg_to_rad(double deg) { return deg * (3.14159265358979323846 / 180.0); }

inline double face_pattern_value(const FaceParams& p, double bx, double by) {
    const double c_row = (static_cast<double>(p.height) - 1.0) / 2.0;
    const double c_col = (static_cast<double>(p.width) - 1.0) / 2.0;
    const double a = p.head_radius_row * static_cast<double>(p.height);
    const double b = p.head_radius_col * static_cast<double>(p.width);

    const double dx = bx - c_row;
    const double dy = by - c_col;
    const double rho = std::sqrt((dx / a) * (dx / a) + (dy / b) * (dy / b));
    const double signed_dist = (rho - 1.0) * std::min(a, b);
    double v = p.background + p.head_level / (1.0 + std::exp(signed_dist / p.edge_softness));

    for (const auto& blob : p.blobs) {
        const double du = dx - blob.row;
        const double dv = dy - blob.col;
        const double phi = deg_to_rad(blob.angle_deg);
        const double uu = du * std::cos(phi) + dv * std::sin(phi);
        const double vv = -du * std::sin(phi) + dv * std::cos(phi);
        v += blob.amplitude * std::exp(-uu * uu / (2.0 * blob.sigma_u * blob.sigma_u) -
                                       vv * vv / (2.0 * blob.sigma_v * blob.sigma_v));
    }
    return v;
}

}  // namespace detail

/// Renders the pattern rotated by `rotation_deg` and scaled by `scale` about
/// the image center into a frame of `out_h` x `out_w` pixels, then adds
/// clipped Gaussian noise. Deterministic for a fixed seed. Rotation by +d
/// moves content from polar angle t to t+d under the row/column angle
/// convention used by the log-polar transform.
inline GrayImage synth_face(std::uint64_t seed, const FaceParams& params, double rotation_deg,
                            double scale, double noise_sigma, std::size_t out_h,
                            std::size_t out_w) {
    if (scale <= 0.0) throw std::invalid_argument("synth_face: scale must be positive");
    if (noise_sigma < 0.0) throw std::invalid_argument("synth_face: noise_sigma must be >= 0");

    GrayImage img(out_h, out_w);
    const double c_row = (static_cast<double>(out_h) - 1.0) / 2.0;
    const double c_col = (static_cast<double>(out_w) - 1.0) / 2.0;
    const double base_c_row = (static_cast<double>(params.height) - 1.0) / 2.0;
    const double base_c_col = (static_cast<double>(params.width) - 1.0) / 2.0;
    const double ang = detail::deg_to_rad(rotation_deg);
    const double ca = std::cos(ang);
    const double sa = std::sin(ang);

    Rng noise = Rng::derive(seed, 0x6e6f697365ull);  // "noise" stream

    for (std::size_t x = 0; x < out_h; ++x) {
        for (std::size_t y = 0; y < out_w; ++y) {
            const double dx = static_cast<double>(x) - c_row;
            const double dy = static_cast<double>(y) - c_col;
            // Inverse map: the output point at angle t samples the base
            // pattern at angle t - rotation, radius / scale.
            const double bx = (dx * ca + dy * sa) / scale + base_c_row;
            const double by = (-dx * sa + dy * ca) / scale + base_c_col;
            double v = detail::face_pattern_value(params, bx, by);
            if (noise_sigma > 0.0) v += noise_sigma * noise.gaussian();
            img.at(x, y) = std::min(1.0, std::max(0.0, v));
        }
    }
    return img;
}

/// Same-frame convenience overload (output dimensions = params dimensions).
inline GrayImage synth_face(std::uint64_t seed, const FaceParams& params, double rotation_deg = 0.0,
                            double scale = 1.0, double noise_sigma = 0.0) {
    return synth_face(seed, params, rotation_deg, scale, noise_sigma, params.height, params.width);
}

/// Deterministic per-subject face template: blob layout and head shape are
/// jittered from (seed, subject) so distinct subjects render distinct faces.
inline FaceParams face_params_for_subject(std::uint64_t seed, std::size_t subject,
                                          std::size_t height = 101, std::size_t width = 101) {
    Rng r = Rng::derive(seed, 0x73756200ull + subject);  // "sub" stream
    FaceParams p;
    p.height = height;
    p.width = width;
    p.head_radius_row = r.uniform(0.36, 0.44);
    p.head_radius_col = r.uniform(0.29, 0.36);
    p.head_level = r.uniform(0.45, 0.60);
    p.edge_softness = r.uniform(4.0, 7.0);

    const double h = static_cast<double>(height);
    const double w = static_cast<double>(width);

    auto jitter_blob = [&](double row_frac, double col_frac, double su, double sv, double amp_lo,
                           double amp_hi) {
        GaussianBlob b;
        b.row = (row_frac + r.uniform(-0.03, 0.03)) * h;
        b.col = (col_frac + r.uniform(-0.03, 0.03)) * w;
        b.sigma_u = su * r.uniform(0.7, 1.4) * h / 101.0;
        b.sigma_v = sv * r.uniform(0.7, 1.4) * w / 101.0;
        b.angle_deg = r.uniform(-25.0, 25.0);
        b.amplitude = r.uniform(amp_lo, amp_hi);
        return b;
    };

    // Eyes, nose, mouth.
    p.blobs.push_back(jitter_blob(-0.16, -0.15, 4.0, 5.5, 0.18, 0.38));
    p.blobs.push_back(jitter_blob(-0.16, 0.15, 4.0, 5.5, 0.18, 0.38));
    p.blobs.push_back(jitter_blob(0.04, 0.0, 7.0, 4.0, -0.35, -0.12));
    p.blobs.push_back(jitter_blob(0.21, 0.0, 3.5, 8.0, 0.15, 0.35));
    // Two distinguishing marks placed anywhere on the head.
    for (int k = 0; k < 2; ++k) {
        GaussianBlob b;
        b.row = r.uniform(-0.28, 0.28) * h;
        b.col = r.uniform(-0.22, 0.22) * w;
        b.sigma_u = r.uniform(2.5, 6.0) * h / 101.0;
        b.sigma_v = r.uniform(2.5, 6.0) * w / 101.0;
        b.angle_deg = r.uniform(-90.0, 90.0);
        b.amplitude = (r.uniform() < 0.5 ? -1.0 : 1.0) * r.uniform(0.10, 0.25);
        p.blobs.push_back(b);
    }
    return p;
}

/// Options for writing a synthetic labeled corpus to disk.
struct CorpusOptions {
    std::size_t subjects = 8;
    std::size_t images_per_subject = 20;
    std::size_t height = 101;
    std::size_t width = 101;
    double rotation_range_deg = 20.0;  // per-image rotation uniform in +-range
    double scale_range = 0.10;         // per-image scale uniform in 1 +- range
    double noise_sigma = 0.01;
    std::uint64_t seed = 1;
};

/// Writes <out>/s00/i000.pgm ... deterministically; per-subject templates come
/// from face_params_for_subject, per-image rotation/scale/noise from derived
/// streams. Returns the number of files written.
inline std::size_t write_synthetic_corpus(const std::filesystem::path& out_dir,
                                          const CorpusOptions& opt) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir))
        throw std::runtime_error("cannot create corpus directory " + out_dir.string());

    std::size_t written = 0;
    char name[32];
    for (std::size_t s = 0; s < opt.subjects; ++s) {
        const FaceParams params = face_params_for_subject(opt.seed, s, opt.height, opt.width);
        std::snprintf(name, sizeof(name), "s%02zu", s);
        const fs::path subject_dir = out_dir / name;
        fs::create_directories(subject_dir, ec);
        if (!fs::is_directory(subject_dir))
            throw std::runtime_error("cannot create subject directory " + subject_dir.string());
        for (std::size_t i = 0; i < opt.images_per_subject; ++i) {
            Rng r = Rng::derive(opt.seed, 0x696d6700ull + s * 100003ull + i);  // "img" stream
            const double rot = r.uniform(-opt.rotation_range_deg, opt.rotation_range_deg);
            const double scl = r.uniform(1.0 - opt.scale_range, 1.0 + opt.scale_range);
            const std::uint64_t noise_seed = opt.seed * 1000003ull + s * 1009ull + i;
            const GrayImage img = synth_face(noise_seed, params, rot, scl, opt.noise_sigma);
            std::snprintf(name, sizeof(name), "i%03zu.pgm", i);
            save_pgm(subject_dir / name, img);
            ++written;
        }
    }
    return written;
}

}  // namespace polarface
