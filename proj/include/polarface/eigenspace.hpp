#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarface/image.hpp"
#include "polarface/linalg.hpp"

namespace polarface {

/// Orthonormal face-space basis built from training images: the mean face
/// plus the top-U unit-norm principal directions of the mean-centered set,
/// in descending eigenvalue order. Immutable after construction; an empty
/// basis means the training set had rank zero (all images identical).
struct EigenSpace {
    std::size_t dim = 0;   // image vector length D = side * side
    std::size_t side = 0;  // images are side x side
    std::vector<double> mean_face;
    std::vector<std::vector<double>> basis;  // U vectors, each of length dim
    std::vector<double> eigenvalues;         // U values, non-increasing, >= 0
    double variance_keep = 0.95;

    std::size_t u() const { return basis.size(); }
};

/// Projection coefficients of one image in a given eigenspace.
struct FeatureVector {
    std::vector<double> coords;

    std::size_t size() const { return coords.size(); }
    bool operator==(const FeatureVector& other) const = default;
};

/// Builds the eigenspace by the snapshot method: eigendecompose the P x P
/// inner-product matrix L = A^T A of the centered image columns, then map
/// each eigenvector v up through u = A v (normalized). U is the smallest
/// count whose eigenvalue mass reaches `variance_keep`, capped by `max_u`
/// and by P-1; zero-eigenvalue directions are never included. Each basis
/// vector is flipped so its largest-magnitude component is positive.
inline EigenSpace build_eigenspace(const std::vector<GrayImage>& images,
                                   double variance_keep = 0.95,
                                   std::optional<std::size_t> max_u = std::nullopt) {
    if (images.size() < 2)
        throw std::invalid_argument("build_eigenspace: need at least 2 images, got " +
                                    std::to_string(images.size()));
    if (variance_keep <= 0.0 || variance_keep > 1.0)
        throw std::invalid_argument("build_eigenspace: variance_keep must be in (0, 1]");
    const std::size_t p = images.size();
    const std::size_t d = images[0].size();
    for (const auto& img : images) {
        if (!img.same_shape(images[0]))
            throw std::invalid_argument("build_eigenspace: image dimensions differ: " +
                                        std::to_string(images[0].height) + "x" +
                                        std::to_string(images[0].width) + " vs " +
                                        std::to_string(img.height) + "x" +
                                        std::to_string(img.width));
    }

    EigenSpace space;
    space.dim = d;
    space.side = images[0].height;
    space.variance_keep = variance_keep;

    space.mean_face.assign(d, 0.0);
    for (const auto& img : images)
        for (std::size_t k = 0; k < d; ++k) space.mean_face[k] += img.pixels[k];
    for (double& m : space.mean_face) m /= static_cast<double>(p);

    // Centered columns, kept as rows here for locality.
    std::vector<std::vector<double>> centered(p, std::vector<double>(d));
    for (std::size_t c = 0; c < p; ++c)
        for (std::size_t k = 0; k < d; ++k)
            centered[c][k] = images[c].pixels[k] - space.mean_face[k];

    Mat inner(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            const double v = dot(centered[i], centered[j]);
            inner(i, j) = v;
            inner(j, i) = v;
        }

    const SymmetricEigen eig = jacobi_eigendecompose(inner);

    const double lead = std::max(eig.values.empty() ? 0.0 : eig.values[0], 0.0);
    const double floor = std::max(lead * 1e-12, 1e-18);
    std::vector<double> positive;
    for (double lambda : eig.values)
        if (lambda > floor) positive.push_back(lambda);
    std::size_t rank = std::min(positive.size(), p - 1);

    double total = 0.0;
    for (std::size_t k = 0; k < rank; ++k) total += positive[k];
    std::size_t keep = rank;
    double mass = 0.0;
    for (std::size_t k = 0; k < rank; ++k) {
        mass += positive[k];
        if (mass >= variance_keep * total) {
            keep = k + 1;
            break;
        }
    }
    if (max_u) keep = std::min(keep, *max_u);

    for (std::size_t k = 0; k < keep; ++k) {
        std::vector<double> u(d, 0.0);
        for (std::size_t c = 0; c < p; ++c) {
            const double w = eig.vectors(c, k);
            for (std::size_t i = 0; i < d; ++i) u[i] += w * centered[c][i];
        }
        const double len = norm(u);
        if (len <= 0.0) continue;
        for (double& x : u) x /= len;

        std::size_t imax = 0;
        for (std::size_t i = 1; i < d; ++i)
            if (std::abs(u[i]) > std::abs(u[imax])) imax = i;
        if (u[imax] < 0.0)
            for (double& x : u) x = -x;

        space.basis.push_back(std::move(u));
        space.eigenvalues.push_back(std::max(eig.values[k], 0.0));
    }
    return space;
}

/// Coordinates of an image in face space: w_k = u_k . (x - mean).
inline FeatureVector project(const GrayImage& img, const EigenSpace& space) {
    if (img.size() != space.dim)
        throw std::invalid_argument("project: image has " + std::to_string(img.size()) +
                                    " pixels, eigenspace expects " + std::to_string(space.dim));
    FeatureVector fv;
    fv.coords.resize(space.u());
    for (std::size_t k = 0; k < space.u(); ++k) {
        double s = 0.0;
        const auto& u = space.basis[k];
        for (std::size_t i = 0; i < space.dim; ++i)
            s += u[i] * (img.pixels[i] - space.mean_face[i]);
        fv.coords[k] = s;
    }
    return fv;
}

/// mean + sum of w_k u_k. Diagnostic; values may leave [0, 1] and are not
/// clamped.
inline std::vector<double> reconstruct(const FeatureVector& fv, const EigenSpace& space) {
    if (fv.size() != space.u())
        throw std::invalid_argument("reconstruct: feature vector has " +
                                    std::to_string(fv.size()) + " coords, eigenspace has " +
                                    std::to_string(space.u()));
    std::vector<double> out = space.mean_face;
    for (std::size_t k = 0; k < space.u(); ++k) {
        const double w = fv.coords[k];
        const auto& u = space.basis[k];
        for (std::size_t i = 0; i < space.dim; ++i) out[i] += w * u[i];
    }
    return out;
}

}  // namespace polarface
