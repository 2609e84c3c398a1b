#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace vitalcast {

/// Result of K-Shape clustering over equal-length vectors.
struct KShapeModel {
    std::size_t k = 0;
    std::vector<std::vector<double>> centroids;  // k vectors, each z-normalized
    std::vector<std::size_t> assignments;        // per input sample, in [0, k)
    std::size_t iterations_run = 0;
    bool converged = false;
    /// Total within-cluster SBD after each full (refine + assign) iteration.
    std::vector<double> objective_trace;

    friend bool operator==(const KShapeModel&, const KShapeModel&) = default;
};

namespace kshape {

/// K-Shape centroid refinement: members are aligned to `reference` at their
/// best cross-correlation shift (zero-padded), z-normalized into rows of A,
/// and the returned centroid is the principal eigenvector of Q (A^T A) Q with
/// Q the centering projector, sign-matched to the reference, z-normalized.
std::vector<double> shape_extract(const std::vector<std::vector<double>>& members,
                                  const std::vector<double>& reference);

/// Seeded K-Shape: random initial assignment, then alternating refinement and
/// argmin-SBD assignment until assignments stop changing or max_iters passes.
/// Deterministic for fixed (samples, k, max_iters, seed).
KShapeModel fit(const std::vector<std::vector<double>>& samples, std::size_t k,
                std::size_t max_iters, std::uint64_t seed);

/// Nearest centroid by SBD (ties to the lowest index) and its distance.
std::pair<std::size_t, double> assign(const std::vector<double>& query,
                                      const KShapeModel& model);

}  // namespace kshape
}  // namespace vitalcast
