#include "vitalcast/kshape.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vitalcast/distance.hpp"
#include "vitalcast/errors.hpp"
#include "vitalcast/series.hpp"

namespace vitalcast::kshape {

namespace {

std::vector<double> znorm(const std::vector<double>& v) {
    return std::get<0>(znormalize(v));
}

/// Shift a vector so that correlation with the alignment target peaks at lag
/// zero; out-of-range positions are zero-padded.
std::vector<double> shift_vector(const std::vector<double>& v, int shift) {
    const auto m = static_cast<int>(v.size());
    std::vector<double> out(v.size(), 0.0);
    for (int k = 0; k < m; ++k) {
        const int src = k + shift;
        if (src >= 0 && src < m) out[static_cast<std::size_t>(k)] = v[static_cast<std::size_t>(src)];
    }
    return out;
}

/// v <- M v for symmetric M stored dense row-major.
void mat_vec(const std::vector<double>& M, std::size_t n, const std::vector<double>& v,
             std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* row = M.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * v[j];
        out[i] = acc;
    }
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

std::vector<double> shape_extract(const std::vector<std::vector<double>>& members,
                                  const std::vector<double>& reference) {
    if (members.empty()) throw InputError("shape_extract: empty member set");
    const std::size_t n = members.front().size();
    for (const auto& m : members)
        if (m.size() != n) throw InputError("shape_extract: member length mismatch");
    if (reference.size() != n) throw InputError("shape_extract: reference length mismatch");

    // Rows of A: members aligned to the reference, z-normalized.
    std::vector<std::vector<double>> aligned;
    aligned.reserve(members.size());
    for (const auto& m : members) {
        const int shift = ncc_max(m, reference).second;
        aligned.push_back(znorm(shift_vector(m, shift)));
    }

    // S = A^T A, then M = Q S Q with Q = I - ones/n (centering both sides).
    std::vector<double> S(n * n, 0.0);
    for (const auto& row : aligned)
        for (std::size_t i = 0; i < n; ++i) {
            const double ri = row[i];
            if (ri == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) S[i * n + j] += ri * row[j];
        }
    std::vector<double> rowsum(n, 0.0), colsum(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            rowsum[i] += S[i * n + j];
            colsum[j] += S[i * n + j];
            total += S[i * n + j];
        }
    const double nn = static_cast<double>(n);
    std::vector<double> M(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            M[i * n + j] = S[i * n + j] - rowsum[i] / nn - colsum[j] / nn + total / (nn * nn);

    // Principal eigenvector by power iteration. M is PSD so the dominant
    // eigenvalue is the largest one. Fixed-seed start vector, centered to
    // stay out of Q's null space.
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = unif(rng);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= nn;
    for (auto& x : v) x -= mean;
    double nv = norm2(v);
    if (nv < kEps) { v.assign(n, 0.0); v[0] = 1.0; nv = 1.0; }
    for (auto& x : v) x /= nv;

    std::vector<double> w(n);
    for (int iter = 0; iter < 100; ++iter) {
        mat_vec(M, n, v, w);
        const double nw = norm2(w);
        if (nw < kEps) break;  // degenerate member set, keep current direction
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] /= nw;
            delta = std::max(delta, std::abs(w[i] - v[i]));
        }
        v.swap(w);
        if (delta < 1e-8) break;
    }

    // Sign so the centroid correlates non-negatively with the reference.
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += v[i] * reference[i];
    if (dot < 0.0) {
        for (auto& x : v) x = -x;
    } else if (dot == 0.0) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
        if (v[arg] < 0.0)
            for (auto& x : v) x = -x;
    }
    return znorm(v);
}

namespace {

double sbd_cached(const std::vector<double>& za, const std::vector<double>& zb) {
    // Inputs are already z-normalized; SBD reduces to 1 - max NCC.
    return 1.0 - ncc_max(za, zb).first;
}

}  // namespace

KShapeModel fit(const std::vector<std::vector<double>>& samples, std::size_t k,
                std::size_t max_iters, std::uint64_t seed) {
    if (k < 1) throw InputError("kshape::fit: k must be >= 1");
    if (samples.size() < k)
        throw InputError("kshape::fit: fewer samples (" + std::to_string(samples.size()) +
                         ") than clusters (" + std::to_string(k) + ")");
    const std::size_t n = samples.front().size();
    for (const auto& s : samples)
        if (s.size() != n) throw InputError("kshape::fit: sample length mismatch");

    std::vector<std::vector<double>> zsamples;
    zsamples.reserve(samples.size());
    for (const auto& s : samples) zsamples.push_back(znorm(s));

    KShapeModel model;
    model.k = k;
    model.centroids.assign(k, std::vector<double>(n, 0.0));
    model.assignments.resize(samples.size());

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    for (auto& a : model.assignments) a = pick(rng);

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        // Refinement: shape extraction per cluster against its old centroid.
        for (std::size_t j = 0; j < k; ++j) {
            std::vector<std::vector<double>> members;
            for (std::size_t i = 0; i < samples.size(); ++i)
                if (model.assignments[i] == j) members.push_back(samples[i]);
            if (!members.empty())
                model.centroids[j] = shape_extract(members, model.centroids[j]);
        }

        // Re-seed empty clusters with the sample farthest from its centroid,
        // never draining a singleton cluster. Ties take the lowest index.
        std::vector<std::size_t> member_count(k, 0);
        for (auto a : model.assignments) ++member_count[a];
        for (std::size_t j = 0; j < k; ++j) {
            if (member_count[j] > 0) continue;
            double worst = -1.0;
            std::size_t chosen = samples.size();
            for (std::size_t i = 0; i < samples.size(); ++i) {
                if (member_count[model.assignments[i]] < 2) continue;
                const double d = sbd_cached(zsamples[i], model.centroids[model.assignments[i]]);
                if (d > worst) {
                    worst = d;
                    chosen = i;
                }
            }
            if (chosen == samples.size()) continue;  // nothing movable
            --member_count[model.assignments[chosen]];
            model.assignments[chosen] = j;
            ++member_count[j];
            model.centroids[j] = znorm(samples[chosen]);
        }

        // Assignment: argmin SBD, ties to the lowest centroid index.
        bool changed = false;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            std::size_t best_j = 0;
            double best_d = sbd_cached(zsamples[i], model.centroids[0]);
            for (std::size_t j = 1; j < k; ++j) {
                const double d = sbd_cached(zsamples[i], model.centroids[j]);
                if (d < best_d) {
                    best_d = d;
                    best_j = j;
                }
            }
            if (model.assignments[i] != best_j) {
                model.assignments[i] = best_j;
                changed = true;
            }
        }

        double objective = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i)
            objective += sbd_cached(zsamples[i], model.centroids[model.assignments[i]]);
        model.objective_trace.push_back(objective);
        model.iterations_run = iter + 1;
        if (!changed) {
            model.converged = true;
            break;
        }
    }
    return model;
}

std::pair<std::size_t, double> assign(const std::vector<double>& query, const KShapeModel& model) {
    if (model.centroids.empty()) throw InputError("kshape::assign: model has no centroids");
    if (query.size() != model.centroids.front().size())
        throw InputError("kshape::assign: query length mismatch");
    std::size_t best_j = 0;
    double best_d = sbd(query, model.centroids[0]);
    for (std::size_t j = 1; j < model.k; ++j) {
        const double d = sbd(query, model.centroids[j]);
        if (d < best_d) {
            best_d = d;
            best_j = j;
        }
    }
    return {best_j, best_d};
}

}  // namespace vitalcast::kshape
