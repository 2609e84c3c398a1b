#include "vitalcast/distance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "vitalcast/errors.hpp"
#include "vitalcast/series.hpp"

namespace vitalcast {

double dtw_distance(std::span<const double> a, std::span<const double> b, const DtwConfig& cfg) {
    if (a.empty() || b.empty()) throw InputError("dtw_distance: empty input");
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    const std::size_t len_diff = n > m ? n - m : m - n;
    if (cfg.band_radius && len_diff > *cfg.band_radius)
        throw InputError("dtw_distance: band radius smaller than length difference");

    const double inf = std::numeric_limits<double>::infinity();
    // Two-row DP over the (n+1) x (m+1) cumulative-cost table.
    std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        std::fill(cur.begin(), cur.end(), inf);
        std::size_t jlo = 1, jhi = m;
        if (cfg.band_radius) {
            const auto r = static_cast<std::ptrdiff_t>(*cfg.band_radius);
            const auto ii = static_cast<std::ptrdiff_t>(i);
            jlo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, ii - r));
            jhi = static_cast<std::size_t>(
                std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(m), ii + r));
        }
        for (std::size_t j = jlo; j <= jhi; ++j) {
            const double d = a[i - 1] - b[j - 1];
            const double best = std::min({prev[j], cur[j - 1], prev[j - 1]});
            cur[j] = d * d + best;
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double dtw_multichannel(const Matrix& a, const Matrix& b, const DtwConfig& cfg) {
    if (a.cols() != b.cols()) throw InputError("dtw_multichannel: channel count mismatch");
    if (cfg.channel_mode == ChannelMode::map_only) {
        const auto ca = a.column(0);
        const auto cb = b.column(0);
        return dtw_distance(ca, cb, cfg);
    }
    double total = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        const auto ca = a.column(c);
        const auto cb = b.column(c);
        total += dtw_distance(ca, cb, cfg);
    }
    return total;
}

std::pair<double, int> ncc_max(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InputError("ncc_max: length mismatch");
    if (a.empty()) throw InputError("ncc_max: empty input");
    const auto m = static_cast<int>(a.size());

    double na = 0.0, nb = 0.0;
    for (double v : a) na += v * v;
    for (double v : b) nb += v * v;
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na < kEps || nb < kEps) return {0.0, 0};

    // Zero-padded cross-correlation at lag s: sum_k a[k+s] * b[k].
    auto corr_at = [&](int s) {
        double sum = 0.0;
        const int klo = std::max(0, -s);
        const int khi = std::min(m, m - s);
        for (int k = klo; k < khi; ++k) sum += a[static_cast<std::size_t>(k + s)] * b[static_cast<std::size_t>(k)];
        return sum;
    };

    // Visit shifts in tie-preference order: 0, -1, +1, -2, +2, ... and keep
    // strict improvements only, so ties resolve to the smallest |shift| with
    // negative first.
    double best = corr_at(0);
    int best_shift = 0;
    for (int mag = 1; mag < m; ++mag) {
        for (int s : {-mag, mag}) {
            const double v = corr_at(s);
            if (v > best) {
                best = v;
                best_shift = s;
            }
        }
    }
    return {best / (na * nb), best_shift};
}

double sbd(std::span<const double> a, std::span<const double> b) {
    const auto [za, ma, sa] = znormalize(std::vector<double>(a.begin(), a.end()));
    const auto [zb, mb, sb_] = znormalize(std::vector<double>(b.begin(), b.end()));
    return 1.0 - ncc_max(za, zb).first;
}

}  // namespace vitalcast
