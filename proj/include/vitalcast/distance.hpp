#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "vitalcast/matrix.hpp"

namespace vitalcast {

enum class ChannelMode { map_only, sum_per_channel };

struct DtwConfig {
    /// Sakoe-Chiba band |i-j| <= band_radius; absent = unconstrained.
    std::optional<std::size_t> band_radius;
    ChannelMode channel_mode = ChannelMode::map_only;
};

/// Exact dynamic-programming DTW with squared point cost. Paths are monotone,
/// boundary-anchored and continuity-respecting (steps right/down/diagonal).
double dtw_distance(std::span<const double> a, std::span<const double> b,
                    const DtwConfig& cfg = {});

/// map_only: DTW on channel 0. sum_per_channel: sum of per-channel DTW.
double dtw_multichannel(const Matrix& a, const Matrix& b, const DtwConfig& cfg = {});

/// Maximum zero-padded cross-correlation over shifts in [-m+1, m-1], divided
/// by ||a||*||b||. Ties go to the smallest |shift|, negative before positive.
/// A degenerate norm (< kEps) yields (0, 0).
std::pair<double, int> ncc_max(std::span<const double> a, std::span<const double> b);

/// Shape-based distance: 1 - ncc_max of the z-normalized inputs. Range [0, 2];
/// invariant to positive affine transforms of either argument.
double sbd(std::span<const double> a, std::span<const double> b);

}  // namespace vitalcast
