#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

#include "vitalcast/matrix.hpp"

namespace vitalcast {

/// Guard used whenever a standard deviation or a norm can degenerate to zero.
inline constexpr double kEps = 1e-8;

/// Observed MAP values outside this range are treated as sensor artifacts.
inline constexpr double kMapMin = 10.0;
inline constexpr double kMapMax = 250.0;

/// One patient's multivariate vital-sign recording, uniformly sampled.
/// Channel 0 is always "map" (mean arterial pressure, mmHg); unobserved cells
/// carry valid=false and must never be read as data.
struct VitalSeries {
    std::string patient_id;
    std::vector<std::string> channel_names;  // channel_names[0] == "map"
    double sampling_interval = 0.0;          // seconds per step, > 0
    Matrix values;                           // T x C
    std::vector<std::uint8_t> valid_mask;    // T x C, row-major, 1 = observed

    std::size_t steps() const { return values.rows(); }
    std::size_t channels() const { return values.cols(); }
    bool valid(std::size_t t, std::size_t c) const { return valid_mask[t * channels() + c] != 0; }

    /// Throws InputError if any structural invariant is violated.
    void validate() const;
};

/// Sliding-window geometry shared by segmentation, the bank, and the TTA loop.
struct WindowSpec {
    std::size_t lookback_steps = 0;  // L
    std::size_t horizon_steps = 0;   // H
    std::size_t stride = 1;

    std::size_t window_steps() const { return lookback_steps + horizon_steps; }
    void validate() const;  // throws ConfigError on non-positive fields
};

/// Clinical labeling rule: MAP strictly below threshold for at least
/// duration_minutes of wall time.
struct LabelRule {
    double threshold_mmhg = 65.0;
    double duration_minutes = 1.0;
};

/// A (lookback, horizon) training/evaluation pair cut from one patient.
struct Sample {
    Matrix x;                // L x C
    std::vector<double> y;   // H MAP values, mmHg
    bool label = false;      // hypotensive horizon
    std::string patient_id;  // provenance
    std::int64_t start_step = 0;

    friend bool operator==(const Sample& a, const Sample& b) {
        return a.x == b.x && a.y == b.y && a.label == b.label &&
               a.patient_id == b.patient_id && a.start_step == b.start_step;
    }
};

/// True iff a contiguous run of values strictly below `threshold` spans at
/// least `duration_minutes` of wall time. Steps are counted with ceil so a
/// partial-step duration never under-counts.
bool label_hypotension(const std::vector<double>& map_sequence, double sampling_interval,
                       double threshold = 65.0, double duration_minutes = 1.0);

/// Z-normalize to zero mean / unit population std. A near-constant input
/// (std < kEps) maps to the zero vector and the std is reported as kEps.
std::tuple<std::vector<double>, double, double> znormalize(const std::vector<double>& x);

/// Cut a series into samples at starts {0, stride, 2*stride, ...} with
/// start + L + H <= T. A window is skipped when any value the sample would
/// carry (lookback rows on all channels, horizon rows on MAP) is unobserved.
std::vector<Sample> segment_series(const VitalSeries& series, const WindowSpec& spec,
                                   const LabelRule& rule = {});

/// MAP channel of the concatenated (lookback, horizon) window, length L+H.
/// This is the vector clustering and retrieval operate on.
std::vector<double> sample_map_vector(const Sample& sample);

// CSV trace format: header `time_s,map,<channel>...`, rows sorted by time_s,
// empty cells = unobserved. One file per patient, named `<patient_id>.csv`.
VitalSeries read_series_csv(const std::filesystem::path& file);
void write_series_csv(const VitalSeries& series, const std::filesystem::path& file);

/// Reads every `*.csv` in the directory, sorted by filename.
std::vector<VitalSeries> read_cohort_dir(const std::filesystem::path& dir);

}  // namespace vitalcast
