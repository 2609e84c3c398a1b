#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vitalcast/bank.hpp"
#include "vitalcast/matrix.hpp"
#include "vitalcast/series.hpp"

namespace vitalcast {

struct AugmentConfig {
    bool enabled = true;
    double noise_std_fraction = 0.02;  // of per-channel std
    double time_scale_lo = 0.9;
    double time_scale_hi = 1.1;
    std::uint64_t seed = 0;

    void validate() const;  // 0 < lo <= 1 <= hi, fraction >= 0
};

struct RetrievalConfig {
    std::size_t top_k = 3;
    std::size_t ratio_hypo = 3;
    std::size_t ratio_nonhypo = 4;
    std::size_t max_history_windows = 3;
    AugmentConfig augment;

    void validate() const;
};

/// A bank sample scored against a query.
struct RetrievedSample {
    Sample sample;
    double dtw = 0.0;
    std::size_t query_index = 0;
};

/// One line per (query, subset) lookup, for debugging retrieval behavior.
struct RetrievalLog {
    std::vector<std::string> lines;
};

/// Adaptation set for one TTA step. Own samples come from the patient's
/// history buffer and are never augmented; retrieved samples are balanced
/// and (optionally) augmented bank samples.
struct AdaptationSet {
    std::vector<Sample> own;
    std::vector<Sample> retrieved;
    bool retrieved_augmented = false;

    std::size_t size() const { return own.size() + retrieved.size(); }
    bool empty() const { return own.empty() && retrieved.empty(); }
};

/// Non-overlapping MAP fragments of length L+H taken from the most recent
/// history backward; partial fragments are dropped. Shorter history than one
/// fragment yields an empty list.
std::vector<std::vector<double>> make_queries(const Matrix& history, const WindowSpec& spec);

/// Coarse-to-fine lookup: per query and subset, assign to the nearest
/// centroid (falling back to the next-nearest when a cluster is empty), rank
/// that cluster's members by DTW to the query, keep top_k. Duplicates across
/// queries keep their lowest-distance occurrence; the aggregate is ordered by
/// (distance, patient, start).
std::vector<RetrievedSample> retrieve(const std::vector<std::vector<double>>& queries,
                                      const SampleBank& bank, const RetrievalConfig& cfg,
                                      RetrievalLog* log = nullptr);

/// Largest multiset with hypo:nonhypo counts exactly ratio_hypo:ratio_nonhypo,
/// preferring lower-DTW samples. Empty when the ratio is unattainable.
std::vector<Sample> sample_balance(const std::vector<RetrievedSample>& retrieved,
                                   std::size_t ratio_hypo, std::size_t ratio_nonhypo,
                                   std::uint64_t seed);

/// Gaussian noise plus temporal scaling (linear resample, crop/pad back to
/// length), with labels recomputed from the augmented horizon. Deterministic
/// under cfg.seed; identity when disabled.
std::vector<Sample> augment(const std::vector<Sample>& samples, const AugmentConfig& cfg,
                            const LabelRule& rule, double sampling_interval);

AdaptationSet assemble(std::vector<Sample> own_history_samples,
                       std::vector<Sample> retrieved_balanced_augmented, bool augmented);

}  // namespace vitalcast
