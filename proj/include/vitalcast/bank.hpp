#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vitalcast/kshape.hpp"
#include "vitalcast/series.hpp"

namespace vitalcast {

/// Cross-sample store, partitioned by hypotension label, with one fitted
/// K-Shape model per subset. Immutable once built; safe for concurrent reads.
struct SampleBank {
    WindowSpec spec;
    LabelRule rule;
    std::vector<Sample> samples_hypo;
    std::vector<Sample> samples_nonhypo;
    KShapeModel model_hypo;
    KShapeModel model_nonhypo;
    /// Per subset, per cluster: indices into the subset's sample list.
    std::vector<std::vector<std::size_t>> members_hypo;
    std::vector<std::vector<std::size_t>> members_nonhypo;

    friend bool operator==(const SampleBank& a, const SampleBank& b) {
        return a.spec.lookback_steps == b.spec.lookback_steps &&
               a.spec.horizon_steps == b.spec.horizon_steps && a.spec.stride == b.spec.stride &&
               a.rule.threshold_mmhg == b.rule.threshold_mmhg &&
               a.rule.duration_minutes == b.rule.duration_minutes &&
               a.samples_hypo == b.samples_hypo && a.samples_nonhypo == b.samples_nonhypo &&
               a.model_hypo == b.model_hypo && a.model_nonhypo == b.model_nonhypo &&
               a.members_hypo == b.members_hypo && a.members_nonhypo == b.members_nonhypo;
    }
};

/// Segments every series, splits by label, fits one K-Shape model per subset
/// (clustering on the MAP channel of the concatenated lookback+horizon), and
/// records cluster membership. Throws ConfigError naming the subset when it
/// holds fewer samples than its k.
SampleBank build_bank(const std::vector<VitalSeries>& cohort, const WindowSpec& spec,
                      std::size_t k_hypo, std::size_t k_nonhypo, std::uint64_t seed,
                      const LabelRule& rule = {});

void save_bank(const SampleBank& bank, const std::filesystem::path& file);
SampleBank load_bank(const std::filesystem::path& file);

}  // namespace vitalcast
