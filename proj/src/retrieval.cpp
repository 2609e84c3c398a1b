#include "vitalcast/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "vitalcast/distance.hpp"
#include "vitalcast/errors.hpp"

namespace vitalcast {

void AugmentConfig::validate() const {
    if (!(time_scale_lo > 0.0) || time_scale_lo > 1.0 || time_scale_hi < 1.0)
        throw ConfigError("augment: require 0 < lo <= 1 <= hi");
    if (noise_std_fraction < 0.0) throw ConfigError("augment: negative noise fraction");
}

void RetrievalConfig::validate() const {
    if (top_k < 1) throw ConfigError("retrieval: top_k must be >= 1");
    if (ratio_hypo < 1 || ratio_nonhypo < 1) throw ConfigError("retrieval: ratios must be >= 1");
    if (max_history_windows < 1) throw ConfigError("retrieval: max_history_windows must be >= 1");
    augment.validate();
}

std::vector<std::vector<double>> make_queries(const Matrix& history, const WindowSpec& spec) {
    spec.validate();
    const std::size_t n = spec.window_steps();
    const std::size_t m = history.rows();
    std::vector<std::vector<double>> queries;
    if (m < n) return queries;
    for (std::size_t i = 0; (i + 1) * n <= m; ++i) {
        const std::size_t start = m - (i + 1) * n;
        std::vector<double> q(n);
        for (std::size_t t = 0; t < n; ++t) q[t] = history(start + t, 0);
        queries.push_back(std::move(q));
    }
    return queries;
}

namespace {

struct ProvenanceLess {
    bool operator()(const Sample& a, const Sample& b) const {
        return std::tie(a.patient_id, a.start_step) < std::tie(b.patient_id, b.start_step);
    }
};

void retrieve_subset(const std::vector<double>& query, std::size_t query_index,
                     const KShapeModel& model, const std::vector<std::vector<std::size_t>>& members,
                     const std::vector<Sample>& samples, std::size_t top_k, const char* subset_name,
                     std::vector<RetrievedSample>& out, RetrievalLog* log) {
    // Coarse step: centroid ranking by SBD.
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(model.k);
    for (std::size_t j = 0; j < model.k; ++j)
        order.emplace_back(sbd(query, model.centroids[j]), j);
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::size_t cluster = order.front().second;
    bool fallback = false;
    for (const auto& [dist, j] : order) {
        if (!members[j].empty()) {
            cluster = j;
            break;
        }
        fallback = true;
    }

    // Fine step: DTW ranking within the chosen cluster.
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(members[cluster].size());
    for (std::size_t idx : members[cluster])
        ranked.emplace_back(dtw_distance(query, sample_map_vector(samples[idx])), idx);
    std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        const Sample& sa = samples[a.second];
        const Sample& sb = samples[b.second];
        return std::tie(sa.patient_id, sa.start_step) < std::tie(sb.patient_id, sb.start_step);
    });
    const std::size_t take = std::min(top_k, ranked.size());

    if (log) {
        std::ostringstream line;
        line << "query=" << query_index << " subset=" << subset_name << " cluster=" << cluster
             << " sbd=" << order.front().first << " fallback=" << (fallback ? 1 : 0) << " picks=";
        for (std::size_t i = 0; i < take; ++i) {
            const Sample& s = samples[ranked[i].second];
            if (i) line << ';';
            line << s.patient_id << ':' << s.start_step << ':' << ranked[i].first;
        }
        log->lines.push_back(line.str());
    }

    for (std::size_t i = 0; i < take; ++i)
        out.push_back({samples[ranked[i].second], ranked[i].first, query_index});
}

}  // namespace

std::vector<RetrievedSample> retrieve(const std::vector<std::vector<double>>& queries,
                                      const SampleBank& bank, const RetrievalConfig& cfg,
                                      RetrievalLog* log) {
    cfg.validate();
    const std::size_t n = bank.spec.window_steps();
    for (const auto& q : queries)
        if (q.size() != n) throw InputError("retrieve: query length != bank window length");

    std::vector<RetrievedSample> raw;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        if (!bank.samples_hypo.empty())
            retrieve_subset(queries[qi], qi, bank.model_hypo, bank.members_hypo,
                            bank.samples_hypo, cfg.top_k, "hypo", raw, log);
        if (!bank.samples_nonhypo.empty())
            retrieve_subset(queries[qi], qi, bank.model_nonhypo, bank.members_nonhypo,
                            bank.samples_nonhypo, cfg.top_k, "nonhypo", raw, log);
    }

    // Deduplicate by provenance, keeping the lowest-distance occurrence.
    std::map<std::pair<std::string, std::int64_t>, std::size_t> best;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto key = std::make_pair(raw[i].sample.patient_id, raw[i].sample.start_step);
        auto [it, inserted] = best.emplace(key, i);
        if (!inserted && raw[i].dtw < raw[it->second].dtw) it->second = i;
    }
    std::vector<RetrievedSample> out;
    out.reserve(best.size());
    for (const auto& [key, idx] : best) out.push_back(raw[idx]);
    std::sort(out.begin(), out.end(), [](const RetrievedSample& a, const RetrievedSample& b) {
        if (a.dtw != b.dtw) return a.dtw < b.dtw;
        return std::tie(a.sample.patient_id, a.sample.start_step) <
               std::tie(b.sample.patient_id, b.sample.start_step);
    });
    return out;
}

std::vector<Sample> sample_balance(const std::vector<RetrievedSample>& retrieved,
                                   std::size_t ratio_hypo, std::size_t ratio_nonhypo,
                                   std::uint64_t /*seed*/) {
    if (ratio_hypo < 1 || ratio_nonhypo < 1)
        throw ConfigError("sample_balance: ratios must be positive");

    std::vector<const RetrievedSample*> hypo, nonhypo;
    for (const auto& r : retrieved) (r.sample.label ? hypo : nonhypo).push_back(&r);
    auto by_distance = [](const RetrievedSample* a, const RetrievedSample* b) {
        if (a->dtw != b->dtw) return a->dtw < b->dtw;
        return std::tie(a->sample.patient_id, a->sample.start_step) <
               std::tie(b->sample.patient_id, b->sample.start_step);
    };
    std::sort(hypo.begin(), hypo.end(), by_distance);
    std::sort(nonhypo.begin(), nonhypo.end(), by_distance);

    const std::size_t t = std::min(hypo.size() / ratio_hypo, nonhypo.size() / ratio_nonhypo);
    std::vector<Sample> out;
    out.reserve(t * (ratio_hypo + ratio_nonhypo));
    for (std::size_t i = 0; i < t * ratio_hypo; ++i) out.push_back(hypo[i]->sample);
    for (std::size_t i = 0; i < t * ratio_nonhypo; ++i) out.push_back(nonhypo[i]->sample);
    return out;
}

namespace {

/// Linear resample to new_len, exact copy when lengths match.
std::vector<double> resample(const std::vector<double>& src, std::size_t new_len) {
    if (new_len == src.size()) return src;
    std::vector<double> out(new_len);
    if (src.size() == 1 || new_len == 1) {
        std::fill(out.begin(), out.end(), src.front());
        return out;
    }
    const double step = static_cast<double>(src.size() - 1) / static_cast<double>(new_len - 1);
    for (std::size_t i = 0; i < new_len; ++i) {
        const double pos = i * step;
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, src.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        out[i] = src[lo] * (1.0 - frac) + src[hi] * frac;
    }
    return out;
}

/// Scale the time axis by `factor`, then crop or edge-pad back to the
/// original length.
std::vector<double> time_scale(const std::vector<double>& src, double factor) {
    const std::size_t target = src.size();
    const auto scaled_len =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(target * factor)));
    std::vector<double> scaled = resample(src, scaled_len);
    if (scaled.size() >= target) {
        scaled.resize(target);
        return scaled;
    }
    std::vector<double> out = std::move(scaled);
    out.resize(target, out.back());
    return out;
}

double channel_std(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(v.size()));
}

}  // namespace

std::vector<Sample> augment(const std::vector<Sample>& samples, const AugmentConfig& cfg,
                            const LabelRule& rule, double sampling_interval) {
    cfg.validate();
    if (!cfg.enabled) return samples;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> scale_dist(cfg.time_scale_lo, cfg.time_scale_hi);

    std::vector<Sample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        Sample a = s;
        const double factor = scale_dist(rng);

        for (std::size_t c = 0; c < a.x.cols(); ++c) {
            auto col = a.x.column(c);
            col = time_scale(col, factor);
            const double sd = channel_std(col) * cfg.noise_std_fraction;
            if (sd > 0.0) {
                std::normal_distribution<double> noise(0.0, sd);
                for (auto& v : col) v += noise(rng);
            }
            for (std::size_t t = 0; t < a.x.rows(); ++t) a.x(t, c) = col[t];
        }

        a.y = time_scale(a.y, factor);
        const double sdy = channel_std(a.y) * cfg.noise_std_fraction;
        if (sdy > 0.0) {
            std::normal_distribution<double> noise(0.0, sdy);
            for (auto& v : a.y) v += noise(rng);
        }
        a.label = label_hypotension(a.y, sampling_interval, rule.threshold_mmhg,
                                    rule.duration_minutes);
        out.push_back(std::move(a));
    }
    return out;
}

AdaptationSet assemble(std::vector<Sample> own_history_samples,
                       std::vector<Sample> retrieved_balanced_augmented, bool augmented) {
    AdaptationSet set;
    set.own = std::move(own_history_samples);
    set.retrieved = std::move(retrieved_balanced_augmented);
    set.retrieved_augmented = augmented;
    return set;
}

}  // namespace vitalcast
