#include "vitalcast/bank.hpp"

#include <string>

#include "vitalcast/binio.hpp"
#include "vitalcast/errors.hpp"

namespace vitalcast {

namespace {

constexpr char kBankMagic[4] = {'V', 'C', 'B', 'K'};
constexpr std::uint32_t kBankVersion = 1;
constexpr std::size_t kKShapeMaxIters = 100;

KShapeModel fit_subset(const std::vector<Sample>& samples, std::size_t k, std::uint64_t seed,
                       const char* subset_name) {
    if (samples.size() < k)
        throw ConfigError(std::string("build_bank: subset \"") + subset_name + "\" has " +
                          std::to_string(samples.size()) + " samples, fewer than k=" +
                          std::to_string(k));
    std::vector<std::vector<double>> vectors;
    vectors.reserve(samples.size());
    for (const auto& s : samples) vectors.push_back(sample_map_vector(s));
    return kshape::fit(vectors, k, kKShapeMaxIters, seed);
}

std::vector<std::vector<std::size_t>> membership(const KShapeModel& model) {
    std::vector<std::vector<std::size_t>> members(model.k);
    for (std::size_t i = 0; i < model.assignments.size(); ++i)
        members[model.assignments[i]].push_back(i);
    return members;
}

void put_sample(BinaryWriter& w, const Sample& s) {
    w.u64(s.x.rows());
    w.u64(s.x.cols());
    w.f64_vec(s.x.data());
    w.f64_vec(s.y);
    w.u8(s.label ? 1 : 0);
    w.str(s.patient_id);
    w.u64(static_cast<std::uint64_t>(s.start_step));
}

Sample get_sample(BinaryReader& r) {
    Sample s;
    const auto rows = r.u64();
    const auto cols = r.u64();
    s.x = Matrix(rows, cols);
    s.x.data() = r.f64_vec();
    if (s.x.data().size() != rows * cols) throw TruncatedError("sample matrix size mismatch");
    s.y = r.f64_vec();
    s.label = r.u8() != 0;
    s.patient_id = r.str();
    s.start_step = static_cast<std::int64_t>(r.u64());
    return s;
}

void put_model(BinaryWriter& w, const KShapeModel& m) {
    w.u64(m.k);
    for (const auto& c : m.centroids) w.f64_vec(c);
    w.u64(m.assignments.size());
    for (auto a : m.assignments) w.u64(a);
    w.u64(m.iterations_run);
    w.u8(m.converged ? 1 : 0);
    w.f64_vec(m.objective_trace);
}

KShapeModel get_model(BinaryReader& r) {
    KShapeModel m;
    m.k = r.u64();
    m.centroids.resize(m.k);
    for (auto& c : m.centroids) c = r.f64_vec();
    m.assignments.resize(r.u64());
    for (auto& a : m.assignments) a = r.u64();
    m.iterations_run = r.u64();
    m.converged = r.u8() != 0;
    m.objective_trace = r.f64_vec();
    return m;
}

}  // namespace

SampleBank build_bank(const std::vector<VitalSeries>& cohort, const WindowSpec& spec,
                      std::size_t k_hypo, std::size_t k_nonhypo, std::uint64_t seed,
                      const LabelRule& rule) {
    if (cohort.empty()) throw ConfigError("build_bank: empty cohort");
    spec.validate();

    SampleBank bank;
    bank.spec = spec;
    bank.rule = rule;
    for (const auto& series : cohort)
        for (auto& sample : segment_series(series, spec, rule)) {
            if (sample.label)
                bank.samples_hypo.push_back(std::move(sample));
            else
                bank.samples_nonhypo.push_back(std::move(sample));
        }

    bank.model_hypo = fit_subset(bank.samples_hypo, k_hypo, seed, "hypo");
    bank.model_nonhypo = fit_subset(bank.samples_nonhypo, k_nonhypo, seed + 1, "nonhypo");
    bank.members_hypo = membership(bank.model_hypo);
    bank.members_nonhypo = membership(bank.model_nonhypo);
    return bank;
}

void save_bank(const SampleBank& bank, const std::filesystem::path& file) {
    BinaryWriter w;
    w.u64(bank.spec.lookback_steps);
    w.u64(bank.spec.horizon_steps);
    w.u64(bank.spec.stride);
    w.f64(bank.rule.threshold_mmhg);
    w.f64(bank.rule.duration_minutes);
    w.u64(bank.samples_hypo.size());
    for (const auto& s : bank.samples_hypo) put_sample(w, s);
    w.u64(bank.samples_nonhypo.size());
    for (const auto& s : bank.samples_nonhypo) put_sample(w, s);
    put_model(w, bank.model_hypo);
    put_model(w, bank.model_nonhypo);
    w.save(file, kBankMagic, kBankVersion);
}

SampleBank load_bank(const std::filesystem::path& file) {
    BinaryReader r = BinaryReader::load(file, kBankMagic);
    if (r.version() != kBankVersion)
        throw VersionError(file.string() + ": bank format version " + std::to_string(r.version()) +
                           ", expected " + std::to_string(kBankVersion));
    SampleBank bank;
    bank.spec.lookback_steps = r.u64();
    bank.spec.horizon_steps = r.u64();
    bank.spec.stride = r.u64();
    bank.rule.threshold_mmhg = r.f64();
    bank.rule.duration_minutes = r.f64();
    bank.samples_hypo.resize(r.u64());
    for (auto& s : bank.samples_hypo) s = get_sample(r);
    bank.samples_nonhypo.resize(r.u64());
    for (auto& s : bank.samples_nonhypo) s = get_sample(r);
    bank.model_hypo = get_model(r);
    bank.model_nonhypo = get_model(r);
    bank.members_hypo.resize(bank.model_hypo.k);
    for (std::size_t i = 0; i < bank.model_hypo.assignments.size(); ++i)
        bank.members_hypo[bank.model_hypo.assignments[i]].push_back(i);
    bank.members_nonhypo.resize(bank.model_nonhypo.k);
    for (std::size_t i = 0; i < bank.model_nonhypo.assignments.size(); ++i)
        bank.members_nonhypo[bank.model_nonhypo.assignments[i]].push_back(i);
    return bank;
}

}  // namespace vitalcast
