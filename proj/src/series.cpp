#include "vitalcast/series.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vitalcast/errors.hpp"

namespace vitalcast {

void VitalSeries::validate() const {
    if (channel_names.empty() || channel_names[0] != "map")
        throw InputError("series " + patient_id + ": channel 0 must be \"map\"");
    if (!(sampling_interval > 0.0))
        throw InputError("series " + patient_id + ": sampling_interval must be positive");
    if (values.cols() != channel_names.size())
        throw InputError("series " + patient_id + ": values columns != channel count");
    if (valid_mask.size() != values.rows() * values.cols())
        throw InputError("series " + patient_id + ": valid_mask size mismatch");
    for (std::size_t t = 0; t < steps(); ++t) {
        if (!valid(t, 0)) continue;
        const double map = values(t, 0);
        if (!std::isfinite(map) || map < kMapMin || map > kMapMax)
            throw InputError("series " + patient_id + ": observed MAP out of [10,250] at step " +
                             std::to_string(t));
    }
}

void WindowSpec::validate() const {
    if (lookback_steps < 1 || horizon_steps < 1 || stride < 1)
        throw ConfigError("window spec fields must all be >= 1");
}

bool label_hypotension(const std::vector<double>& map_sequence, double sampling_interval,
                       double threshold, double duration_minutes) {
    if (map_sequence.empty()) throw InputError("label_hypotension: empty sequence");
    if (!(sampling_interval > 0.0)) throw InputError("label_hypotension: non-positive interval");
    if (!(threshold > 0.0) || !(duration_minutes > 0.0))
        throw InputError("label_hypotension: threshold and duration must be positive");
    for (double v : map_sequence)
        if (!std::isfinite(v)) throw InputError("label_hypotension: non-finite value");

    const auto needed = static_cast<std::size_t>(
        std::ceil(60.0 * duration_minutes / sampling_interval));
    std::size_t run = 0;
    for (double v : map_sequence) {
        run = (v < threshold) ? run + 1 : 0;
        if (run >= needed) return true;
    }
    return false;
}

std::tuple<std::vector<double>, double, double> znormalize(const std::vector<double>& x) {
    if (x.empty()) throw InputError("znormalize: empty input");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size());
    double std = std::sqrt(var);

    std::vector<double> out(x.size(), 0.0);
    if (std < kEps) return {out, mean, kEps};
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) / std;
    return {out, mean, std};
}

std::vector<Sample> segment_series(const VitalSeries& series, const WindowSpec& spec,
                                   const LabelRule& rule) {
    spec.validate();
    const std::size_t L = spec.lookback_steps;
    const std::size_t H = spec.horizon_steps;
    const std::size_t T = series.steps();
    const std::size_t C = series.channels();

    std::vector<Sample> out;
    if (T < L + H) return out;  // too short: no windows, not an error

    for (std::size_t s = 0; s + L + H <= T; s += spec.stride) {
        bool usable = true;
        for (std::size_t t = s; t < s + L && usable; ++t)
            for (std::size_t c = 0; c < C; ++c)
                if (!series.valid(t, c)) { usable = false; break; }
        for (std::size_t t = s + L; t < s + L + H && usable; ++t)
            if (!series.valid(t, 0)) usable = false;
        if (!usable) continue;

        Sample sample;
        sample.x = Matrix(L, C);
        for (std::size_t t = 0; t < L; ++t)
            for (std::size_t c = 0; c < C; ++c) sample.x(t, c) = series.values(s + t, c);
        sample.y.resize(H);
        for (std::size_t t = 0; t < H; ++t) sample.y[t] = series.values(s + L + t, 0);
        sample.label = label_hypotension(sample.y, series.sampling_interval, rule.threshold_mmhg,
                                         rule.duration_minutes);
        sample.patient_id = series.patient_id;
        sample.start_step = static_cast<std::int64_t>(s);
        out.push_back(std::move(sample));
    }
    return out;
}

std::vector<double> sample_map_vector(const Sample& sample) {
    std::vector<double> v;
    v.reserve(sample.x.rows() + sample.y.size());
    for (std::size_t t = 0; t < sample.x.rows(); ++t) v.push_back(sample.x(t, 0));
    v.insert(v.end(), sample.y.begin(), sample.y.end());
    return v;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

VitalSeries read_series_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());

    std::string line;
    if (!std::getline(in, line)) throw IoError("empty trace file " + file.string());
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "time_s" || header[1] != "map")
        throw InputError(file.string() + ": header must start with time_s,map");

    VitalSeries series;
    series.patient_id = file.stem().string();
    series.channel_names.assign(header.begin() + 1, header.end());
    const std::size_t C = series.channel_names.size();

    std::vector<double> times;
    std::vector<double> flat;
    std::vector<std::uint8_t> mask;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != C + 1)
            throw InputError(file.string() + ":" + std::to_string(line_no) +
                             ": expected " + std::to_string(C + 1) + " fields");
        times.push_back(std::stod(fields[0]));
        for (std::size_t c = 0; c < C; ++c) {
            const std::string& cell = fields[c + 1];
            if (cell.empty()) {
                flat.push_back(std::numeric_limits<double>::quiet_NaN());
                mask.push_back(0);
                continue;
            }
            double v = std::stod(cell);
            // Quality control: out-of-range or non-finite MAP is an artifact,
            // mapped to unobserved rather than kept.
            if (c == 0 && (!std::isfinite(v) || v < kMapMin || v > kMapMax)) {
                flat.push_back(std::numeric_limits<double>::quiet_NaN());
                mask.push_back(0);
            } else {
                flat.push_back(v);
                mask.push_back(1);
            }
        }
    }
    if (times.size() < 2) throw InputError(file.string() + ": need at least two rows");
    if (!std::is_sorted(times.begin(), times.end()))
        throw InputError(file.string() + ": rows not sorted by time_s");

    series.sampling_interval = times[1] - times[0];
    if (!(series.sampling_interval > 0.0))
        throw InputError(file.string() + ": non-increasing time_s");
    for (std::size_t i = 2; i < times.size(); ++i) {
        const double dt = times[i] - times[i - 1];
        if (std::abs(dt - series.sampling_interval) > 1e-6 * series.sampling_interval)
            throw InputError(file.string() + ": non-uniform sampling at row " + std::to_string(i));
    }

    const std::size_t T = times.size();
    series.values = Matrix(T, C);
    series.values.data() = std::move(flat);
    series.valid_mask = std::move(mask);
    series.validate();
    return series;
}

void write_series_csv(const VitalSeries& series, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file.string());
    out << "time_s";
    for (const auto& name : series.channel_names) out << ',' << name;
    out << '\n';
    out.precision(10);
    for (std::size_t t = 0; t < series.steps(); ++t) {
        out << t * series.sampling_interval;
        for (std::size_t c = 0; c < series.channels(); ++c) {
            out << ',';
            if (series.valid(t, c)) out << series.values(t, c);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + file.string());
}

std::vector<VitalSeries> read_cohort_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<VitalSeries> cohort;
    cohort.reserve(files.size());
    for (const auto& f : files) cohort.push_back(read_series_csv(f));
    return cohort;
}

}  // namespace vitalcast
