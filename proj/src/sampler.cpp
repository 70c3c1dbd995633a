#include "flower/sampler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string_view>
#include <unordered_set>

#include "flower/error.hpp"

namespace flower {

SamplingPolicy SamplingPolicy::parse(std::string_view text) {
    if (text == "literal") return literal();
    if (text == "calibrated") return calibrated();
    if (text == "full") return full();
    if (text.starts_with("fixed:")) {
        auto digits = text.substr(6);
        std::uint64_t n = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec == std::errc() && ptr == digits.data() + digits.size() && n >= 1) return fixed(n);
    }
    throw ConfigError("invalid sampling policy '" + std::string(text) +
                      "': expected literal, calibrated, full or fixed:N with N >= 1");
}

std::string SamplingPolicy::to_string() const {
    switch (kind) {
        case Kind::LiteralEq1: return "literal";
        case Kind::CalibratedTable1: return "calibrated";
        case Kind::FixedReservoir: return "fixed:" + std::to_string(reservoir_size);
        case Kind::Full: return "full";
    }
    return "literal";
}

void SamplerConfig::validate() const {
    if (rows_min < 1) throw ConfigError("rows_min must be >= 1");
    if (policy.kind == SamplingPolicy::Kind::FixedReservoir && policy.reservoir_size < 1) {
        throw ConfigError("fixed reservoir size must be >= 1");
    }
    if (histogram_bins < 1) throw ConfigError("histogram_bins must be >= 1");
}

std::uint64_t compute_sample_size(std::uint64_t rows_all, std::uint64_t rows_uq, const SamplerConfig& config) {
    const auto& policy = config.policy;
    if (policy.kind == SamplingPolicy::Kind::Full) return rows_all;
    if (policy.kind == SamplingPolicy::Kind::FixedReservoir) return std::min(policy.reservoir_size, rows_all);
    if (rows_all <= config.rows_min) return rows_all;

    const double all = static_cast<double>(rows_all);
    const double min = static_cast<double>(config.rows_min);
    double size = 0.0;
    if (policy.kind == SamplingPolicy::Kind::LiteralEq1) {
        const double unique_ratio = static_cast<double>(rows_uq) / all;
        size = min + std::sqrt(unique_ratio * min + all / min);
    } else {
        size = min + all / std::sqrt(min);
    }
    auto truncated = static_cast<std::uint64_t>(std::trunc(size));
    return std::min(truncated, rows_all);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t hash_string(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(rng()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t count_distinct(std::span<const Cell> column) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(column.size());
    for (const auto& cell : column) {
        if (cell) seen.insert(*cell);
    }
    return seen.size();
}

SampleSummary draw_sample(std::span<const Cell> column, std::uint64_t target, std::uint64_t seed) {
    SampleSummary summary;
    summary.rows_all = column.size();
    summary.rows_uq = count_distinct(column);

    Reservoir<std::size_t> reservoir(target, seed);
    for (std::size_t i = 0; i < column.size(); ++i) reservoir.offer(i);

    const auto& picked = reservoir.items();
    summary.rows_sampled = picked.size();
    summary.values.reserve(picked.size());
    for (std::size_t row : picked) {
        if (column[row]) {
            summary.values.push_back(*column[row]);
        } else {
            ++summary.null_count;
        }
    }
    std::sort(summary.values.begin(), summary.values.end());
    summary.values.erase(std::unique(summary.values.begin(), summary.values.end()), summary.values.end());
    return summary;
}

Histogram::Histogram(std::span<const double> population, std::size_t bins) : bins_(bins) {
    if (population.empty() || bins == 0) throw std::invalid_argument("undefined bins");
    auto [lo, hi] = std::minmax_element(population.begin(), population.end());
    min_ = *lo;
    width_ = (*hi - *lo) / static_cast<double>(bins);
    population_ = frequencies(population);
}

std::size_t Histogram::bin_of(double v) const {
    if (width_ <= 0.0 || v <= min_) return 0;
    auto b = static_cast<std::size_t>((v - min_) / width_);
    return std::min(b, bins_ - 1);
}

std::vector<double> Histogram::frequencies(std::span<const double> values) const {
    std::vector<double> freq(bins_, 0.0);
    if (values.empty()) return freq;
    std::vector<std::uint64_t> counts(bins_, 0);
    for (double v : values) ++counts[bin_of(v)];
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < bins_; ++i) freq[i] = static_cast<double>(counts[i]) / n;
    return freq;
}

double Histogram::sse(std::span<const double> sample) const {
    auto freq = frequencies(sample);
    double total = 0.0;
    for (std::size_t i = 0; i < bins_; ++i) {
        const double d = freq[i] - population_[i];
        total += d * d;
    }
    return total;
}

double histogram_sse(std::span<const double> sample, std::span<const double> population, std::size_t bins) {
    return Histogram(population, bins).sse(sample);
}

std::string_view to_string(Distribution d) {
    switch (d) {
        case Distribution::Normal: return "normal";
        case Distribution::Uniform: return "uniform";
        case Distribution::Zipf: return "zipf";
    }
    return "normal";
}

Distribution parse_distribution(std::string_view text) {
    if (text == "normal") return Distribution::Normal;
    if (text == "uniform") return Distribution::Uniform;
    if (text == "zipf") return Distribution::Zipf;
    throw ConfigError("invalid distribution '" + std::string(text) + "': expected normal, uniform or zipf");
}

namespace {

double unit_interval(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<double> generate_population(Distribution dist, std::uint64_t rows, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(rows));
    switch (dist) {
        case Distribution::Uniform:
            for (std::uint64_t i = 0; i < rows; ++i) out.push_back(unit_interval(rng));
            break;
        case Distribution::Normal:
            // Box-Muller, both variates used
            while (out.size() < rows) {
                double u1 = unit_interval(rng);
                double u2 = unit_interval(rng);
                if (u1 <= 0.0) continue;
                double r = std::sqrt(-2.0 * std::log(u1));
                out.push_back(r * std::cos(2.0 * M_PI * u2));
                if (out.size() < rows) out.push_back(r * std::sin(2.0 * M_PI * u2));
            }
            break;
        case Distribution::Zipf: {
            constexpr int kDomain = 1000;
            constexpr double kExponent = 1.1;
            std::vector<double> cdf(kDomain);
            double acc = 0.0;
            for (int k = 1; k <= kDomain; ++k) {
                acc += 1.0 / std::pow(static_cast<double>(k), kExponent);
                cdf[k - 1] = acc;
            }
            for (auto& c : cdf) c /= acc;
            for (std::uint64_t i = 0; i < rows; ++i) {
                double u = unit_interval(rng);
                auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
                out.push_back(static_cast<double>(std::min<std::ptrdiff_t>(it - cdf.begin(), kDomain - 1) + 1));
            }
            break;
        }
    }
    return out;
}

namespace {

std::vector<double> sample_values(std::span<const double> population, std::uint64_t target, std::uint64_t seed) {
    Reservoir<std::uint32_t> reservoir(target, seed);
    for (std::size_t i = 0; i < population.size(); ++i) reservoir.offer(static_cast<std::uint32_t>(i));
    std::vector<double> out;
    out.reserve(reservoir.items().size());
    for (auto idx : reservoir.items()) out.push_back(population[idx]);
    return out;
}

}  // namespace

SseReport run_sse_experiment(Distribution dist, std::uint64_t rows_all, const SamplerConfig& config,
                             std::size_t launches) {
    config.validate();
    if (rows_all > UINT32_MAX) throw ConfigError("sample-eval supports at most 2^32-1 rows");
    if (launches == 0) throw ConfigError("launches must be >= 1");

    const auto population = generate_population(dist, rows_all, mix_seed(config.seed, 0));

    SseReport report;
    report.distribution = std::string(to_string(dist));
    report.policy = config.policy.to_string();
    report.rows_all = rows_all;
    report.rows_min = config.rows_min;
    report.bins = config.histogram_bins;
    report.launches = launches;
    {
        std::vector<double> sorted(population);
        std::sort(sorted.begin(), sorted.end());
        report.rows_uq = static_cast<std::uint64_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    }
    if (population.empty()) return report;

    const Histogram histogram(population, config.histogram_bins);
    SamplerConfig baseline = config;
    baseline.policy = SamplingPolicy::fixed(kBaselineReservoir);
    report.rows_sampled_dynamic = compute_sample_size(rows_all, report.rows_uq, config);
    report.rows_sampled_baseline = compute_sample_size(rows_all, report.rows_uq, baseline);

    for (std::size_t launch = 0; launch < launches; ++launch) {
        const std::uint64_t seed = mix_seed(config.seed, 1 + launch);
        auto dynamic = sample_values(population, report.rows_sampled_dynamic, mix_seed(seed, 1));
        auto fixed = sample_values(population, report.rows_sampled_baseline, mix_seed(seed, 2));
        report.per_launch_dynamic.push_back(histogram.sse(dynamic));
        report.per_launch_baseline.push_back(histogram.sse(fixed));
    }
    const double n = static_cast<double>(launches);
    report.sse_dynamic = std::accumulate(report.per_launch_dynamic.begin(), report.per_launch_dynamic.end(), 0.0) / n;
    report.sse_baseline =
        std::accumulate(report.per_launch_baseline.begin(), report.per_launch_baseline.end(), 0.0) / n;
    return report;
}

}  // namespace flower
