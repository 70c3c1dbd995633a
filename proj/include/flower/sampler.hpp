#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flower/csv.hpp"

namespace flower {

/// How many rows of a column to sample once it exceeds rows_min.
///
/// LiteralEq1 evaluates rows_min + sqrt(rows_uq / rows_all * rows_min +
/// rows_all / rows_min). CalibratedTable1 evaluates rows_min + rows_all /
/// sqrt(rows_min), which tracks the published sampled-row counts for large
/// columns; the literal formula grows far slower. FixedReservoir(n) always
/// takes n rows and Full takes every row.
struct SamplingPolicy {
    enum class Kind { LiteralEq1, CalibratedTable1, FixedReservoir, Full };

    Kind kind = Kind::LiteralEq1;
    std::uint64_t reservoir_size = 0;  ///< FixedReservoir only

    static SamplingPolicy literal() { return {Kind::LiteralEq1, 0}; }
    static SamplingPolicy calibrated() { return {Kind::CalibratedTable1, 0}; }
    static SamplingPolicy fixed(std::uint64_t n) { return {Kind::FixedReservoir, n}; }
    static SamplingPolicy full() { return {Kind::Full, 0}; }

    /// "literal", "calibrated", "fixed:N" or "full"; throws ConfigError.
    static SamplingPolicy parse(std::string_view text);
    std::string to_string() const;

    friend bool operator==(const SamplingPolicy&, const SamplingPolicy&) = default;
};

inline constexpr std::uint64_t kDefaultRowsMin = 15000;
inline constexpr std::uint64_t kBaselineReservoir = 30000;

struct SamplerConfig {
    std::uint64_t rows_min = kDefaultRowsMin;
    SamplingPolicy policy;
    std::uint64_t seed = 0;
    std::size_t histogram_bins = 50;

    /// Throws ConfigError when rows_min or a reservoir size is zero.
    void validate() const;
};

/// Rows to sample from a column. Dynamic policies return rows_all when
/// rows_all <= rows_min; fractional sizes truncate toward zero and the
/// result never exceeds rows_all.
std::uint64_t compute_sample_size(std::uint64_t rows_all, std::uint64_t rows_uq, const SamplerConfig& config);

/// 64-bit mixing (splitmix64 finalizer), for deriving per-stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t hash_string(std::string_view text);

/// Uniform integer in [0, bound) via Lemire's multiply-shift rejection.
/// Same sequence on every platform for the same generator state.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Single-pass uniform sampling without replacement (Algorithm R).
template <typename T>
class Reservoir {
public:
    Reservoir(std::uint64_t capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {
        items_.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(capacity, 1u << 20)));
    }

    void offer(const T& item) {
        if (seen_ < capacity_) {
            items_.push_back(item);
        } else {
            std::uint64_t j = uniform_below(rng_, seen_ + 1);
            if (j < capacity_) items_[static_cast<std::size_t>(j)] = item;
        }
        ++seen_;
    }

    const std::vector<T>& items() const { return items_; }
    std::vector<T> take() && { return std::move(items_); }
    std::uint64_t seen() const { return seen_; }

private:
    std::uint64_t capacity_;
    std::uint64_t seen_ = 0;
    std::mt19937_64 rng_;
    std::vector<T> items_;
};

struct SampleSummary {
    std::uint64_t rows_all = 0;
    std::uint64_t rows_uq = 0;       ///< distinct non-null values in the whole column
    std::uint64_t rows_sampled = 0;  ///< rows drawn, NULLs included
    std::uint64_t null_count = 0;    ///< NULLs among the drawn rows
    std::vector<std::string> values; ///< sorted distinct non-null sampled values
};

/// Exact number of distinct non-null values.
std::uint64_t count_distinct(std::span<const Cell> column);

/// Draws min(target, rows) rows uniformly without replacement in one pass
/// over `column`; deterministic for a fixed seed.
SampleSummary draw_sample(std::span<const Cell> column, std::uint64_t target, std::uint64_t seed);

/// Equal-width histogram whose bin edges come from a population's range.
class Histogram {
public:
    /// Throws std::invalid_argument ("undefined bins") on an empty
    /// population or zero bins.
    Histogram(std::span<const double> population, std::size_t bins);

    std::size_t bins() const { return bins_; }
    /// Normalized bin frequencies of `values`; out-of-range values clamp
    /// into the edge bins. All zeros for an empty input.
    std::vector<double> frequencies(std::span<const double> values) const;
    const std::vector<double>& population_frequencies() const { return population_; }

    /// Sum over bins of the squared difference between the sample's and
    /// the population's normalized frequency.
    double sse(std::span<const double> sample) const;

private:
    std::size_t bin_of(double v) const;

    std::size_t bins_;
    double min_ = 0.0;
    double width_ = 0.0;
    std::vector<double> population_;
};

double histogram_sse(std::span<const double> sample, std::span<const double> population, std::size_t bins);

enum class Distribution { Normal, Uniform, Zipf };

std::string_view to_string(Distribution d);
/// Throws ConfigError for anything but normal, uniform or zipf.
Distribution parse_distribution(std::string_view text);

/// Synthetic column: standard normal, uniform on [0, 1), or Zipf(s = 1.1)
/// over the integers 1..1000.
std::vector<double> generate_population(Distribution dist, std::uint64_t rows, std::uint64_t seed);

struct SseReport {
    std::string distribution;
    std::string policy;
    std::uint64_t rows_all = 0;
    std::uint64_t rows_uq = 0;
    std::uint64_t rows_min = 0;
    std::size_t bins = 0;
    std::size_t launches = 0;
    std::uint64_t rows_sampled_dynamic = 0;
    std::uint64_t rows_sampled_baseline = 0;
    double sse_dynamic = 0.0;   ///< mean over launches
    double sse_baseline = 0.0;  ///< mean over launches
    std::vector<double> per_launch_dynamic;
    std::vector<double> per_launch_baseline;
};

/// Samples the same synthetic column with the configured policy and with a
/// FixedReservoir(30000) baseline, `launches` times each, and averages the
/// histogram SSE of each against the full column.
SseReport run_sse_experiment(Distribution dist, std::uint64_t rows_all, const SamplerConfig& config,
                             std::size_t launches = 10);

}  // namespace flower
