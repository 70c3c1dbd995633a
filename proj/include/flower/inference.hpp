#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flower/identifier.hpp"
#include "flower/name_nlp.hpp"
#include "flower/sampler.hpp"
#include "flower/schema.hpp"

namespace flower {

/// Balance runs the sampler as configured. Accuracy quadruples rows_min
/// and reads columns of tables under 10 * rows_min in full.
enum class Mode { Balance, Accuracy };

std::string_view to_string(Mode mode);
/// Throws ConfigError for anything but "balance" / "accuracy".
Mode parse_mode(std::string_view text);

struct InferenceConfig {
    double confidence = 0.95;
    double confidence_coeff = 0.05;
    Mode mode = Mode::Balance;
    std::uint64_t rows_min = kDefaultRowsMin;
    std::string language = "en";
    std::uint64_t seed = 0;
    bool same_table_pairs = false;  ///< also pair columns of the same table
    bool pk_fallback = true;        ///< unique columns act as keys in tables without a declared key

    /// Throws ConfigError naming the field and its legal range.
    void validate() const;
};

/// Sampler settings for one column under `mode`.
SamplerConfig effective_sampler_config(Mode mode, const SamplerConfig& base, std::uint64_t rows_all);

/// Everything the pair scoring needs to know about one column.
struct ColumnProfile {
    TableRef table;
    ColumnMeta column;
    bool is_key = false;
    SampleSummary sample;
    SynonymSet synonyms;

    ColumnRef ref() const { return ColumnRef{table, column.name}; }
};

struct ImplicitDep {
    ColumnRef from;
    ColumnRef to;  ///< the key side
    double rows_intersection = 0.0;
    std::size_t synonyms_intersection = 0;
    double adapted_confidence = 0.0;
    std::vector<std::string> criteria_trace;
};

/// |values_i ∩ values_j| / |values_j|, or 0 when values_j is empty.
double rows_intersection(std::span<const std::string> values_i, std::span<const std::string> values_j);

std::size_t synonyms_intersection(const SynonymSet& set_i, const SynonymSet& set_j);

/// confidence - shared * coeff, clamped to [0, 1].
double adapt_confidence(double confidence, double confidence_coeff, std::size_t synonyms_shared);

/// Scores one candidate pair. `side_j` should be the key side; when only
/// `side_i` is a key the sides are swapped. Accepted iff the value overlap
/// reaches the adapted confidence, a side is a key, and pairs without a
/// shared synonym have equal, known type classes.
std::optional<ImplicitDep> evaluate_pair(const ColumnProfile& side_i, const ColumnProfile& side_j,
                                         const InferenceConfig& config);

/// Evaluates every cross-table column pair once (both directions when both
/// sides are keys). Output is sorted by (from, to).
std::vector<ImplicitDep> infer_all(std::span<const ColumnProfile> profiles, const InferenceConfig& config);

/// Drops implicit dependencies whose (from, to) equals a declared one.
/// Direction matters; relative order is kept.
std::vector<ImplicitDep> deduplicate(std::vector<ImplicitDep> implicit, std::span<const ExplicitDep> explicit_deps);

/// Re-checks the stored evidence of an accepted dependency.
bool evidence_consistent(const ImplicitDep& dep);

}  // namespace flower
