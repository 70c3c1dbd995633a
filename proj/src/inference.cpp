#include "flower/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <tuple>

#include "flower/error.hpp"

namespace flower {

std::string_view to_string(Mode mode) { return mode == Mode::Accuracy ? "accuracy" : "balance"; }

Mode parse_mode(std::string_view text) {
    if (text == "balance") return Mode::Balance;
    if (text == "accuracy") return Mode::Accuracy;
    throw ConfigError("invalid mode '" + std::string(text) + "': expected balance or accuracy");
}

void InferenceConfig::validate() const {
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
        throw ConfigError("confidence must be within [0, 1], got " + std::to_string(confidence));
    }
    if (!(confidence_coeff > 0.0) || !std::isfinite(confidence_coeff)) {
        throw ConfigError("confidence_coeff must be > 0, got " + std::to_string(confidence_coeff));
    }
    if (rows_min < 1) throw ConfigError("rows_min must be >= 1");
    if (language.empty()) throw ConfigError("language code must not be empty");
}

SamplerConfig effective_sampler_config(Mode mode, const SamplerConfig& base, std::uint64_t rows_all) {
    SamplerConfig out = base;
    if (mode == Mode::Accuracy) {
        if (rows_all < 10 * base.rows_min) {
            out.policy = SamplingPolicy::full();
        }
        out.rows_min = base.rows_min * 4;
    }
    return out;
}

namespace {

template <typename Range>
std::size_t intersection_size(const Range& a, const Range& b) {
    std::size_t count = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

std::vector<std::string> sorted_unique(std::span<const std::string> values) {
    std::vector<std::string> out(values.begin(), values.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool is_sorted_unique(std::span<const std::string> values) {
    return std::adjacent_find(values.begin(), values.end(),
                              [](const std::string& a, const std::string& b) { return !(a < b); }) == values.end();
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

double rows_intersection(std::span<const std::string> values_i, std::span<const std::string> values_j) {
    if (!is_sorted_unique(values_i) || !is_sorted_unique(values_j)) {
        auto a = sorted_unique(values_i);
        auto b = sorted_unique(values_j);
        return rows_intersection(a, b);
    }
    if (values_j.empty()) return 0.0;
    return static_cast<double>(intersection_size(values_i, values_j)) / static_cast<double>(values_j.size());
}

std::size_t synonyms_intersection(const SynonymSet& set_i, const SynonymSet& set_j) {
    if (!is_sorted_unique(set_i) || !is_sorted_unique(set_j)) {
        auto a = sorted_unique(set_i);
        auto b = sorted_unique(set_j);
        return intersection_size(a, b);
    }
    return intersection_size(set_i, set_j);
}

double adapt_confidence(double confidence, double confidence_coeff, std::size_t synonyms_shared) {
    double adapted = confidence - static_cast<double>(synonyms_shared) * confidence_coeff;
    return std::clamp(adapted, 0.0, 1.0);
}

std::optional<ImplicitDep> evaluate_pair(const ColumnProfile& side_i, const ColumnProfile& side_j,
                                         const InferenceConfig& config) {
    if (!side_j.is_key && !side_i.is_key) return std::nullopt;
    const ColumnProfile& from = side_j.is_key ? side_i : side_j;
    const ColumnProfile& to = side_j.is_key ? side_j : side_i;
    if (from.ref() == to.ref()) return std::nullopt;

    ImplicitDep dep;
    dep.from = from.ref();
    dep.to = to.ref();
    dep.synonyms_intersection = synonyms_intersection(from.synonyms, to.synonyms);
    dep.adapted_confidence = adapt_confidence(config.confidence, config.confidence_coeff, dep.synonyms_intersection);
    dep.rows_intersection = rows_intersection(from.sample.values, to.sample.values);

    if (dep.rows_intersection < dep.adapted_confidence) return std::nullopt;
    if (dep.synonyms_intersection == 0) {
        const TypeClass a = from.column.type_class;
        const TypeClass b = to.column.type_class;
        if (a != b || a == TypeClass::Unknown) return std::nullopt;
    }

    dep.criteria_trace.push_back("rows_intersection " + fixed4(dep.rows_intersection) + " >= confidence " +
                                 fixed4(dep.adapted_confidence));
    dep.criteria_trace.push_back(std::string("primary key: ") + (from.is_key ? "both sides" : "to side"));
    if (dep.synonyms_intersection == 0) {
        dep.criteria_trace.push_back("same type class: " + std::string(to_string(to.column.type_class)));
    } else {
        dep.criteria_trace.push_back("shared synonyms: " + std::to_string(dep.synonyms_intersection));
    }
    // Inclusion of the referencing side into the key side, for diagnostics.
    double from_inclusion = from.sample.values.empty()
                                ? 0.0
                                : static_cast<double>(intersection_size(from.sample.values, to.sample.values)) /
                                      static_cast<double>(from.sample.values.size());
    dep.criteria_trace.push_back("from_inclusion " + fixed4(from_inclusion));
    return dep;
}

std::vector<ImplicitDep> infer_all(std::span<const ColumnProfile> profiles, const InferenceConfig& config) {
    config.validate();
    std::vector<ImplicitDep> out;
    for (std::size_t a = 0; a < profiles.size(); ++a) {
        for (std::size_t b = a + 1; b < profiles.size(); ++b) {
            const auto& pa = profiles[a];
            const auto& pb = profiles[b];
            if (pa.table == pb.table && (!config.same_table_pairs || pa.column.name == pb.column.name)) continue;
            if (pa.sample.rows_all == 0 || pb.sample.rows_all == 0) continue;
            if (!pa.is_key && !pb.is_key) continue;
            if (pa.is_key && pb.is_key) {
                if (auto dep = evaluate_pair(pa, pb, config)) out.push_back(std::move(*dep));
                if (auto dep = evaluate_pair(pb, pa, config)) out.push_back(std::move(*dep));
            } else if (auto dep = evaluate_pair(pa, pb, config)) {
                out.push_back(std::move(*dep));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const ImplicitDep& x, const ImplicitDep& y) {
        return std::tie(x.from, x.to) < std::tie(y.from, y.to);
    });
    return out;
}

std::vector<ImplicitDep> deduplicate(std::vector<ImplicitDep> implicit, std::span<const ExplicitDep> explicit_deps) {
    std::set<std::pair<ColumnRef, ColumnRef>> declared;
    for (const auto& e : explicit_deps) declared.emplace(e.from, e.to);
    std::erase_if(implicit, [&](const ImplicitDep& d) { return declared.count({d.from, d.to}) > 0; });
    return implicit;
}

bool evidence_consistent(const ImplicitDep& dep) {
    return dep.rows_intersection >= dep.adapted_confidence && dep.adapted_confidence >= 0.0 &&
           dep.adapted_confidence <= 1.0 && dep.rows_intersection <= 1.0 && !(dep.from == dep.to);
}

}  // namespace flower
