#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "flower/bench.hpp"
#include "flower/catalog.hpp"
#include "flower/error.hpp"
#include "flower/inference.hpp"
#include "flower/pipeline.hpp"
#include "support.hpp"

using namespace flower;

namespace {

std::vector<std::string> range_values(int lo, int hi) {
    std::vector<std::string> v;
    for (int i = lo; i <= hi; ++i) v.push_back(std::to_string(i));
    std::sort(v.begin(), v.end());
    return v;
}

ColumnProfile profile(const std::string& table, const std::string& column, bool key, std::vector<std::string> values,
                      SynonymSet synonyms, TypeClass type = TypeClass::Digits) {
    ColumnProfile p;
    p.table = parse_table_ref(table);
    p.column.name = Identifier(column);
    p.column.type_class = type;
    p.is_key = key;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    p.sample.values = std::move(values);
    p.sample.rows_all = p.sample.rows_sampled = p.sample.rows_uq = p.sample.values.size();
    std::sort(synonyms.begin(), synonyms.end());
    p.synonyms = std::move(synonyms);
    return p;
}

/// Set-based reference for the overlap ratio.
double overlap_oracle(const std::vector<std::string>& i, const std::vector<std::string>& j) {
    if (j.empty()) return 0.0;
    std::set<std::string> si(i.begin(), i.end());
    std::size_t shared = 0;
    for (const auto& v : std::set<std::string>(j.begin(), j.end())) shared += si.count(v);
    return static_cast<double>(shared) / static_cast<double>(std::set<std::string>(j.begin(), j.end()).size());
}

ExplicitDep explicit_dep(const std::string& from, const std::string& to) {
    ExplicitDep e;
    e.from = parse_column_ref(from);
    e.to = parse_column_ref(to);
    return e;
}

ImplicitDep implicit_dep(const std::string& from, const std::string& to) {
    ImplicitDep d;
    d.from = parse_column_ref(from);
    d.to = parse_column_ref(to);
    d.rows_intersection = 1.0;
    d.adapted_confidence = 0.95;
    return d;
}

RunConfig full_sample_config() {
    RunConfig c;
    c.sampler.policy = SamplingPolicy::full();
    return c;
}

LanguagePack english() { return find_pack("en", pack_search_path({})); }

std::set<DepPair> pairs_of(const RunReport& r) {
    std::set<DepPair> out;
    for (const auto& d : r.implicit) out.emplace(d.from, d.to);
    return out;
}

}  // namespace

TEST_CASE("rows_intersection examples") {
    auto i = range_values(1, 4);
    auto j = range_values(3, 6);
    CHECK(overlap_oracle(i, j) == 0.5);
    CHECK(rows_intersection(i, j) == overlap_oracle(i, j));
    CHECK(rows_intersection(range_values(1, 2), range_values(5, 6)) == 0.0);
    CHECK(rows_intersection(range_values(1, 10), range_values(2, 5)) == 1.0);
    CHECK(rows_intersection(range_values(1, 10), std::vector<std::string>{}) == 0.0);
}

TEST_CASE("rows_intersection agrees with the set oracle on random inputs") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 300; ++t) {
        std::vector<std::string> a, b;
        for (int k = 0, n = rng() % 40; k < n; ++k) a.push_back(std::to_string(rng() % 50));
        for (int k = 0, n = rng() % 40; k < n; ++k) b.push_back(std::to_string(rng() % 50));
        auto norm = [](std::vector<std::string> v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            return v;
        };
        a = norm(a);
        b = norm(b);
        double r = rows_intersection(a, b);
        CHECK(r == doctest::Approx(overlap_oracle(a, b)));
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
    }
}

TEST_CASE("synonyms_intersection and adapt_confidence") {
    CHECK(synonyms_intersection({"client", "customer"}, {"client", "x"}) == 1);
    CHECK(synonyms_intersection({"a"}, {"b"}) == 0);
    CHECK(synonyms_intersection({}, {}) == 0);

    // [DERIVED] 0.95 - 0 * 0.05, 0.95 - 2 * 0.05, clamp(0.95 - 100 * 0.05).
    CHECK(adapt_confidence(0.95, 0.05, 0) == doctest::Approx(0.95));
    CHECK(adapt_confidence(0.95, 0.05, 2) == doctest::Approx(0.95 - 2 * 0.05));
    CHECK(adapt_confidence(0.95, 0.05, 100) == 0.0);
    for (std::size_t s = 0; s < 30; ++s) {
        double c = adapt_confidence(0.95, 0.05, s);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
        if (s > 0) CHECK(c <= adapt_confidence(0.95, 0.05, s - 1));
    }
}

TEST_CASE("evaluate_pair accepts a covering foreign key") {
    InferenceConfig cfg;
    auto key = profile("public.customers", "Id", true, range_values(1, 100), {"id"});
    // 97 of the 100 keys referenced.
    auto fk = profile("public.orders", "CustomerId", false, range_values(1, 97), {"customer", "client"});
    auto dep = evaluate_pair(fk, key, cfg);
    REQUIRE(dep.has_value());
    CHECK(dep->from == parse_column_ref("public.orders.CustomerId"));
    CHECK(dep->to == parse_column_ref("public.customers.Id"));
    CHECK(dep->rows_intersection == doctest::Approx(0.97));
    CHECK(dep->synonyms_intersection == 0);
    CHECK(dep->adapted_confidence == doctest::Approx(0.95));
    CHECK(evidence_consistent(*dep));
    CHECK_FALSE(dep->criteria_trace.empty());

    // Sides are swapped when only side_i is the key.
    auto swapped = evaluate_pair(key, fk, cfg);
    REQUIRE(swapped.has_value());
    CHECK(swapped->from == dep->from);
    CHECK(swapped->to == dep->to);
}

TEST_CASE("evaluate_pair rejections") {
    InferenceConfig cfg;
    auto key = profile("public.customers", "Id", true, range_values(1, 100), {"id"});

    SUBCASE("overlap below the threshold") {
        auto fk = profile("public.orders", "CustomerId", false, range_values(1, 90), {"customer"});
        CHECK_FALSE(evaluate_pair(fk, key, cfg).has_value());
    }
    SUBCASE("neither side is a key") {
        auto a = profile("public.a", "x", false, range_values(1, 100), {"x"});
        auto b = profile("public.b", "x", false, range_values(1, 100), {"x"});
        CHECK_FALSE(evaluate_pair(a, b, cfg).has_value());
    }
    SUBCASE("different type classes without shared synonyms") {
        auto fk = profile("public.orders", "Ref", false, range_values(1, 100), {"ref"}, TypeClass::Character);
        CHECK_FALSE(evaluate_pair(fk, key, cfg).has_value());
    }
    SUBCASE("unknown type class never matches") {
        auto k = profile("public.c", "Id", true, range_values(1, 10), {"id"}, TypeClass::Unknown);
        auto f = profile("public.d", "Cid", false, range_values(1, 10), {"cid"}, TypeClass::Unknown);
        CHECK_FALSE(evaluate_pair(f, k, cfg).has_value());
    }
    SUBCASE("a column is never paired with itself") {
        CHECK_FALSE(evaluate_pair(key, key, cfg).has_value());
    }
}

TEST_CASE("shared synonyms lower the bar and lift the type gate") {
    InferenceConfig cfg;
    // [DERIVED] two shared synonyms: threshold 0.85; overlap 0.88 passes.
    auto key = profile("public.customers", "Customer", true, range_values(1, 100), {"client", "customer"});
    auto fk = profile("public.orders", "Client", false, range_values(1, 88), {"client", "customer"}, TypeClass::Character);
    auto dep = evaluate_pair(fk, key, cfg);
    REQUIRE(dep.has_value());
    CHECK(dep->synonyms_intersection == 2);
    CHECK(dep->adapted_confidence == doctest::Approx(0.85));
    CHECK(confidence_label(dep->adapted_confidence) == "0.85");
}

TEST_CASE("infer_all: no self pairs, no same-table pairs by default, sorted") {
    InferenceConfig cfg;
    std::vector<ColumnProfile> profiles = {
        profile("public.a", "Id", true, range_values(1, 20), {"id"}),
        profile("public.a", "Other", false, range_values(1, 20), {"other"}),
        profile("public.b", "AId", false, range_values(1, 20), {"a"}),
        profile("public.c", "AId", false, range_values(1, 20), {"a"}),
    };
    auto deps = infer_all(profiles, cfg);
    for (const auto& d : deps) {
        CHECK_FALSE(d.from == d.to);
        CHECK_FALSE(d.from.table == d.to.table);
        CHECK(evidence_consistent(d));
    }
    CHECK(std::is_sorted(deps.begin(), deps.end(), [](const auto& x, const auto& y) {
        return std::tie(x.from, x.to) < std::tie(y.from, y.to);
    }));
    CHECK(deps.size() == 2);

    cfg.same_table_pairs = true;
    auto with_same = infer_all(profiles, cfg);
    CHECK(with_same.size() == 3);
}

TEST_CASE("deduplicate examples") {
    std::vector<ExplicitDep> declared = {explicit_dep("s.orders.cid", "s.customers.id")};
    std::vector<ImplicitDep> found = {implicit_dep("s.orders.cid", "s.customers.id"),
                                      implicit_dep("s.customers.id", "s.orders.cid"),
                                      implicit_dep("s.items.oid", "s.orders.id")};
    auto kept = deduplicate(found, declared);
    REQUIRE(kept.size() == 2);
    // The reversed pair is a different dependency and stays.
    CHECK(kept[0].from == parse_column_ref("s.customers.id"));
    CHECK(kept[1].from == parse_column_ref("s.items.oid"));

    // Idempotent and disjoint from the declared list.
    auto again = deduplicate(kept, declared);
    CHECK(again.size() == kept.size());
    for (const auto& k : kept) {
        for (const auto& e : declared) CHECK_FALSE((k.from == e.from && k.to == e.to));
    }
    CHECK(deduplicate(found, {}).size() == found.size());
}

TEST_CASE("raising the confidence never adds dependencies (synonyms frozen)") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<ColumnProfile> profiles;
        for (int t = 0; t < 4; ++t) {
            int hi = 20 + static_cast<int>(rng() % 30);
            profiles.push_back(profile("public.t" + std::to_string(t), "Id", true, range_values(1, hi), {"id"}));
            int lo = 1 + static_cast<int>(rng() % 5);
            profiles.push_back(profile("public.t" + std::to_string(t), "Ref", false, range_values(lo, hi - rng() % 5),
                                       {rng() % 2 ? "ref" : "id"}));
        }
        std::set<std::pair<ColumnRef, ColumnRef>> previous;
        bool first = true;
        for (double c : {0.5, 0.7, 0.8, 0.9, 0.95, 1.0}) {
            InferenceConfig cfg;
            cfg.confidence = c;
            std::set<std::pair<ColumnRef, ColumnRef>> now;
            for (const auto& d : infer_all(profiles, cfg)) now.emplace(d.from, d.to);
            if (!first) CHECK(std::includes(previous.begin(), previous.end(), now.begin(), now.end()));
            previous = now;
            first = false;
        }
    }
}

TEST_CASE("orders fixture: one implicit dependency; declared twin has none") {
    auto pack = english();
    RunConfig cfg;
    auto session = open_source(testing::fixture("orders").string());
    auto report = analyze(*session, cfg, pack);
    REQUIRE(report.implicit.size() == 1);
    CHECK(report.implicit[0].from.render() == "public.Orders.CustomerId");
    CHECK(report.implicit[0].to.render() == "public.Customers.Id");

    auto declared = open_source(testing::fixture("orders_declared").string());
    auto declared_report = analyze(*declared, cfg, pack);
    CHECK(declared_report.explicit_deps.size() == 1);
    CHECK(declared_report.implicit.empty());
    // The empty Archive table takes part in nothing.
    for (const auto& d : declared_report.implicit) {
        CHECK(to_lower_ascii(d.from.table.table.spelling()) != "archive");
        CHECK(to_lower_ascii(d.to.table.table.spelling()) != "archive");
    }
}

TEST_CASE("two generated tables with one planted key: exactly that dependency") {
    BenchSpec spec;
    spec.tables_per_schema = 2;
    spec.fk_density = 1.0;
    spec.columns_min = spec.columns_max = 3;
    spec.seed = 4;
    testing::TempDir dir;
    auto gt = generate_database(spec, dir.path());
    REQUIRE(gt.deps.size() == 1);

    auto session = open_source(dir.path().string());
    auto report = analyze(*session, full_sample_config(), english());
    CHECK(pairs_of(report) == std::set<DepPair>(gt.deps.begin(), gt.deps.end()));
}

TEST_CASE("full sampling finds every planted key that covers its target") {
    std::mt19937_64 rng(21);
    auto pack = english();
    for (int trial = 0; trial < 8; ++trial) {
        BenchSpec spec;
        spec.tables_per_schema = 2 + rng() % 4;
        spec.schemas = 1 + rng() % 2;
        spec.fk_density = 0.3 + 0.7 * static_cast<double>(rng() % 100) / 100.0;
        spec.naming = static_cast<NamingStyle>(rng() % 3);
        spec.rows_min = 50;
        spec.rows_max = 400;
        spec.seed = rng();
        testing::TempDir dir;
        auto gt = generate_database(spec, dir.path());
        auto session = open_source(dir.path().string());
        auto report = analyze(*session, full_sample_config(), pack);
        auto found = pairs_of(report);
        CAPTURE(spec.to_json().dump());
        for (const auto& d : gt.deps) CHECK(found.count(d) == 1);
        for (const auto& d : report.implicit) CHECK(evidence_consistent(d));
    }
}

TEST_CASE("configuration validation") {
    CHECK(parse_mode("accuracy") == Mode::Accuracy);
    CHECK_THROWS_AS(parse_mode("fast"), ConfigError);
    InferenceConfig cfg;
    cfg.confidence = 1.2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.confidence_coeff = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    SamplerConfig base;
    auto acc = effective_sampler_config(Mode::Accuracy, base, 1000);
    CHECK(acc.rows_min == 4 * base.rows_min);
    CHECK(effective_sampler_config(Mode::Balance, base, 1000).rows_min == base.rows_min);
}
