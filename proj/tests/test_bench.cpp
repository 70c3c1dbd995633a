#include <doctest.h>

#include <fstream>
#include <map>
#include <random>
#include <set>

#include "flower/bench.hpp"
#include "flower/csv.hpp"
#include "flower/error.hpp"
#include "support.hpp"

using namespace flower;

namespace {

LanguagePack english() { return find_pack("en", pack_search_path({})); }

/// Column name -> cells, read straight from a generated CSV.
std::map<std::string, std::vector<Cell>> read_table(const std::filesystem::path& dir, const TableRef& ref) {
    std::ifstream in(dir / (ref.schema.spelling() + "." + ref.table.spelling() + ".csv"));
    REQUIRE(in.good());
    CsvReader reader(in);
    std::vector<Cell> header, row;
    REQUIRE(reader.next(header));
    std::map<std::string, std::vector<Cell>> out;
    while (reader.next(row)) {
        for (std::size_t i = 0; i < header.size(); ++i) out[*header[i]].push_back(row[i]);
    }
    return out;
}

/// Nested-loop join check: every non-null referencing value exists among
/// the keys, the keys are unique and non-null, and every key is referenced.
void check_dependency_by_join(const std::filesystem::path& dir, const DepPair& dep) {
    auto from = read_table(dir, dep.first.table);
    auto to = read_table(dir, dep.second.table);
    const auto& fk = from.at(dep.first.column.spelling());
    const auto& key = to.at(dep.second.column.spelling());
    for (std::size_t a = 0; a < key.size(); ++a) {
        REQUIRE(key[a].has_value());
        for (std::size_t b = a + 1; b < key.size(); ++b) REQUIRE(key[a] != key[b]);
    }
    for (const auto& v : fk) {
        if (!v) continue;
        bool found = false;
        for (const auto& k : key) found = found || k == v;
        CHECK(found);
    }
    for (const auto& k : key) {
        bool referenced = false;
        for (const auto& v : fk) referenced = referenced || v == k;
        CHECK(referenced);
    }
}

DepPair dep(const std::string& from, const std::string& to) { return {parse_column_ref(from), parse_column_ref(to)}; }

GroundTruth truth_of(std::vector<DepPair> deps) {
    std::sort(deps.begin(), deps.end());
    return GroundTruth{deps};
}

}  // namespace

TEST_CASE("generator: one schema, two tables, density 1 plants one covering key") {
    BenchSpec spec;
    spec.tables_per_schema = 2;
    spec.fk_density = 1.0;
    spec.seed = 1;
    testing::TempDir dir;
    auto gt = generate_database(spec, dir.path());
    REQUIRE(gt.deps.size() == 1);
    check_dependency_by_join(dir.path(), gt.deps[0]);
    CHECK(std::filesystem::exists(dir / "schema.sql"));
    CHECK(GroundTruth::load(dir / kGroundTruthFile).deps == gt.deps);
}

TEST_CASE("generator: density 0 plants nothing") {
    BenchSpec spec;
    spec.tables_per_schema = 5;
    spec.fk_density = 0.0;
    testing::TempDir dir;
    CHECK(generate_database(spec, dir.path()).deps.empty());
}

TEST_CASE("generator: byte-identical output for the same spec") {
    BenchSpec spec;
    spec.schemas = 2;
    spec.seed = 77;
    testing::TempDir a, b;
    generate_database(spec, a.path());
    generate_database(spec, b.path());
    std::size_t files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
        auto name = entry.path().filename().string();
        CHECK(testing::read_file(entry.path()) == testing::read_file(b / name));
        ++files;
    }
    CHECK(files == 2 * spec.tables_per_schema + 2);
}

TEST_CASE("generator properties on random specs") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        BenchSpec spec;
        spec.schemas = 1 + rng() % 2;
        spec.tables_per_schema = 1 + rng() % 5;
        spec.columns_min = 2 + rng() % 2;
        spec.columns_max = spec.columns_min + rng() % 3;
        spec.naming = static_cast<NamingStyle>(rng() % 3);
        spec.distribution = static_cast<Distribution>(rng() % 3);
        spec.rows_min = 20;
        spec.rows_max = 200;
        spec.fk_density = static_cast<double>(rng() % 101) / 100.0;
        spec.seed = rng();
        testing::TempDir dir;
        auto gt = generate_database(spec, dir.path());
        CAPTURE(spec.to_json().dump());
        CHECK(std::is_sorted(gt.deps.begin(), gt.deps.end()));
        for (const auto& d : gt.deps) {
            CHECK_FALSE(d.first.table == d.second.table);
            check_dependency_by_join(dir.path(), d);
        }
        CHECK(BenchSpec::from_json(spec.to_json()).to_json() == spec.to_json());
    }
}

TEST_CASE("evaluate_accuracy examples") {
    std::vector<DepPair> gt_pairs;
    for (int i = 0; i < 12; ++i) gt_pairs.push_back(dep("s.t" + std::to_string(i) + ".x", "s.k.id"));
    auto gt = truth_of(gt_pairs);

    SUBCASE("12 true among 15 predicted") {
        auto predicted = gt_pairs;
        for (int i = 0; i < 3; ++i) predicted.push_back(dep("s.u" + std::to_string(i) + ".x", "s.k.id"));
        auto r = evaluate_accuracy(std::span<const DepPair>(predicted), gt);
        // [DERIVED] 12 / 15.
        CHECK(*r.literal_accuracy == doctest::Approx(12.0 / 15.0));
        CHECK(r.precision == doctest::Approx(12.0 / 15.0));
        CHECK(r.recall == 1.0);
        CHECK(r.hallucinated.size() == 3);
        CHECK(r.missed.empty());
    }
    SUBCASE("equal sets") {
        auto r = evaluate_accuracy(std::span<const DepPair>(gt_pairs), gt);
        CHECK(*r.literal_accuracy == 1.0);
        CHECK(r.precision == 1.0);
        CHECK(r.recall == 1.0);
        CHECK(r.f1 == 1.0);
    }
    SUBCASE("disjoint sets of equal size: literal 1, precision 0") {
        std::vector<DepPair> three = {dep("a.b.c", "a.d.e"), dep("a.b.f", "a.d.e"), dep("a.b.g", "a.d.e")};
        std::vector<DepPair> others = {dep("x.b.c", "x.d.e"), dep("x.b.f", "x.d.e"), dep("x.b.g", "x.d.e")};
        auto r = evaluate_accuracy(std::span<const DepPair>(others), truth_of(three));
        CHECK(*r.literal_accuracy == 1.0);
        CHECK(r.precision == 0.0);
        CHECK(r.recall == 0.0);
        CHECK(r.f1 == 0.0);
    }
    SUBCASE("nothing predicted against a non-empty truth is undefined") {
        auto r = evaluate_accuracy(std::span<const DepPair>(), gt);
        CHECK(r.literal_undefined);
        CHECK_FALSE(r.literal_accuracy.has_value());
        CHECK(r.to_json()["literal_accuracy"].is_null());
        CHECK(r.recall == 0.0);
        CHECK(r.missed.size() == 12);
    }
    SUBCASE("duplicates count once") {
        auto doubled = gt_pairs;
        doubled.insert(doubled.end(), gt_pairs.begin(), gt_pairs.end());
        auto r = evaluate_accuracy(std::span<const DepPair>(doubled), gt);
        CHECK(r.predicted_count == 12);
        CHECK(r.precision == 1.0);
    }
}

TEST_CASE("evaluate_accuracy agrees with set arithmetic on random inputs") {
    std::mt19937_64 rng(4);
    std::vector<DepPair> universe;
    for (int i = 0; i < 20; ++i) universe.push_back(dep("s.t" + std::to_string(i) + ".x", "s.k.id"));
    for (int trial = 0; trial < 200; ++trial) {
        std::set<DepPair> g, p;
        for (const auto& d : universe) {
            if (rng() % 3 == 0) g.insert(d);
            if (rng() % 3 == 0) p.insert(d);
        }
        std::vector<DepPair> pv(p.begin(), p.end());
        auto r = evaluate_accuracy(std::span<const DepPair>(pv), truth_of({g.begin(), g.end()}));
        std::size_t tp = 0;
        for (const auto& d : p) tp += g.count(d);
        CHECK(r.matched == tp);
        CHECK(r.hallucinated.size() + tp == p.size());
        CHECK(r.missed.size() + tp == g.size());
        CHECK(r.precision == doctest::Approx(p.empty() ? 0.0 : double(tp) / p.size()));
        CHECK(r.recall == doctest::Approx(g.empty() ? 0.0 : double(tp) / g.size()));
        CHECK(r.f1 >= 0.0);
        CHECK(r.f1 <= 1.0);
        if (!p.empty()) CHECK(*r.literal_accuracy == doctest::Approx(double(g.size()) / p.size()));
    }
}

TEST_CASE("stats-mimic benchmark recovers the planted keys") {
    auto pack = english();
    testing::TempDir dir;
    RunConfig cfg;
    auto result = run_benchmark(BenchSpec::stats_mimic(), cfg, pack, dir.path(), 2);
    CHECK(result.ground_truth.deps.size() == 12);
    CHECK(result.evaluation.recall >= 0.9);
    CHECK(result.sse.launches == 2);
    auto json = result.to_json();
    for (const char* key : {"evaluation", "ground_truth", "run", "spec", "sse"}) CHECK(json.contains(key));

    // A stricter confidence keeps a subset of what the default finds.
    RunConfig strict = cfg;
    strict.inference.confidence = 1.0;
    auto session = open_source(dir.path().string());
    auto loose_run = analyze(*session, cfg, pack);
    auto strict_run = analyze(*session, strict, pack);
    std::set<DepPair> loose, tight;
    for (const auto& d : loose_run.implicit) loose.emplace(d.from, d.to);
    for (const auto& d : strict_run.implicit) tight.emplace(d.from, d.to);
    CHECK(std::includes(loose.begin(), loose.end(), tight.begin(), tight.end()));
}

TEST_CASE("an empty database scores literal 1 and zero precision and recall") {
    BenchSpec spec;
    spec.tables_per_schema = 0;
    testing::TempDir dir;
    auto result = run_benchmark(spec, RunConfig{}, english(), dir.path(), 1);
    CHECK(result.ground_truth.deps.empty());
    CHECK(result.evaluation.predicted_count == 0);
    CHECK(*result.evaluation.literal_accuracy == 1.0);
    CHECK(result.evaluation.precision == 0.0);
    CHECK(result.evaluation.recall == 0.0);
    CHECK(result.evaluation.f1 == 0.0);
}

TEST_CASE("bench spec JSON errors") {
    CHECK_THROWS_AS(BenchSpec::from_json(nlohmann::json::array()), ConfigError);
    CHECK_THROWS_AS(BenchSpec::from_json({{"tables", 3}}), ConfigError);
    CHECK_THROWS_AS(BenchSpec::from_json({{"fk_density", 2.0}}), ConfigError);
    CHECK_THROWS_AS(BenchSpec::from_json({{"preset", "tpch"}}), ConfigError);
    CHECK_THROWS_AS(BenchSpec::from_json({{"naming", "kebab"}}), ConfigError);
    CHECK(BenchSpec::from_json({{"preset", "stats-mimic"}}).preset == "stats-mimic");
    CHECK_THROWS_AS(GroundTruth::from_json({{"dependencies", 3}}), Error);
}
