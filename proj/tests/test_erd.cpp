#include <doctest.h>

#include <map>
#include <queue>
#include <random>
#include <set>

#include "diagram_grammar.hpp"
#include "flower/erd.hpp"
#include "flower/error.hpp"

using namespace flower;

namespace {

TableMeta table(const std::string& ref, bool empty = false, std::vector<std::string> cols = {"id", "ref_id"}) {
    TableMeta t;
    t.ref = parse_table_ref(ref);
    t.is_empty = empty;
    t.rows_all = empty ? 0 : 10;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        ColumnMeta c;
        c.name = Identifier(cols[i]);
        c.declared_type = "integer";
        c.type_class = TypeClass::Digits;
        c.ordinal = i;
        c.is_primary_key = i == 0;
        t.columns.push_back(c);
    }
    t.primary_key = {Identifier(cols[0])};
    return t;
}

ExplicitDep explicit_dep(const std::string& from, const std::string& to) {
    ExplicitDep e;
    e.from = parse_column_ref(from);
    e.to = parse_column_ref(to);
    return e;
}

ImplicitDep implicit_dep(const std::string& from, const std::string& to, double confidence) {
    ImplicitDep d;
    d.from = parse_column_ref(from);
    d.to = parse_column_ref(to);
    d.rows_intersection = 1.0;
    d.adapted_confidence = confidence;
    return d;
}

/// Random graph over tables t0..t{n-1}; edges t_i.ref_id -> t_j.id.
ErGraph random_graph(std::mt19937_64& rng, std::size_t n) {
    std::vector<TableMeta> tables;
    for (std::size_t i = 0; i < n; ++i) tables.push_back(table("s.t" + std::to_string(i), rng() % 5 == 0));
    std::vector<ExplicitDep> ex;
    std::vector<ImplicitDep> im;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || rng() % 4 != 0) continue;
            std::string from = "s.t" + std::to_string(i) + ".ref_id";
            std::string to = "s.t" + std::to_string(j) + ".id";
            if (rng() % 2) {
                ex.push_back(explicit_dep(from, to));
            } else {
                im.push_back(implicit_dep(from, to, static_cast<double>(rng() % 101) / 100.0));
            }
        }
    }
    return build_graph(tables, ex, im);
}

/// Breadth-first reference for the hop neighbourhood.
std::set<TableRef> bfs_oracle(const ErGraph& g, const std::vector<TableRef>& targets, std::size_t hops) {
    std::map<TableRef, std::set<TableRef>> adj;
    for (const auto& e : g.edges()) {
        adj[e.from.table].insert(e.to.table);
        adj[e.to.table].insert(e.from.table);
    }
    std::map<TableRef, std::size_t> dist;
    std::queue<TableRef> q;
    for (const auto& t : targets) {
        dist[t] = 0;
        q.push(t);
    }
    while (!q.empty()) {
        auto t = q.front();
        q.pop();
        for (const auto& n : adj[t]) {
            if (dist.count(n)) continue;
            dist[n] = dist[t] + 1;
            q.push(n);
        }
    }
    std::set<TableRef> out;
    for (const auto& [t, d] : dist) {
        if (d <= hops) out.insert(t);
    }
    return out;
}

}  // namespace

TEST_CASE("build_graph examples") {
    std::vector<TableMeta> tables = {table("s.customers"), table("s.orders")};
    auto one = build_graph(tables, std::vector<ExplicitDep>{explicit_dep("s.orders.ref_id", "s.customers.id")}, {});
    CHECK(one.nodes().size() == 2);
    REQUIRE(one.edges().size() == 1);
    CHECK(one.edges()[0].kind == EdgeKind::Explicit);
    CHECK_FALSE(one.edges()[0].confidence.has_value());

    std::vector<TableMeta> with_empty = {table("s.customers"), table("s.archive", true)};
    auto isolated = build_graph(with_empty, {}, {});
    REQUIRE(isolated.find(parse_table_ref("s.archive")) != nullptr);
    CHECK(isolated.find(parse_table_ref("s.archive"))->is_empty);
    CHECK(isolated.edges().empty());

    // The same pair found both ways stays as two edges of different kinds.
    auto both = build_graph(tables, std::vector<ExplicitDep>{explicit_dep("s.orders.ref_id", "s.customers.id")},
                            std::vector<ImplicitDep>{implicit_dep("s.orders.ref_id", "s.customers.id", 0.95)});
    REQUIRE(both.edges().size() == 2);
    CHECK(both.edges()[0].kind != both.edges()[1].kind);

    CHECK_THROWS_AS(build_graph(tables, std::vector<ExplicitDep>{explicit_dep("s.orders.ref_id", "s.ghost.id")}, {}),
                    Error);
}

TEST_CASE("confidence labels") {
    CHECK(confidence_label(0.85) == "0.85");
    CHECK(confidence_label(0.95) == "0.95");
    CHECK(confidence_label(1.0) == "1.00");
    CHECK(confidence_label(0.0) == "0.00");
    CHECK(parse_diagram_format("mermaid") == DiagramFormat::Mermaid);
    CHECK_THROWS_AS(parse_diagram_format("svg"), ConfigError);
}

TEST_CASE("empty graph exports in every format") {
    ErGraph g = build_graph({}, {}, {});
    CHECK(grammar::parse_dot(export_graph(g, DiagramFormat::Dot)).nodes.empty());
    CHECK(grammar::parse_mermaid(export_graph(g, DiagramFormat::Mermaid)).edges.empty());
    CHECK(same_graph(import_graph_json(export_graph(g, DiagramFormat::Json)), g));
}

TEST_CASE("DOT and Mermaid exports carry the graph structure") {
    std::vector<TableMeta> tables = {table("s.customers"), table("s.orders"), table("s.archive", true)};
    auto g = build_graph(tables, std::vector<ExplicitDep>{explicit_dep("s.orders.ref_id", "s.customers.id")},
                         std::vector<ImplicitDep>{implicit_dep("s.customers.ref_id", "s.orders.id", 0.85)});

    auto dot = grammar::parse_dot(export_graph(g, DiagramFormat::Dot));
    CHECK(dot.directed);
    CHECK(dot.nodes.size() == 3);
    CHECK(dot.nodes.at("s.archive").at("style") == "dashed");
    CHECK(dot.nodes.at("s.orders").at("style") == "solid");
    REQUIRE(dot.edges.size() == 2);
    int implicit_edges = 0;
    for (const auto& e : dot.edges) {
        if (e.attrs.at("style") == "dashed") {
            ++implicit_edges;
            CHECK(e.attrs.at("label") == "0.85");
            CHECK(e.from == "s.customers");
            CHECK(e.to == "s.orders");
        } else {
            CHECK(e.attrs.count("label") == 0);
        }
    }
    CHECK(implicit_edges == 1);

    auto mm = grammar::parse_mermaid(export_graph(g, DiagramFormat::Mermaid));
    CHECK(mm.nodes.size() == 3);
    REQUIRE(mm.edges.size() == 2);
    std::map<std::string, std::string> id_of;
    for (const auto& [id, label] : mm.nodes) id_of[label] = id;
    CHECK(mm.styles.count(id_of.at("s.archive")) == 1);
    CHECK(mm.styles.at(id_of.at("s.archive")).find("stroke-dasharray") != std::string::npos);
    for (const auto& e : mm.edges) {
        if (e.arrow == "-.->") {
            CHECK(e.label == "0.85");
        } else {
            CHECK(e.arrow == "-->");
        }
    }
}

TEST_CASE("random graphs: JSON round trip and structural exports") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 40; ++t) {
        auto g = random_graph(rng, 1 + rng() % 8);
        auto json = export_graph(g, DiagramFormat::Json);
        CHECK(same_graph(import_graph_json(json), g));
        CHECK(export_graph(g, DiagramFormat::Json) == json);

        auto dot = grammar::parse_dot(export_graph(g, DiagramFormat::Dot));
        CHECK(dot.nodes.size() == g.nodes().size());
        CHECK(dot.edges.size() == g.edges().size());
        auto mm = grammar::parse_mermaid(export_graph(g, DiagramFormat::Mermaid));
        CHECK(mm.nodes.size() == g.nodes().size());
        CHECK(mm.edges.size() == g.edges().size());
        for (const auto& e : g.edges()) {
            CHECK(e.confidence.has_value() == (e.kind == EdgeKind::Implicit));
        }
    }
    CHECK_THROWS_AS(import_graph_json("{\"nodes\": 3}"), Error);
    CHECK_THROWS_AS(import_graph_json("not json"), Error);
}

TEST_CASE("select_context on a star graph") {
    std::vector<TableMeta> tables = {table("s.hub"), table("s.a"), table("s.b"), table("s.c"), table("s.far")};
    std::vector<ExplicitDep> deps = {explicit_dep("s.a.ref_id", "s.hub.id"), explicit_dep("s.b.ref_id", "s.hub.id"),
                                     explicit_dep("s.c.ref_id", "s.hub.id"), explicit_dep("s.far.ref_id", "s.a.id")};
    auto g = build_graph(tables, deps, {});
    std::vector<TableRef> leaf = {parse_table_ref("s.b")};

    CHECK(select_context(g, leaf, 0).entities == leaf);
    CHECK(select_context(g, leaf, 1).entities.size() == 2);
    CHECK(select_context(g, leaf, 2).entities.size() == 4);
    CHECK(select_context(g, leaf, 3).entities.size() == 5);  // diameter from b
    CHECK(select_context(g, leaf, 3).text == render_full_context(g));

    auto one = select_context(g, leaf, 1);
    CHECK(one.text.find("s.b.ref_id -> s.hub.id") != std::string::npos);
    CHECK(one.text.find("s.far") == std::string::npos);
    CHECK(context_size(one.text) < context_size(render_full_context(g)));

    std::vector<TableRef> ghost = {parse_table_ref("s.ghost")};
    CHECK_THROWS_AS(select_context(g, ghost, 1), Error);
}

TEST_CASE("select_context matches breadth-first search and grows with hops") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 40; ++t) {
        auto g = random_graph(rng, 2 + rng() % 8);
        std::vector<TableRef> targets = {g.nodes()[rng() % g.nodes().size()].ref};
        std::size_t previous = 0;
        for (std::size_t hops = 0; hops <= g.nodes().size(); ++hops) {
            auto sel = select_context(g, targets, hops);
            auto oracle = bfs_oracle(g, targets, hops);
            CHECK(std::set<TableRef>(sel.entities.begin(), sel.entities.end()) == oracle);
            CHECK(std::is_sorted(sel.entities.begin(), sel.entities.end()));
            auto size = context_size(sel.text);
            CHECK(size >= previous);
            previous = size;
            CHECK(select_context(g, targets, hops).text == sel.text);
        }
        CHECK(previous <= context_size(render_full_context(g)));
    }
}

TEST_CASE("context_size counts code points") {
    CHECK(context_size("") == 0);
    CHECK(context_size("abc") == 3);
    CHECK(context_size("caf\xc3\xa9") == 4);
}
