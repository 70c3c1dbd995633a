#include "flower/erd.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "flower/error.hpp"

namespace flower {

namespace {

auto edge_key(const ErEdge& e) { return std::tie(e.from, e.to, e.kind); }

}  // namespace

ErGraph::ErGraph(std::vector<ErNode> nodes, std::vector<ErEdge> edges) : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    std::sort(nodes_.begin(), nodes_.end(), [](const ErNode& a, const ErNode& b) { return a.ref < b.ref; });
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (nodes_[i].ref == nodes_[i - 1].ref) throw Error("duplicate entity " + nodes_[i].ref.render());
    }
    for (const auto& e : edges_) {
        for (const ColumnRef* end : {&e.from, &e.to}) {
            if (!find(end->table)) {
                throw Error("edge " + e.from.render() + " -> " + e.to.render() + " references unknown entity " +
                            end->table.render());
            }
        }
        if (e.kind == EdgeKind::Implicit && !e.confidence) {
            throw Error("implicit edge " + e.from.render() + " -> " + e.to.render() + " has no confidence");
        }
        if (e.kind == EdgeKind::Explicit && e.confidence) {
            throw Error("explicit edge " + e.from.render() + " -> " + e.to.render() + " carries a confidence");
        }
    }
    std::sort(edges_.begin(), edges_.end(), [](const ErEdge& a, const ErEdge& b) { return edge_key(a) < edge_key(b); });
    edges_.erase(std::unique(edges_.begin(), edges_.end(),
                             [](const ErEdge& a, const ErEdge& b) { return edge_key(a) == edge_key(b); }),
                 edges_.end());
}

const ErNode* ErGraph::find(const TableRef& ref) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), ref,
                               [](const ErNode& n, const TableRef& r) { return n.ref < r; });
    return (it != nodes_.end() && it->ref == ref) ? &*it : nullptr;
}

std::vector<TableRef> ErGraph::neighbours(const TableRef& ref) const {
    std::set<TableRef> out;
    for (const auto& e : edges_) {
        if (e.from.table == ref && !(e.to.table == ref)) out.insert(e.to.table);
        if (e.to.table == ref && !(e.from.table == ref)) out.insert(e.from.table);
    }
    return {out.begin(), out.end()};
}

bool same_graph(const ErGraph& a, const ErGraph& b) {
    auto node_eq = [](const ErNode& x, const ErNode& y) {
        return x.ref.render() == y.ref.render() && x.is_empty == y.is_empty && x.columns == y.columns;
    };
    auto edge_eq = [](const ErEdge& x, const ErEdge& y) {
        return x.from.render() == y.from.render() && x.to.render() == y.to.render() && x.kind == y.kind &&
               x.confidence == y.confidence;
    };
    return std::equal(a.nodes().begin(), a.nodes().end(), b.nodes().begin(), b.nodes().end(), node_eq) &&
           std::equal(a.edges().begin(), a.edges().end(), b.edges().begin(), b.edges().end(), edge_eq);
}

ErGraph build_graph(std::span<const TableMeta> tables, std::span<const ExplicitDep> explicit_deps,
                    std::span<const ImplicitDep> implicit_deps) {
    std::vector<ErNode> nodes;
    for (const auto& t : tables) {
        ErNode node{t.ref, t.is_empty, {}};
        for (const auto& c : t.columns) node.columns.push_back(ErColumn{c.name, c.declared_type, c.is_primary_key});
        nodes.push_back(std::move(node));
    }
    std::vector<ErEdge> edges;
    for (const auto& d : explicit_deps) edges.push_back(ErEdge{d.from, d.to, EdgeKind::Explicit, std::nullopt});
    for (const auto& d : implicit_deps) edges.push_back(ErEdge{d.from, d.to, EdgeKind::Implicit, d.adapted_confidence});
    return ErGraph(std::move(nodes), std::move(edges));
}

std::string_view to_string(DiagramFormat format) {
    switch (format) {
        case DiagramFormat::Dot: return "dot";
        case DiagramFormat::Mermaid: return "mermaid";
        case DiagramFormat::Json: return "json";
    }
    return "dot";
}

DiagramFormat parse_diagram_format(std::string_view text) {
    if (text == "dot") return DiagramFormat::Dot;
    if (text == "mermaid") return DiagramFormat::Mermaid;
    if (text == "json") return DiagramFormat::Json;
    throw ConfigError("invalid diagram format '" + std::string(text) + "': expected dot, mermaid or json");
}

std::string confidence_label(double confidence) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", confidence);
    return buf;
}

namespace {

std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string mermaid_text(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"') {
            out += "#quot;";
        } else {
            out += c;
        }
    }
    return out;
}

std::string export_dot(const ErGraph& graph) {
    std::ostringstream out;
    out << "digraph erd {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=box];\n";
    for (const auto& n : graph.nodes()) {
        out << "  " << dot_quote(n.ref.render()) << " [label=" << dot_quote(n.ref.render())
            << ", style=" << (n.is_empty ? "dashed" : "solid") << "];\n";
    }
    for (const auto& e : graph.edges()) {
        out << "  " << dot_quote(e.from.table.render()) << " -> " << dot_quote(e.to.table.render()) << " [style=";
        if (e.kind == EdgeKind::Explicit) {
            out << "solid";
        } else {
            out << "dashed, label=" << dot_quote(confidence_label(*e.confidence));
        }
        out << ", taillabel=" << dot_quote(e.from.column.render()) << ", headlabel=" << dot_quote(e.to.column.render())
            << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::string export_mermaid(const ErGraph& graph) {
    std::ostringstream out;
    out << "flowchart LR\n";
    std::map<TableRef, std::string> ids;
    for (std::size_t i = 0; i < graph.nodes().size(); ++i) {
        const auto& n = graph.nodes()[i];
        std::string id = "n" + std::to_string(i);
        ids[n.ref] = id;
        out << "    " << id << "[\"" << mermaid_text(n.ref.render()) << "\"]\n";
    }
    for (const auto& n : graph.nodes()) {
        if (n.is_empty) out << "    style " << ids[n.ref] << " stroke-dasharray: 5 5\n";
    }
    for (const auto& e : graph.edges()) {
        out << "    " << ids[e.from.table];
        if (e.kind == EdgeKind::Explicit) {
            out << " -->|\"" << mermaid_text(e.from.column.render() + " -> " + e.to.column.render()) << "\"| ";
        } else {
            out << " -.->|\"" << confidence_label(*e.confidence) << "\"| ";
        }
        out << ids[e.to.table] << "\n";
    }
    return out.str();
}

nlohmann::ordered_json graph_to_json(const ErGraph& graph) {
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& n : graph.nodes()) {
        nlohmann::ordered_json cols = nlohmann::ordered_json::array();
        for (const auto& c : n.columns) {
            cols.push_back({{"name", c.name.render()}, {"primary_key", c.primary_key}, {"type", c.type}});
        }
        nodes.push_back({{"columns", cols}, {"empty", n.is_empty}, {"table", n.ref.render()}});
    }
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (const auto& e : graph.edges()) {
        nlohmann::ordered_json j;
        if (e.confidence) j["confidence"] = *e.confidence;
        j["from"] = e.from.render();
        j["kind"] = e.kind == EdgeKind::Explicit ? "explicit" : "implicit";
        j["to"] = e.to.render();
        edges.push_back(std::move(j));
    }
    return {{"edges", edges}, {"nodes", nodes}};
}

Identifier parse_single_identifier(const std::string& text) {
    auto parts = parse_qualified_name(text);
    if (parts.size() != 1) throw Error("expected a single identifier, got " + text);
    return parts[0];
}

}  // namespace

std::string export_graph(const ErGraph& graph, DiagramFormat format) {
    switch (format) {
        case DiagramFormat::Dot: return export_dot(graph);
        case DiagramFormat::Mermaid: return export_mermaid(graph);
        case DiagramFormat::Json: return graph_to_json(graph).dump(2) + "\n";
    }
    return {};
}

ErGraph import_graph_json(std::string_view document) {
    try {
        auto j = nlohmann::json::parse(document);
        std::vector<ErNode> nodes;
        for (const auto& jn : j.at("nodes")) {
            ErNode node;
            node.ref = parse_table_ref(jn.at("table").get<std::string>());
            node.is_empty = jn.at("empty").get<bool>();
            for (const auto& jc : jn.at("columns")) {
                node.columns.push_back(ErColumn{parse_single_identifier(jc.at("name").get<std::string>()),
                                                jc.at("type").get<std::string>(), jc.at("primary_key").get<bool>()});
            }
            nodes.push_back(std::move(node));
        }
        std::vector<ErEdge> edges;
        for (const auto& je : j.at("edges")) {
            ErEdge edge;
            edge.from = parse_column_ref(je.at("from").get<std::string>());
            edge.to = parse_column_ref(je.at("to").get<std::string>());
            auto kind = je.at("kind").get<std::string>();
            if (kind == "explicit") {
                edge.kind = EdgeKind::Explicit;
            } else if (kind == "implicit") {
                edge.kind = EdgeKind::Implicit;
            } else {
                throw Error("unknown edge kind " + kind);
            }
            if (je.contains("confidence")) edge.confidence = je.at("confidence").get<double>();
            edges.push_back(std::move(edge));
        }
        return ErGraph(std::move(nodes), std::move(edges));
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed graph document: ") + e.what());
    }
}

namespace {

std::string render_selection(const ErGraph& graph, const std::set<TableRef>& selected) {
    std::string out;
    for (const auto& n : graph.nodes()) {
        if (!selected.count(n.ref)) continue;
        out += n.ref.render() + "(";
        for (std::size_t i = 0; i < n.columns.size(); ++i) {
            const auto& c = n.columns[i];
            if (i) out += ", ";
            out += c.name.render() + ":" + (c.type.empty() ? "unknown" : c.type);
            if (c.primary_key) out += "[PK]";
        }
        out += ")\n";
    }
    for (const auto& e : graph.edges()) {
        if (!selected.count(e.from.table) || !selected.count(e.to.table)) continue;
        out += e.from.render() + " -> " + e.to.render() + " [";
        out += e.kind == EdgeKind::Explicit ? "explicit" : "implicit " + confidence_label(*e.confidence);
        out += "]\n";
    }
    return out;
}

}  // namespace

ContextSelection select_context(const ErGraph& graph, std::span<const TableRef> targets, std::size_t hops) {
    std::set<TableRef> selected;
    std::queue<std::pair<TableRef, std::size_t>> frontier;
    for (const auto& t : targets) {
        if (!graph.find(t)) throw Error("unknown entity " + t.render());
        if (selected.insert(t).second) frontier.emplace(t, 0);
    }
    while (!frontier.empty()) {
        auto [ref, depth] = frontier.front();
        frontier.pop();
        if (depth == hops) continue;
        for (const auto& next : graph.neighbours(ref)) {
            if (selected.insert(next).second) frontier.emplace(next, depth + 1);
        }
    }
    ContextSelection result;
    result.entities.assign(selected.begin(), selected.end());
    result.text = render_selection(graph, selected);
    return result;
}

std::string render_full_context(const ErGraph& graph) {
    std::set<TableRef> all;
    for (const auto& n : graph.nodes()) all.insert(n.ref);
    return render_selection(graph, all);
}

std::size_t context_size(std::string_view rendered) {
    return static_cast<std::size_t>(std::count_if(rendered.begin(), rendered.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    }));
}

}  // namespace flower
