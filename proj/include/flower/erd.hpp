#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flower/inference.hpp"
#include "flower/schema.hpp"

namespace flower {

enum class EdgeKind { Explicit, Implicit };

struct ErColumn {
    Identifier name;
    std::string type;
    bool primary_key = false;

    friend bool operator==(const ErColumn& a, const ErColumn& b) {
        return a.name.render() == b.name.render() && a.type == b.type && a.primary_key == b.primary_key;
    }
};

struct ErNode {
    TableRef ref;
    bool is_empty = false;
    std::vector<ErColumn> columns;
};

/// Explicit edges carry no confidence; implicit edges always do.
struct ErEdge {
    ColumnRef from;
    ColumnRef to;
    EdgeKind kind = EdgeKind::Explicit;
    std::optional<double> confidence;
};

/// Entity graph; nodes sorted by table, edges by (from, to, kind).
/// Immutable once built.
class ErGraph {
public:
    ErGraph() = default;
    /// Throws Error when an edge names a table that is not a node, or an
    /// edge violates the confidence rule for its kind.
    ErGraph(std::vector<ErNode> nodes, std::vector<ErEdge> edges);

    const std::vector<ErNode>& nodes() const { return nodes_; }
    const std::vector<ErEdge>& edges() const { return edges_; }
    const ErNode* find(const TableRef& ref) const;

    /// Tables adjacent to `ref` through an edge of either kind/direction.
    std::vector<TableRef> neighbours(const TableRef& ref) const;

private:
    std::vector<ErNode> nodes_;
    std::vector<ErEdge> edges_;
};

/// Identity on spelling, flags, types and confidences.
bool same_graph(const ErGraph& a, const ErGraph& b);

ErGraph build_graph(std::span<const TableMeta> tables, std::span<const ExplicitDep> explicit_deps,
                    std::span<const ImplicitDep> implicit_deps);

enum class DiagramFormat { Dot, Mermaid, Json };

std::string_view to_string(DiagramFormat format);
/// Throws ConfigError for anything but dot, mermaid or json.
DiagramFormat parse_diagram_format(std::string_view text);

/// Explicit edges solid, implicit edges dashed and labeled with their
/// confidence to two decimals, empty tables drawn with dashed borders.
std::string export_graph(const ErGraph& graph, DiagramFormat format);

/// Inverse of export_graph(graph, DiagramFormat::Json). Throws Error.
ErGraph import_graph_json(std::string_view document);

/// Two-decimal confidence label, e.g. "0.85".
std::string confidence_label(double confidence);

struct ContextSelection {
    std::vector<TableRef> entities;  ///< sorted
    std::string text;
};

/// Tables within `hops` edges of any target plus their plain-text
/// rendering: one "schema.table(col:type[PK], ...)" line per table, then
/// one "a.b.c -> d.e.f [kind confidence]" line per edge inside the
/// selection. Throws Error naming a target that is not in the graph.
ContextSelection select_context(const ErGraph& graph, std::span<const TableRef> targets, std::size_t hops);

/// Rendering of every table and edge in the graph.
std::string render_full_context(const ErGraph& graph);

/// Number of characters (UTF-8 code points) in a rendering.
std::size_t context_size(std::string_view rendered);

}  // namespace flower
