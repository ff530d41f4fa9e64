#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diec/corpus.hpp"

namespace diec {

enum class Relation {
    Background,
    Elaboration,
    Attribution,
    SameUnit,
    Joint,
    Explanation,
    Enablement,
    Cause,
    TopicComment,
    Contrast,
    Condition,
    Comparison,
    Evaluation,
    MannerMeans,
    Summary,
    Temporal,
    TopicChange,
    TextualOrganization,
};

inline constexpr std::array<Relation, 18> kAllRelations = {
    Relation::Background,   Relation::Elaboration,  Relation::Attribution,
    Relation::SameUnit,     Relation::Joint,        Relation::Explanation,
    Relation::Enablement,   Relation::Cause,        Relation::TopicComment,
    Relation::Contrast,     Relation::Condition,    Relation::Comparison,
    Relation::Evaluation,   Relation::MannerMeans,  Relation::Summary,
    Relation::Temporal,     Relation::TopicChange,  Relation::TextualOrganization,
};

std::string_view to_string(Relation r);
/// Throws DataError for labels outside the closed set.
Relation parse_relation(std::string_view name);

enum class Nuclearity { nucleus, satellite };

struct RstNode {
    int id = 0;
    bool leaf = false;
    Nuclearity nuclearity = Nuclearity::nucleus;
    std::optional<Relation> relation;  // internal nodes only
    std::array<int, 2> children{-1, -1};
    int parent = -1;
    TokenSpan span;  // leaves: the EDU; internal: the covered range

    bool operator==(const RstNode&) const = default;
};

/// Binary discourse tree. Node ids index `nodes`.
struct RstTree {
    std::vector<RstNode> nodes;
    int root = 0;

    const RstNode& node(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
    std::vector<int> leaves() const;  // document order
    int last_token() const { return node(root).span.end; }

    bool operator==(const RstTree&) const = default;
};

/// Parses `(<Relation> (<N|S> child) (<N|S> child))` where a child is either
/// a nested tree or an inclusive `<start> <end>` leaf span. A bare
/// `(N <start> <end>)` is accepted as a single-EDU tree.
RstTree parse_rst(std::string_view text);
std::string serialize_rst(const RstTree& tree);

// ---------------------------------------------------------------------------
// Graph fragments (shared by the chain and fusion modules)

enum class NodeKind { rst_internal, edu_leaf, chain_word };
enum class EdgeOrigin { rst, chain, fusion };

std::string_view to_string(NodeKind k);
std::string_view to_string(EdgeOrigin o);

inline constexpr std::string_view kStructLabel = "Struct";
inline constexpr std::string_view kSelfLoopLabel = "SelfLoop";

struct GraphNode {
    int id = 0;
    NodeKind kind = NodeKind::edu_leaf;
    std::string doc_id;
    int tree_node = -1;            // rst nodes: id inside the source tree
    std::array<int, 2> children{-1, -1};  // rst_internal: fragment ids of children
    TokenSpan span;                // rst nodes: covered tokens
    int token_index = -1;          // chain_word
    int chain_id = -1;             // chain_word
    std::string label;

    bool operator==(const GraphNode&) const = default;
};

struct Edge {
    int src = 0;
    int dst = 0;
    std::string relation;
    EdgeOrigin origin = EdgeOrigin::rst;

    auto operator<=>(const Edge&) const = default;
};

struct GraphFragment {
    std::vector<GraphNode> nodes;  // nodes[i].id == i
    std::vector<Edge> edges;

    /// Adds the edge unless an identical one exists. Returns whether it was added.
    bool add_edge(Edge e);
    bool has_edge(int src, int dst, std::string_view relation, EdgeOrigin origin) const;
    bool operator==(const GraphFragment&) const = default;
};

/// Weak connectivity of a node/edge set.
bool weakly_connected(int num_nodes, const std::vector<Edge>& edges);
int weak_component_count(int num_nodes, const std::vector<Edge>& edges);

/// One node per tree node (fragment id == tree node id). Satellite->nucleus
/// relation edges, both directions between two nuclei, plus bidirectional
/// `Struct` edges between every child and its parent.
GraphFragment rst_to_graph(const RstTree& tree, const std::string& doc_id = {});

/// Drops rst-origin edges labelled `relation`; each node that lost an
/// incident edge gets a self-loop.
GraphFragment ablate_relation(const GraphFragment& fragment, Relation relation);

/// Leaf containing the span's start token.
int edu_of_mention(const RstTree& tree, TokenSpan span);
/// Leaf containing a single token.
int edu_of_token(const RstTree& tree, int token);

}  // namespace diec
