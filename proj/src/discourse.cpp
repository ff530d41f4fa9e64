#include "diec/discourse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <set>

#include "diec/error.hpp"

namespace diec {

namespace {

constexpr std::array<std::string_view, 18> kRelationNames = {
    "Background",   "Elaboration", "Attribution", "Same-Unit",    "Joint",
    "Explanation",  "Enablement",  "Cause",       "Topic-Comment", "Contrast",
    "Condition",    "Comparison",  "Evaluation",  "Manner-Means", "Summary",
    "Temporal",     "Topic-Change", "Textual-Organization",
};

class RstReader {
public:
    explicit RstReader(std::string_view text) : text_(text) {}

    RstTree read() {
        RstTree tree;
        skip_ws();
        expect('(');
        const auto head = atom();
        if (head == "N" || head == "S") {
            // single-EDU document
            if (head == "S") fail("root must be a nucleus");
            RstNode leaf;
            leaf.leaf = true;
            leaf.span = {integer(), integer()};
            expect(')');
            tree.nodes.push_back(leaf);
        } else {
            read_internal(tree, head, -1, Nuclearity::nucleus);
        }
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters after tree");
        tree.root = 0;
        return tree;
    }

private:
    // '(' and the relation atom already consumed.
    int read_internal(RstTree& tree, std::string_view rel, int parent, Nuclearity nuc) {
        const int id = static_cast<int>(tree.nodes.size());
        RstNode node;
        node.id = id;
        node.parent = parent;
        node.nuclearity = nuc;
        try {
            node.relation = parse_relation(rel);
        } catch (const DataError& e) {
            fail(e.what());
        }
        tree.nodes.push_back(node);
        for (int c = 0; c < 2; ++c) {
            const int child = read_child(tree, id);
            tree.nodes[static_cast<std::size_t>(id)].children[static_cast<std::size_t>(c)] = child;
        }
        expect(')');
        auto& n = tree.nodes[static_cast<std::size_t>(id)];
        const auto& a = tree.nodes[static_cast<std::size_t>(n.children[0])];
        const auto& b = tree.nodes[static_cast<std::size_t>(n.children[1])];
        if (a.nuclearity == Nuclearity::satellite && b.nuclearity == Nuclearity::satellite)
            fail("two satellites under " + std::string(rel));
        n.span = {a.span.start, b.span.end};
        return id;
    }

    int read_child(RstTree& tree, int parent) {
        skip_ws();
        expect('(');
        const auto nuc_atom = atom();
        Nuclearity nuc;
        if (nuc_atom == "N") {
            nuc = Nuclearity::nucleus;
        } else if (nuc_atom == "S") {
            nuc = Nuclearity::satellite;
        } else {
            fail("expected N or S, got '" + std::string(nuc_atom) + "'");
        }
        skip_ws();
        int id;
        if (peek() == '(') {
            expect('(');
            const auto rel = atom();
            id = read_internal(tree, rel, parent, nuc);
        } else {
            RstNode leaf;
            leaf.id = id = static_cast<int>(tree.nodes.size());
            leaf.leaf = true;
            leaf.parent = parent;
            leaf.nuclearity = nuc;
            leaf.span.start = integer();
            leaf.span.end = integer();
            tree.nodes.push_back(leaf);
        }
        expect(')');
        return id;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string_view atom() {
        skip_ws();
        const auto begin = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')')
            ++pos_;
        if (begin == pos_) fail("expected a label");
        return text_.substr(begin, pos_ - begin);
    }

    int integer() {
        const auto a = atom();
        int value = 0;
        auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), value);
        if (ec != std::errc() || ptr != a.data() + a.size())
            fail("expected a token index, got '" + std::string(a) + "'");
        return value;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw DataError("malformed RST tree at offset " + std::to_string(pos_) + ": " + what);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

void write_node(const RstTree& tree, int id, std::string& out) {
    const auto& n = tree.node(id);
    if (n.leaf) {
        out += std::to_string(n.span.start);
        out += ' ';
        out += std::to_string(n.span.end);
        return;
    }
    out += '(';
    out += to_string(*n.relation);
    for (int c : n.children) {
        const auto& child = tree.node(c);
        out += " (";
        out += child.nuclearity == Nuclearity::nucleus ? 'N' : 'S';
        out += ' ';
        write_node(tree, c, out);
        out += ')';
    }
    out += ')';
}

int find(std::vector<int>& parent, int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] =
            parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
    }
    return x;
}

}  // namespace

std::string_view to_string(Relation r) { return kRelationNames[static_cast<std::size_t>(r)]; }

Relation parse_relation(std::string_view name) {
    for (std::size_t i = 0; i < kRelationNames.size(); ++i)
        if (kRelationNames[i] == name) return kAllRelations[i];
    throw DataError("unknown rhetorical relation '" + std::string(name) + "'");
}

std::string_view to_string(NodeKind k) {
    switch (k) {
        case NodeKind::rst_internal: return "rst_internal";
        case NodeKind::edu_leaf: return "edu_leaf";
        case NodeKind::chain_word: return "chain_word";
    }
    return "?";
}

std::string_view to_string(EdgeOrigin o) {
    switch (o) {
        case EdgeOrigin::rst: return "rst";
        case EdgeOrigin::chain: return "chain";
        case EdgeOrigin::fusion: return "fusion";
    }
    return "?";
}

std::vector<int> RstTree::leaves() const {
    std::vector<int> out;
    for (const auto& n : nodes)
        if (n.leaf) out.push_back(n.id);
    std::sort(out.begin(), out.end(),
              [this](int a, int b) { return node(a).span.start < node(b).span.start; });
    return out;
}

RstTree parse_rst(std::string_view text) {
    RstTree tree = RstReader(text).read();
    int expected = 0;
    for (int leaf : tree.leaves()) {
        const auto& s = tree.node(leaf).span;
        if (s.start != expected || s.end < s.start)
            throw DataError("EDU spans do not partition the token range: leaf [" +
                            std::to_string(s.start) + ", " + std::to_string(s.end) +
                            "] but expected start " + std::to_string(expected));
        expected = s.end + 1;
    }
    // pre-order parsing puts the leaves in document order already; this
    // guards against reordered input like (N 5 9) (S 0 4)
    int prev_end = -1;
    for (const auto& n : tree.nodes) {
        if (!n.leaf) continue;
        if (n.span.start <= prev_end)
            throw DataError("EDU spans out of document order");
        prev_end = n.span.end;
    }
    return tree;
}

std::string serialize_rst(const RstTree& tree) {
    std::string out;
    const auto& root = tree.node(tree.root);
    if (root.leaf) {
        out = "(N " + std::to_string(root.span.start) + " " + std::to_string(root.span.end) + ")";
        return out;
    }
    write_node(tree, tree.root, out);
    return out;
}

// ---------------------------------------------------------------------------

bool GraphFragment::add_edge(Edge e) {
    if (has_edge(e.src, e.dst, e.relation, e.origin)) return false;
    edges.push_back(std::move(e));
    return true;
}

bool GraphFragment::has_edge(int src, int dst, std::string_view relation, EdgeOrigin origin) const {
    return std::any_of(edges.begin(), edges.end(), [&](const Edge& e) {
        return e.src == src && e.dst == dst && e.origin == origin && e.relation == relation;
    });
}

int weak_component_count(int num_nodes, const std::vector<Edge>& edges) {
    std::vector<int> parent(static_cast<std::size_t>(num_nodes));
    std::iota(parent.begin(), parent.end(), 0);
    int components = num_nodes;
    for (const auto& e : edges) {
        const int a = find(parent, e.src);
        const int b = find(parent, e.dst);
        if (a != b) {
            parent[static_cast<std::size_t>(a)] = b;
            --components;
        }
    }
    return components;
}

bool weakly_connected(int num_nodes, const std::vector<Edge>& edges) {
    return weak_component_count(num_nodes, edges) <= 1;
}

GraphFragment rst_to_graph(const RstTree& tree, const std::string& doc_id) {
    GraphFragment g;
    g.nodes.reserve(tree.nodes.size());
    for (const auto& n : tree.nodes) {
        GraphNode node;
        node.id = n.id;
        node.kind = n.leaf ? NodeKind::edu_leaf : NodeKind::rst_internal;
        node.doc_id = doc_id;
        node.tree_node = n.id;
        node.children = n.children;
        node.span = n.span;
        node.label = n.leaf ? "EDU[" + std::to_string(n.span.start) + "," +
                                  std::to_string(n.span.end) + "]"
                            : std::string(to_string(*n.relation));
        g.nodes.push_back(std::move(node));
    }
    for (const auto& n : tree.nodes) {
        if (n.leaf) continue;
        const auto& a = tree.node(n.children[0]);
        const auto& b = tree.node(n.children[1]);
        const std::string rel(to_string(*n.relation));
        const bool a_nuc = a.nuclearity == Nuclearity::nucleus;
        const bool b_nuc = b.nuclearity == Nuclearity::nucleus;
        if (!a_nuc || b_nuc) g.add_edge({a.id, b.id, rel, EdgeOrigin::rst});
        if (!b_nuc || a_nuc) g.add_edge({b.id, a.id, rel, EdgeOrigin::rst});
        for (int c : n.children) {
            g.add_edge({c, n.id, std::string(kStructLabel), EdgeOrigin::rst});
            g.add_edge({n.id, c, std::string(kStructLabel), EdgeOrigin::rst});
        }
    }
    return g;
}

GraphFragment ablate_relation(const GraphFragment& fragment, Relation relation) {
    const std::string label(to_string(relation));
    GraphFragment out;
    out.nodes = fragment.nodes;
    std::set<int> touched;
    for (const auto& e : fragment.edges) {
        if (e.origin == EdgeOrigin::rst && e.relation == label) {
            touched.insert(e.src);
            touched.insert(e.dst);
            continue;
        }
        out.edges.push_back(e);
    }
    for (int n : touched) out.add_edge({n, n, std::string(kSelfLoopLabel), EdgeOrigin::rst});
    return out;
}

int edu_of_token(const RstTree& tree, int token) {
    for (const auto& n : tree.nodes)
        if (n.leaf && n.span.contains(token)) return n.id;
    throw DataError("token " + std::to_string(token) + " lies outside every EDU");
}

int edu_of_mention(const RstTree& tree, TokenSpan span) { return edu_of_token(tree, span.start); }

}  // namespace diec
