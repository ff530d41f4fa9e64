#include "diec/fusion.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "diec/error.hpp"

namespace diec {

using json = nlohmann::json;

json CorefGraph::to_json() const {
    json jn = json::array();
    for (const auto& n : nodes)
        jn.push_back({{"id", n.id}, {"type", to_string(n.kind)}, {"label", n.label},
                      {"doc_id", n.doc_id}});
    json je = json::array();
    for (const auto& e : edges)
        je.push_back({{"src", e.src}, {"dst", e.dst}, {"relation", e.relation},
                      {"origin", to_string(e.origin)}});
    json ja = json::object();
    for (const auto& [m, n] : anchors) ja[m] = n;
    return {{"doc_a", doc_a}, {"doc_b", doc_b}, {"nodes", jn}, {"edges", je}, {"anchors", ja}};
}

OccurrenceEduMap locate_occurrences(const GraphFragment& chains,
                                    const std::map<std::string, const RstTree*>& trees) {
    OccurrenceEduMap out;
    out.reserve(chains.nodes.size());
    for (const auto& n : chains.nodes) {
        auto it = trees.find(n.doc_id);
        if (it == trees.end()) throw DataError("no RST tree for document " + n.doc_id);
        out.push_back({n.doc_id, edu_of_token(*it->second, n.token_index)});
    }
    return out;
}

CorefGraph merge(const GraphFragment& rst_a, const GraphFragment& rst_b,
                 const GraphFragment& chains, const OccurrenceEduMap& edu_of) {
    if (edu_of.size() != chains.nodes.size())
        throw DataError("occurrence map does not cover the chain fragment");
    CorefGraph g;
    const int off_b = static_cast<int>(rst_a.nodes.size());
    const int off_c = off_b + static_cast<int>(rst_b.nodes.size());

    auto copy = [&g](const GraphFragment& f, int offset) {
        for (auto n : f.nodes) {
            n.id += offset;
            for (auto& c : n.children)
                if (c >= 0) c += offset;
            g.nodes.push_back(std::move(n));
        }
        for (auto e : f.edges) {
            e.src += offset;
            e.dst += offset;
            g.edges.push_back(std::move(e));
        }
    };
    copy(rst_a, 0);
    copy(rst_b, off_b);
    copy(chains, off_c);

    g.doc_a = rst_a.nodes.empty() ? std::string() : rst_a.nodes.front().doc_id;
    g.doc_b = rst_b.nodes.empty() ? g.doc_a : rst_b.nodes.front().doc_id;

    // EDU graph ids by (doc, tree node)
    std::map<std::pair<std::string, int>, int> edu_node;
    for (int i = 0; i < off_c; ++i) {
        const auto& n = g.nodes[static_cast<std::size_t>(i)];
        if (n.kind == NodeKind::edu_leaf) edu_node[{n.doc_id, n.tree_node}] = i;
    }

    std::set<Edge> fusion;
    std::map<int, std::set<int>> chain_edus;
    for (std::size_t c = 0; c < chains.nodes.size(); ++c) {
        auto it = edu_node.find({edu_of[c].doc_id, edu_of[c].tree_node});
        if (it == edu_node.end())
            throw DataError("chain occurrence maps to no EDU leaf of document " + edu_of[c].doc_id +
                            " (tree node " + std::to_string(edu_of[c].tree_node) + ")");
        const int word = off_c + static_cast<int>(c);
        fusion.insert({word, it->second, std::string(kWordEduLabel), EdgeOrigin::fusion});
        fusion.insert({it->second, word, std::string(kWordEduLabel), EdgeOrigin::fusion});
        chain_edus[chains.nodes[c].chain_id].insert(it->second);
    }
    for (const auto& [chain, edus] : chain_edus) {
        for (int u : edus)
            for (int v : edus)
                if (u != v) fusion.insert({u, v, std::string(kEduEduLabel), EdgeOrigin::fusion});
    }
    g.edges.insert(g.edges.end(), fusion.begin(), fusion.end());
    return g;
}

void attach_anchor(CorefGraph& graph, const std::string& mention_id, const std::string& doc_id,
                   int tree_node) {
    for (const auto& n : graph.nodes) {
        if (n.kind == NodeKind::edu_leaf && n.doc_id == doc_id && n.tree_node == tree_node) {
            graph.anchors[mention_id] = n.id;
            return;
        }
    }
    throw DataError("no EDU node " + std::to_string(tree_node) + " of document " + doc_id +
                    " in graph");
}

Eigen::MatrixXd init_features(const CorefGraph& graph, const EmbeddingTable& embeddings) {
    const int d = embeddings.dim();
    Eigen::MatrixXd h(graph.size(), d);
    std::vector<bool> done(graph.nodes.size(), false);

    std::function<void(int)> fill = [&](int id) {
        const auto i = static_cast<std::size_t>(id);
        if (done[i]) return;
        const auto& n = graph.nodes[i];
        switch (n.kind) {
            case NodeKind::edu_leaf: {
                const auto& v = embeddings.vectors(n.doc_id);
                if (n.span.end >= v.rows())
                    throw DataError("embeddings for " + n.doc_id + " shorter than its RST tree");
                h.row(id) = v.middleRows(n.span.start, n.span.length()).colwise().mean();
                break;
            }
            case NodeKind::chain_word: {
                const auto& v = embeddings.vectors(n.doc_id);
                if (n.token_index >= v.rows())
                    throw DataError("embeddings for " + n.doc_id + " do not cover token " +
                                    std::to_string(n.token_index));
                h.row(id) = v.row(n.token_index);
                break;
            }
            case NodeKind::rst_internal: {
                fill(n.children[0]);
                fill(n.children[1]);
                h.row(id) = 0.5 * (h.row(n.children[0]) + h.row(n.children[1]));
                break;
            }
        }
        done[i] = true;
    };
    for (int i = 0; i < graph.size(); ++i) fill(i);
    return h;
}

bool is_connected(const CorefGraph& graph) { return weakly_connected(graph.size(), graph.edges); }

}  // namespace diec
