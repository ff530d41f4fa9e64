#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "diec/corpus.hpp"
#include "diec/discourse.hpp"
#include "diec/lexchain.hpp"

namespace diec {

inline constexpr std::string_view kWordEduLabel = "word-edu";
inline constexpr std::string_view kEduEduLabel = "edu-edu";

/// Merged cross-document graph. Node ids are contiguous: first document's
/// RST nodes, then the second document's, then chain words.
struct CorefGraph {
    std::vector<GraphNode> nodes;
    std::vector<Edge> edges;
    std::map<std::string, int> anchors;  // mention_id -> edu_leaf node
    std::string doc_a;
    std::string doc_b;  // equal to doc_a for a single-document graph

    int size() const { return static_cast<int>(nodes.size()); }
    nlohmann::json to_json() const;
};

/// Chain occurrence -> EDU leaf (tree node id in the occurrence's document).
struct OccurrenceEdu {
    std::string doc_id;
    int tree_node = -1;
};
using OccurrenceEduMap = std::vector<OccurrenceEdu>;  // indexed by chain-fragment node id

/// Locates each chain occurrence in its document's tree.
OccurrenceEduMap locate_occurrences(const GraphFragment& chains,
                                    const std::map<std::string, const RstTree*>& trees);

/// Union of the fragments (renumbered into one id space) plus fusion edges:
/// every chain word <-> its EDU, and every pair of distinct EDUs sharing a
/// chain. `rst_b` may be empty for a single-document graph.
CorefGraph merge(const GraphFragment& rst_a, const GraphFragment& rst_b,
                 const GraphFragment& chains, const OccurrenceEduMap& edu_of);

/// Anchors a mention to the EDU leaf `tree_node` of `doc_id`.
void attach_anchor(CorefGraph& graph, const std::string& mention_id, const std::string& doc_id,
                   int tree_node);

/// Node features, one row per node: EDU = mean of its tokens, chain word =
/// its token, internal RST node = mean of its two children (bottom-up).
Eigen::MatrixXd init_features(const CorefGraph& graph, const EmbeddingTable& embeddings);

bool is_connected(const CorefGraph& graph);

}  // namespace diec
