#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "diec/corpus.hpp"
#include "diec/discourse.hpp"
#include "diec/fusion.hpp"
#include "diec/gnn.hpp"
#include "diec/lexchain.hpp"

namespace diec {

using RstTrees = std::map<std::string, RstTree>;

/// Reads `<dir>/<doc_id>.rst` for every document of the corpus and checks
/// that each tree spans exactly the document's tokens.
RstTrees load_rst_dir(const std::filesystem::path& dir, const Corpus& corpus);
void save_rst_dir(const std::map<std::string, std::string>& serialized,
                  const std::filesystem::path& dir);

/// Read-only inputs of graph construction. All pointers must outlive the use.
struct PipelineInputs {
    const Corpus* corpus = nullptr;
    const EmbeddingTable* embeddings = nullptr;
    const RstTrees* trees = nullptr;
    const Lexicon* lexicon = nullptr;
    const Stoplist* stoplist = nullptr;
    std::optional<Relation> ablate;

    const RstTree& tree(const std::string& doc_id) const;
};

/// Merged graph of a mention pair's documents with both mentions anchored.
struct PairGraph {
    CorefGraph graph;
    Adjacency adjacency;
    Eigen::MatrixXd features;
    int node_a = -1;
    int node_b = -1;
};

/// Builds the graph for a canonical pair; the first mention's document is
/// the graph's first document.
PairGraph build_pair_graph(const PipelineInputs& in, const EventMention& a, const EventMention& b);

/// Graph of a document pair (or a single document when ids match), no anchors.
CorefGraph build_document_graph(const PipelineInputs& in, const Document& a, const Document& b);

}  // namespace diec
