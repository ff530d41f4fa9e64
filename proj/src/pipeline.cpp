#include "diec/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "diec/error.hpp"

namespace diec {

RstTrees load_rst_dir(const std::filesystem::path& dir, const Corpus& corpus) {
    RstTrees trees;
    for (const auto& doc : corpus.documents()) {
        const auto path = dir / (doc.doc_id + ".rst");
        std::ifstream in(path);
        if (!in) throw DataError("missing RST tree " + path.string());
        std::stringstream buf;
        buf << in.rdbuf();
        RstTree tree;
        try {
            tree = parse_rst(buf.str());
        } catch (const DataError& e) {
            throw DataError(path.string() + ": " + e.what());
        }
        if (tree.last_token() != doc.size() - 1)
            throw DataError(path.string() + ": tree covers tokens 0.." +
                            std::to_string(tree.last_token()) + " but document has " +
                            std::to_string(doc.size()) + " tokens");
        trees.emplace(doc.doc_id, std::move(tree));
    }
    return trees;
}

void save_rst_dir(const std::map<std::string, std::string>& serialized,
                  const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [doc_id, text] : serialized) {
        std::ofstream out(dir / (doc_id + ".rst"));
        if (!out) throw DataError("cannot write RST tree for " + doc_id);
        out << text << '\n';
    }
}

const RstTree& PipelineInputs::tree(const std::string& doc_id) const {
    auto it = trees->find(doc_id);
    if (it == trees->end()) throw DataError("no RST tree for document " + doc_id);
    return it->second;
}

CorefGraph build_document_graph(const PipelineInputs& in, const Document& a, const Document& b) {
    const bool same = a.doc_id == b.doc_id;
    const RstTree& tree_a = in.tree(a.doc_id);
    const RstTree& tree_b = in.tree(b.doc_id);

    GraphFragment rst_a = rst_to_graph(tree_a, a.doc_id);
    GraphFragment rst_b = same ? GraphFragment{} : rst_to_graph(tree_b, b.doc_id);
    if (in.ablate) {
        rst_a = ablate_relation(rst_a, *in.ablate);
        if (!same) rst_b = ablate_relation(rst_b, *in.ablate);
    }

    static const Lexicon kEmptyLexicon;
    static const Stoplist kEmptyStoplist;
    const auto chains = build_chains(a, b, in.lexicon ? *in.lexicon : kEmptyLexicon,
                                     in.stoplist ? *in.stoplist : kEmptyStoplist);
    const GraphFragment chain_graph = chains_to_graph(chains);
    const std::map<std::string, const RstTree*> trees{{a.doc_id, &tree_a}, {b.doc_id, &tree_b}};
    return merge(rst_a, rst_b, chain_graph, locate_occurrences(chain_graph, trees));
}

PairGraph build_pair_graph(const PipelineInputs& in, const EventMention& a, const EventMention& b) {
    const Document& doc_a = in.corpus->document(a.doc_id);
    const Document& doc_b = in.corpus->document(b.doc_id);
    PairGraph pg;
    pg.graph = build_document_graph(in, doc_a, doc_b);
    attach_anchor(pg.graph, a.mention_id, a.doc_id, edu_of_mention(in.tree(a.doc_id), a.span));
    attach_anchor(pg.graph, b.mention_id, b.doc_id, edu_of_mention(in.tree(b.doc_id), b.span));
    pg.node_a = pg.graph.anchors.at(a.mention_id);
    pg.node_b = pg.graph.anchors.at(b.mention_id);
    pg.adjacency = adjacency_of(pg.graph);
    pg.features = init_features(pg.graph, *in.embeddings);
    return pg;
}

}  // namespace diec
