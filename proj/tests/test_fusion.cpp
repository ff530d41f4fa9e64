#include <doctest.h>

#include <algorithm>

#include "diec/error.hpp"
#include "diec/fusion.hpp"
#include "diec/pipeline.hpp"
#include "diec/synth.hpp"
#include "fixtures.hpp"

using namespace diec;
using fixtures::doc;

namespace {

struct TwoDocs {
    Document a = doc("A", {"w0", "w1", "summit", "w3", "w4", "w5", "w6", "w7", "w8", "w9"});
    Document b = doc("B", {"v0", "v1", "v2", "v3", "summit", "v5"});
    RstTree ta = parse_rst("(Elaboration (N 0 4) (S 5 9))");
    RstTree tb = parse_rst("(Joint (N 0 2) (N 3 5))");
    GraphFragment fa = rst_to_graph(ta, "A");
    GraphFragment fb = rst_to_graph(tb, "B");
    std::map<std::string, const RstTree*> trees{{"A", &ta}, {"B", &tb}};

    CorefGraph merged(const std::vector<LexicalChain>& chains) const {
        const GraphFragment fc = chains_to_graph(chains);
        return merge(fa, fb, fc, locate_occurrences(fc, trees));
    }
    EmbeddingTable embeddings(double scale = 1.0) const {
        EmbeddingTable t(3);
        Eigen::MatrixXd va(10, 3), vb(6, 3);
        for (int i = 0; i < 10; ++i) va.row(i) << i, 1.0, -i;
        for (int i = 0; i < 6; ++i) vb.row(i) << 2.0 * i, 0.5, 3.0;
        t.set("A", scale * va);
        t.set("B", scale * vb);
        return t;
    }
};

std::size_t count_origin(const CorefGraph& g, EdgeOrigin o) {
    return static_cast<std::size_t>(
        std::count_if(g.edges.begin(), g.edges.end(), [o](const Edge& e) { return e.origin == o; }));
}

bool has(const CorefGraph& g, int src, int dst, std::string_view rel) {
    return std::any_of(g.edges.begin(), g.edges.end(), [&](const Edge& e) {
        return e.src == src && e.dst == dst && e.relation == rel && e.origin == EdgeOrigin::fusion;
    });
}

}  // namespace

TEST_SUITE("fusion") {

TEST_CASE("no chains gives two disconnected fragments") {
    const TwoDocs f;
    const CorefGraph g = f.merged({});
    CHECK(g.size() == 6);
    CHECK(g.edges.size() == f.fa.edges.size() + f.fb.edges.size());
    CHECK(count_origin(g, EdgeOrigin::fusion) == 0);
    CHECK_FALSE(is_connected(g));
    CHECK(g.doc_a == "A");
    CHECK(g.doc_b == "B");
}

TEST_CASE("one cross-document chain connects the graph") {
    const TwoDocs f;
    const auto chains = build_chains(f.a, f.b, Lexicon{}, Stoplist{});
    REQUIRE(chains.size() == 1);
    const CorefGraph g = f.merged(chains);
    CHECK(g.size() == 3 + 3 + 2);
    CHECK(is_connected(g));
    // "summit" sits in A's leaf 1 and B's second leaf (graph id 3 + 2)
    CHECK(has(g, 6, 1, kWordEduLabel));
    CHECK(has(g, 1, 6, kWordEduLabel));
    CHECK(has(g, 7, 5, kWordEduLabel));
    CHECK(has(g, 5, 7, kWordEduLabel));
    CHECK(has(g, 1, 5, kEduEduLabel));
    CHECK(has(g, 5, 1, kEduEduLabel));
    CHECK(count_origin(g, EdgeOrigin::fusion) == 6);
    // Elaboration tree 5, Joint tree 6, chain path 2, fusion 6
    CHECK(g.edges.size() == 5 + 6 + 2 + 6);
}

TEST_CASE("merge keeps rst and chain edges verbatim") {
    const TwoDocs f;
    const auto chains = build_chains(f.a, f.b, Lexicon{}, Stoplist{});
    const GraphFragment fc = chains_to_graph(chains);
    const CorefGraph g = merge(f.fa, f.fb, fc, locate_occurrences(fc, f.trees));
    std::vector<Edge> expected;
    for (const auto& e : f.fa.edges) expected.push_back(e);
    for (auto e : f.fb.edges) {
        e.src += 3;
        e.dst += 3;
        expected.push_back(e);
    }
    for (auto e : fc.edges) {
        e.src += 6;
        e.dst += 6;
        expected.push_back(e);
    }
    std::vector<Edge> kept;
    for (const auto& e : g.edges)
        if (e.origin != EdgeOrigin::fusion) kept.push_back(e);
    CHECK(kept == expected);
    for (const auto& n : g.nodes) CHECK(n.id == static_cast<int>(&n - g.nodes.data()));
}

TEST_CASE("EDU-EDU edges join distinct EDUs only") {
    Document a = doc("A", {"x", "y", "x", "z"});
    const RstTree t = parse_rst("(Elaboration (N 0 1) (S 2 3))");
    const RstTree t1 = parse_rst("(N 0 3)");
    const GraphFragment fa = rst_to_graph(t, "A");
    const auto chains = build_chains(a, a, Lexicon{}, Stoplist{});
    REQUIRE(chains.size() == 1);
    const GraphFragment fc = chains_to_graph(chains);
    const CorefGraph split = merge(fa, {}, fc, locate_occurrences(fc, {{"A", &t}}));
    CHECK(split.doc_b == "A");
    CHECK(count_origin(split, EdgeOrigin::fusion) == 6);
    CHECK(is_connected(split));
    const CorefGraph whole = merge(rst_to_graph(t1, "A"), {}, fc, locate_occurrences(fc, {{"A", &t1}}));
    CHECK(count_origin(whole, EdgeOrigin::fusion) == 4);
}

TEST_CASE("occurrences outside every tree are rejected") {
    const TwoDocs f;
    const GraphFragment fc = chains_to_graph(build_chains(f.a, f.b, Lexicon{}, Stoplist{}));
    CHECK_THROWS_AS(locate_occurrences(fc, {{"A", &f.ta}}), DataError);
    OccurrenceEduMap bad = locate_occurrences(fc, f.trees);
    bad[0].tree_node = 0;  // internal node, not a leaf
    CHECK_THROWS_AS(merge(f.fa, f.fb, fc, bad), DataError);
    bad.pop_back();
    CHECK_THROWS_AS(merge(f.fa, f.fb, fc, bad), DataError);
}

TEST_CASE("anchors point at EDU leaves") {
    const TwoDocs f;
    CorefGraph g = f.merged(build_chains(f.a, f.b, Lexicon{}, Stoplist{}));
    attach_anchor(g, "ma", "A", 2);
    attach_anchor(g, "mb", "B", 1);
    CHECK(g.anchors.at("ma") == 2);
    CHECK(g.anchors.at("mb") == 4);
    CHECK_THROWS_AS(attach_anchor(g, "mc", "A", 0), DataError);
    const auto j = g.to_json();
    CHECK(j["nodes"].size() == 8);
    CHECK(j["anchors"]["mb"] == 4);
    CHECK(j["edges"].size() == g.edges.size());
}

TEST_CASE("features: EDU means, chain tokens, internal child means") {
    const TwoDocs f;
    const CorefGraph g = f.merged(build_chains(f.a, f.b, Lexicon{}, Stoplist{}));
    const EmbeddingTable emb = f.embeddings();
    const Eigen::MatrixXd h = init_features(g, emb);
    REQUIRE(h.rows() == 8);
    REQUIRE(h.cols() == 3);
    CHECK(h.row(1).isApprox(Eigen::RowVector3d(2.0, 1.0, -2.0)));
    CHECK(h.row(2).isApprox(Eigen::RowVector3d(7.0, 1.0, -7.0)));
    CHECK(h.row(0).isApprox(0.5 * (h.row(1) + h.row(2))));
    CHECK(h.row(4).isApprox(Eigen::RowVector3d(2.0, 0.5, 3.0)));
    CHECK(h.row(5).isApprox(Eigen::RowVector3d(8.0, 0.5, 3.0)));
    CHECK(h.row(3).isApprox(0.5 * (h.row(4) + h.row(5))));
    CHECK(h.row(6).isApprox(emb.vectors("A").row(2)));
    CHECK(h.row(7).isApprox(emb.vectors("B").row(4)));
    CHECK(h.allFinite());
}

TEST_CASE("single-token EDU feature is that token's vector") {
    Document a = doc("A", {"p", "q"});
    const RstTree t = parse_rst("(Contrast (N 0 0) (S 1 1))");
    CorefGraph g = merge(rst_to_graph(t, "A"), {}, {}, {});
    EmbeddingTable emb(2);
    Eigen::MatrixXd v(2, 2);
    v << 1, 2, 3, 4;
    emb.set("A", v);
    const Eigen::MatrixXd h = init_features(g, emb);
    CHECK(h.row(1) == v.row(0));
    CHECK(h.row(2) == v.row(1));
    CHECK(h.row(0).isApprox(Eigen::RowVector2d(2.0, 3.0)));
    CHECK(is_connected(g));
}

TEST_CASE("features are linear in the embeddings") {
    const TwoDocs f;
    const CorefGraph g = f.merged(build_chains(f.a, f.b, Lexicon{}, Stoplist{}));
    const Eigen::MatrixXd h1 = init_features(g, f.embeddings());
    const Eigen::MatrixXd h3 = init_features(g, f.embeddings(-3.0));
    CHECK(h3.isApprox(-3.0 * h1));
}

TEST_CASE("embeddings shorter than the tree are rejected") {
    const TwoDocs f;
    const CorefGraph g = f.merged({});
    EmbeddingTable emb(3);
    emb.set("A", Eigen::MatrixXd::Zero(4, 3));
    emb.set("B", Eigen::MatrixXd::Zero(6, 3));
    CHECK_THROWS_AS(init_features(g, emb), DataError);
}

TEST_CASE("synthetic pairs with a cross-document chain are connected") {
    SynthConfig cfg;
    cfg.num_topics = 2;
    const auto data = generate_synthetic(cfg);
    RstTrees trees;
    for (const auto& [d, text] : data.rst) trees.emplace(d, parse_rst(text));
    const PipelineInputs in{&data.corpus, &data.embeddings, &trees, &data.lexicon, &data.stoplist, {}};
    const auto& docs = data.corpus.documents();
    int cross = 0;
    for (std::size_t i = 0; i < docs.size(); ++i)
        for (std::size_t j = i + 1; j < docs.size(); j += 3) {
            const auto chains = build_chains(docs[i], docs[j], data.lexicon, data.stoplist);
            bool spans_both = false;
            for (const auto& c : chains) {
                bool in_a = false, in_b = false;
                for (const auto& o : c.occurrences) {
                    in_a |= o.doc_id == docs[i].doc_id;
                    in_b |= o.doc_id == docs[j].doc_id;
                }
                spans_both |= in_a && in_b;
            }
            const CorefGraph g = build_document_graph(in, docs[i], docs[j]);
            if (spans_both) {
                ++cross;
                CHECK(is_connected(g));
            } else {
                CHECK_FALSE(is_connected(g));
            }
        }
    CHECK(cross > 0);
}

}  // TEST_SUITE
