#include <doctest.h>

#include <set>
#include <sstream>

#include "diec/error.hpp"
#include "diec/lexchain.hpp"
#include "diec/rng.hpp"
#include "fixtures.hpp"

using namespace diec;
using fixtures::doc;

namespace {

std::set<std::set<std::pair<std::string, int>>> partition(const std::vector<LexicalChain>& chains) {
    std::set<std::set<std::pair<std::string, int>>> out;
    for (const auto& c : chains) {
        std::set<std::pair<std::string, int>> members;
        for (const auto& o : c.occurrences) members.insert({o.doc_id, o.token_index});
        out.insert(members);
    }
    return out;
}

}  // namespace

TEST_SUITE("lexchain") {

TEST_CASE("repetition across documents") {
    const Document a = doc("A", {"Hong Kong", "election", "in", "Hong Kong"});
    const Document b = doc("B", {"Hong Kong", "vote"});
    const auto chains = build_chains(a, b, Lexicon{}, Stoplist{});
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].kind == ChainKind::repetition);
    CHECK(chains[0].key == "hong kong");
    REQUIRE(chains[0].occurrences.size() == 3);
    CHECK(chains[0].occurrences[0].doc_id == "A");
    CHECK(chains[0].occurrences[1].doc_id == "A");
    CHECK(chains[0].occurrences[2].doc_id == "B");
}

TEST_CASE("synonym pair forms one chain") {
    const Lexicon lex({{"first", "inaugural"}}, {}, {});
    const auto chains = build_chains(doc("A", {"the", "first", "summit"}),
                                     doc("B", {"an", "inaugural", "meeting"}), lex, Stoplist{});
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].kind == ChainKind::synonym);
    CHECK(chains[0].occurrences.size() == 2);
}

TEST_CASE("everything stoplisted gives no chains") {
    const Document a = doc("A", {"a", "b", "a"});
    const Stoplist stop{"a", "b"};
    CHECK(build_chains(a, doc("B", {"a", "b", "a"}), Lexicon{}, stop).empty());
}

TEST_CASE("stoplist also blocks lexicon chains") {
    const Lexicon lex({{"first", "inaugural"}}, {}, {"later"});
    const auto chains = build_chains(doc("A", {"first", "later"}), doc("B", {"inaugural", "later"}), lex,
                                     Stoplist{"first", "later"});
    CHECK(chains.empty());
}

TEST_CASE("claim priority: repetition beats synonym") {
    const Lexicon lex({{"attack", "strike"}}, {{"attack", "raid"}}, {});
    const auto chains = build_chains(doc("A", {"attack", "strike"}), doc("B", {"attack", "raid"}), lex,
                                     Stoplist{});
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].kind == ChainKind::repetition);
    CHECK(chains[0].occurrences.size() == 2);
    // "strike" and "raid" are each unmatched after the claim
}

TEST_CASE("proximity chains") {
    const Lexicon lex({}, {{"ballot", "vote", "poll"}}, {});
    const auto chains = build_chains(doc("A", {"ballot", "counted"}), doc("B", {"poll", "closed"}), lex,
                                     Stoplist{});
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].kind == ChainKind::semantic_proximity);
}

TEST_CASE("temporal chains per expression") {
    const Lexicon lex({}, {}, {"four years later", "<year>", "yesterday"});
    const Document a = doc("A", {"in", "2014", "and", "four", "years", "later"});
    const Document b = doc("B", {"by", "2018", "yesterday"});
    const auto chains = build_chains(a, b, lex, Stoplist{});
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].kind == ChainKind::temporal);
    CHECK(chains[0].key == "<year>");
    REQUIRE(chains[0].occurrences.size() == 2);
    CHECK(chains[0].occurrences[0].surface == "2014");
    CHECK(chains[0].occurrences[1].surface == "2018");
    // a phrase repeated on both sides is claimed by repetition first
    const auto rep = build_chains(a, doc("B", {"four", "years", "later"}), lex, Stoplist{});
    CHECK(rep.size() == 3);
    for (const auto& c : rep) CHECK(c.kind == ChainKind::repetition);
}

TEST_CASE("single-document chains are dropped without a counterpart") {
    const Lexicon lex({{"attack", "strike"}}, {}, {});
    // both synonyms in A, nothing related in B
    const auto chains = build_chains(doc("A", {"attack", "strike"}), doc("B", {"calm"}), lex, Stoplist{});
    CHECK(chains.empty());
    // a same-document pair chains inside the document
    const Document a = doc("A", {"attack", "then", "strike"});
    const auto inside = build_chains(a, a, lex, Stoplist{});
    REQUIRE(inside.size() == 1);
    CHECK(inside[0].occurrences.size() == 2);
}

TEST_CASE("every occurrence is in at most one chain and chains have two or more") {
    Rng rng(17);
    const Lexicon lex({{"w1", "w2"}, {"w3", "w4", "w5"}}, {{"w6", "w7"}, {"w8", "w9"}}, {"<year>", "w0"});
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> wa, wb;
        for (int i = 0; i < 12; ++i) wa.push_back("w" + std::to_string(rng.below(12)));
        for (int i = 0; i < 9; ++i) wb.push_back(rng.bernoulli(0.2) ? "1999" : "w" + std::to_string(rng.below(12)));
        const Document a = doc("A", wa), b = doc("B", wb);
        const auto chains = build_chains(a, b, lex, Stoplist{"w11"});
        std::set<std::pair<std::string, int>> seen;
        for (const auto& c : chains) {
            CHECK(c.occurrences.size() >= 2);
            for (const auto& o : c.occurrences) {
                CHECK(seen.insert({o.doc_id, o.token_index}).second);
                CHECK(o.lemma != "w11");
            }
        }
        // swapping the documents gives the same partition
        CHECK(partition(build_chains(b, a, lex, Stoplist{"w11"})) == partition(chains));
    }
}

TEST_CASE("chain graph is a bidirectional path per chain") {
    LexicalChain c3{0, ChainKind::repetition, "x", {{"A", 0, "x", "x"}, {"A", 4, "x", "x"}, {"B", 1, "x", "x"}}};
    LexicalChain c2{1, ChainKind::synonym, "0", {{"A", 2, "y", "y"}, {"B", 3, "z", "z"}}};
    const GraphFragment g3 = chains_to_graph({c3});
    CHECK(g3.nodes.size() == 3);
    CHECK(g3.edges.size() == 4);
    const GraphFragment g2 = chains_to_graph({c2});
    CHECK(g2.nodes.size() == 2);
    CHECK(g2.edges.size() == 2);
    const GraphFragment both = chains_to_graph({c3, c2});
    CHECK(weak_component_count(static_cast<int>(both.nodes.size()), both.edges) == 2);
    for (const auto& e : both.edges) {
        CHECK(e.origin == EdgeOrigin::chain);
        CHECK(both.has_edge(e.dst, e.src, e.relation, EdgeOrigin::chain));
    }
    CHECK(both.nodes[3].chain_id == 1);
    CHECK(both.nodes[3].kind == NodeKind::chain_word);
}

TEST_CASE("lexicon json and validation") {
    const auto j = nlohmann::json::parse(
        R"({"synonyms":[["First","inaugural"]],"proximity":[["vote","ballot"]],"temporal":["<year>","four years later"]})");
    const Lexicon lex = Lexicon::from_json(j);
    CHECK(lex.synonym_group("first") == 0);
    CHECK(lex.synonym_group("INAUGURAL") == 0);
    CHECK(lex.synonym_group("vote") == -1);
    CHECK(lex.proximity_group("ballot") == 0);
    CHECK(lex.temporal().size() == 2);
    CHECK(Lexicon::from_json(lex.to_json()).to_json() == lex.to_json());
    CHECK_THROWS_AS(Lexicon({{"a", "b"}, {"b", "c"}}, {}, {}), DataError);
}

TEST_CASE("stoplist parsing") {
    std::istringstream in("The\n  of \n\nand\n");
    const Stoplist s = parse_stoplist(in);
    CHECK(s.count("the"));
    CHECK(s.count("of"));
    CHECK(s.count("and"));
}

}  // TEST_SUITE
