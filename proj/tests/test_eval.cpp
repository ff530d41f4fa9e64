#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "diec/error.hpp"
#include "diec/eval.hpp"
#include "diec/rng.hpp"
#include "fixtures.hpp"

using namespace diec;
using fixtures::doc;

namespace {

ClusterSet cs(std::vector<std::vector<std::string>> clusters) {
    ClusterSet c;
    c.clusters = std::move(clusters);
    return c;
}

void check_prf(const PRF& got, double r, double p, double f) {
    CHECK(got.recall == doctest::Approx(r).epsilon(1e-12));
    CHECK(got.precision == doctest::Approx(p).epsilon(1e-12));
    CHECK(got.f1 == doctest::Approx(f).epsilon(1e-12));
}

double phi4(const std::vector<std::string>& k, const std::vector<std::string>& s) {
    std::size_t common = 0;
    for (const auto& m : k) common += std::count(s.begin(), s.end(), m);
    return 2.0 * static_cast<double>(common) / static_cast<double>(k.size() + s.size());
}

// maximum over every one-to-one alignment, by permuting the larger side
double exhaustive_ceaf_sum(const ClusterSet& gold, const ClusterSet& sys) {
    const auto& a = gold.clusters.size() >= sys.clusters.size() ? gold.clusters : sys.clusters;
    const auto& b = gold.clusters.size() >= sys.clusters.size() ? sys.clusters : gold.clusters;
    std::vector<std::size_t> perm(a.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
        double total = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) total += phi4(a[perm[j]], b[j]);
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

ClusterSet random_partition(const std::vector<std::string>& ms, int max_clusters, Rng& rng) {
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_clusters)));
    std::vector<std::vector<std::string>> out(static_cast<std::size_t>(k));
    for (const auto& m : ms) out[rng.below(static_cast<std::uint64_t>(k))].push_back(m);
    std::erase_if(out, [](const auto& c) { return c.empty(); });
    return cs(out);
}

std::vector<std::string> universe(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('a' + i)));
    return out;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("identity scores one everywhere") {
    const ClusterSet g = cs({{"a", "b", "c"}, {"d", "e"}, {"f"}});
    const MetricReport r = evaluate(g, g);
    check_prf(r.muc, 1, 1, 1);
    check_prf(r.b3, 1, 1, 1);
    check_prf(r.ceaf, 1, 1, 1);
    CHECK(r.conll_f1 == doctest::Approx(1.0));
}

TEST_CASE("MUC hand fixture") {
    check_prf(muc(cs({{"a", "b", "c"}, {"d"}}), cs({{"a", "b"}, {"c", "d"}})), 0.5, 0.5, 0.5);
    // no links anywhere
    check_prf(muc(cs({{"a"}, {"b"}}), cs({{"b"}, {"a"}})), 0, 0, 0);
}

TEST_CASE("B-cubed hand fixtures") {
    check_prf(b_cubed(cs({{"a", "b"}, {"c"}}), cs({{"a", "b", "c"}})), 1.0, 5.0 / 9.0, 5.0 / 7.0);
    const PRF split = b_cubed(cs({{"a", "b"}}), cs({{"a"}, {"b"}}));
    CHECK(split.recall == doctest::Approx(0.5));
    CHECK(split.precision == doctest::Approx(1.0));
}

TEST_CASE("CEAF-e hand fixture") {
    // phi4: {a,b}~{a} = 2/3, {c}~{b,c} = 2/3, so the best alignment sums to 4/3
    const PRF r = ceaf_e(cs({{"a", "b"}, {"c"}}), cs({{"a"}, {"b", "c"}}));
    check_prf(r, 2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0);
    // only one gold cluster can align with the single system cluster: phi4 = 2*2/6
    check_prf(ceaf_e(cs({{"a", "b"}, {"c", "d"}}), cs({{"a", "b", "c", "d"}})), 1.0 / 3.0, 2.0 / 3.0, 4.0 / 9.0);
    check_prf(ceaf_e(cs({{"a", "b"}}), cs({{"a"}, {"b"}})), 2.0 / 3.0, 1.0 / 3.0, 4.0 / 9.0);
}

TEST_CASE("CoNLL F1 is the mean of the three F1 values") {
    const ClusterSet g = cs({{"a", "b"}, {"c"}});
    const ClusterSet s = cs({{"a", "b", "c"}});
    const MetricReport r = evaluate(g, s);
    CHECK(r.conll_f1 == doctest::Approx((r.muc.f1 + r.b3.f1 + r.ceaf.f1) / 3.0).epsilon(1e-15));
    CHECK(conll_f1(r) == r.conll_f1);
    MetricReport halves;
    halves.muc = halves.b3 = halves.ceaf = PRF::from(0.5, 0.5);
    CHECK(conll_f1(halves) == doctest::Approx(0.5));
    MetricReport mixed;
    mixed.muc.f1 = 1.0;
    mixed.b3.f1 = 5.0 / 7.0;
    mixed.ceaf.f1 = 0.25;
    CHECK(conll_f1(mixed) == doctest::Approx((1.0 + 5.0 / 7.0 + 0.25) / 3.0));
}

TEST_CASE("PRF f1 convention") {
    const PRF z = PRF::from(0.0, 0.0);
    CHECK(z.f1 == 0.0);
    CHECK(PRF::from(1.0, 0.5).f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("CEAF-e equals the exhaustive alignment maximum") {
    Rng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const auto ms = universe(2 + static_cast<int>(rng.below(9)));
        const ClusterSet g = random_partition(ms, 6, rng);
        const ClusterSet s = random_partition(ms, 6, rng);
        const double best = exhaustive_ceaf_sum(g, s);
        const PRF r = ceaf_e(g, s);
        CHECK(r.recall == doctest::Approx(best / static_cast<double>(g.size())).epsilon(1e-12));
        CHECK(r.precision == doctest::Approx(best / static_cast<double>(s.size())).epsilon(1e-12));
    }
}

TEST_CASE("metrics are one exactly on identical partitions") {
    Rng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ms = universe(2 + static_cast<int>(rng.below(9)));
        const ClusterSet g = random_partition(ms, 5, rng);
        const ClusterSet s = random_partition(ms, 5, rng);
        const MetricReport r = evaluate(g, s);
        const bool same = g.same_partition(s);
        const bool perfect = r.b3.f1 == 1.0 && r.ceaf.f1 == 1.0;
        CHECK(perfect == same);
        // swapping roles swaps precision and recall
        const MetricReport back = evaluate(s, g);
        CHECK(back.muc.recall == doctest::Approx(r.muc.precision));
        CHECK(back.muc.precision == doctest::Approx(r.muc.recall));
        CHECK(back.b3.recall == doctest::Approx(r.b3.precision));
        CHECK(back.b3.precision == doctest::Approx(r.b3.recall));
        for (const PRF& p : {r.muc, r.b3, r.ceaf}) {
            CHECK(p.recall >= 0.0);
            CHECK(p.recall <= 1.0 + 1e-12);
            CHECK(p.precision >= 0.0);
            CHECK(p.precision <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("mismatched universes are rejected") {
    CHECK_THROWS_AS(muc(cs({{"a", "b"}}), cs({{"a"}})), DataError);
    CHECK_THROWS_AS(b_cubed(cs({{"a", "a"}}), cs({{"a"}})), DataError);
    CHECK_THROWS_AS(ceaf_e(cs({{"a"}}), cs({{"b"}})), DataError);
}

TEST_CASE("report json and table") {
    const MetricReport r = evaluate(cs({{"a", "b"}, {"c"}}), cs({{"a", "b", "c"}}));
    const auto j = r.to_json();
    for (const char* key : {"muc", "b3", "ceaf"}) {
        CHECK(j.at(key).contains("r"));
        CHECK(j.at(key).contains("p"));
        CHECK(j.at(key).contains("f1"));
    }
    CHECK(j.at("conll_f1").get<double>() == r.conll_f1);
    const std::string table = format_report_table({{"model", r}, {"lemma", r}});
    CHECK(table.find("CoNLL") != std::string::npos);
    CHECK(table.find("model") != std::string::npos);
    CHECK(table.find("lemma") != std::string::npos);
}

TEST_CASE("Fleiss kappa") {
    CHECK(fleiss_kappa({{3, 0}, {0, 3}, {3, 0}}) == doctest::Approx(1.0));
    CHECK(fleiss_kappa({{0, 4, 0}, {0, 4, 0}}) == 1.0);
    // observed agreement 0.5 equals chance agreement 0.5
    CHECK(fleiss_kappa({{2, 0}, {0, 2}, {1, 1}, {1, 1}}) == doctest::Approx(0.0));
    // worked example: 10 items, 14 raters, 5 categories
    const RatingMatrix classic{{0, 0, 0, 0, 14}, {0, 2, 6, 4, 2}, {0, 0, 3, 5, 6}, {0, 3, 9, 2, 0},
                               {2, 2, 8, 1, 1},  {7, 7, 0, 0, 0}, {3, 2, 6, 3, 0}, {2, 5, 3, 2, 2},
                               {6, 5, 2, 1, 0},  {0, 2, 2, 3, 7}};
    CHECK(fleiss_kappa(classic) == doctest::Approx(0.20993).epsilon(1e-4));
    CHECK_THROWS_AS(fleiss_kappa({{2, 0}}), DataError);
    CHECK_THROWS_AS(fleiss_kappa({{2, 0}, {1, 0}}), DataError);
    CHECK_THROWS_AS(fleiss_kappa({{1, 0}, {0, 1}}), DataError);
}

TEST_CASE("lexical overlap rate") {
    const Document a = doc("A", {"a", "b", "c", "d"});
    const Document b = doc("B", {"c", "d", "e", "f", "g", "h"});
    CHECK(lexical_overlap_rate(a, b) == 0.4);
    CHECK(lexical_overlap_rate(a, a) == 1.0);
    CHECK(lexical_overlap_rate(a, doc("C", {"x", "y"})) == 0.0);
    // types, case-normalized
    CHECK(lexical_overlap_rate(doc("D", {"A", "a", "b"}), doc("E", {"a", "B"})) == 1.0);
    CHECK_THROWS_AS(lexical_overlap_rate(a, doc("F", {})), DataError);
}

TEST_CASE("corpus statistics") {
    Corpus amb;
    amb.add_document(doc("d", {"attack", "election"}));
    int id = 0;
    for (std::int64_t c : {1, 2, 3})
        amb.add_mention(fixtures::mention("m" + std::to_string(id++), "d", 0, 0, "attack", c));
    amb.add_mention(fixtures::mention("m" + std::to_string(id++), "d", 1, 1, "election", 4));
    CHECK(corpus_stats(amb).ambiguity == 2.0);

    Corpus div;
    div.add_document(doc("d", {"attack", "strike", "election"}));
    div.add_mention(fixtures::mention("a", "d", 0, 0, "attack", 1));
    div.add_mention(fixtures::mention("b", "d", 1, 1, "strike", 1));
    div.add_mention(fixtures::mention("c", "d", 2, 2, "election", 2));
    const CorpusStats s = corpus_stats(div);
    CHECK(s.diversity == 1.5);
    CHECK(s.mentions == 3);
    CHECK(s.clusters == 2);
    CHECK(s.singleton_clusters == 1);
    CHECK(s.size_at_least.at(2) == 1);
    CHECK(s.size_at_least.at(5) == 0);
    CHECK(s.to_json()["cluster_size_at_least"][">=2"] == 1);

    Corpus flat = fixtures::one_doc_per_mention({0, 1, 2, 3});
    CHECK(corpus_stats(flat).ambiguity == 1.0);
    CHECK(corpus_stats(flat).diversity == 1.0);
}

TEST_CASE("bucket boundaries") {
    const BucketSpec b;
    CHECK(b.overlap_names() == std::vector<std::string>{"0-10%", "10-30%", "30-50%", "50-100%"});
    CHECK(b.length_names() == std::vector<std::string>{"<512", "512-1024", ">1024"});
    CHECK(b.overlap_bucket(0.0) == "0-10%");
    CHECK(b.overlap_bucket(0.0999) == "0-10%");
    CHECK(b.overlap_bucket(0.1) == "10-30%");
    CHECK(b.overlap_bucket(0.4) == "30-50%");
    CHECK(b.overlap_bucket(0.5) == "50-100%");
    CHECK(b.overlap_bucket(1.0) == "50-100%");
    CHECK(b.length_bucket(100) == "<512");
    CHECK(b.length_bucket(511) == "<512");
    CHECK(b.length_bucket(512) == "512-1024");
    CHECK(b.length_bucket(1024) == "512-1024");
    CHECK(b.length_bucket(1025) == ">1024");
}

TEST_CASE("bucketed evaluation") {
    Corpus c;
    std::vector<std::string> w100;
    for (int i = 0; i < 100; ++i) w100.push_back("w" + std::to_string(i));
    std::vector<std::string> shifted;
    for (int i = 60; i < 160; ++i) shifted.push_back("w" + std::to_string(i));
    c.add_document(doc("d1", w100));
    c.add_document(doc("d2", w100));
    c.add_document(doc("d3", shifted));
    c.add_mention(fixtures::mention("a", "d1", 0, 0, "w0", 1));
    c.add_mention(fixtures::mention("b", "d2", 0, 0, "w0", 1));
    c.add_mention(fixtures::mention("c", "d3", 0, 0, "w60", 2));
    const auto pairs = generate_pairs(c, PairMode::wec_eval, 10, 0);
    const ClusterSet gold = gold_clusters(c);
    const BucketReport r = bucketed_eval(c, pairs, gold, gold);
    REQUIRE(r.length.size() == 1);
    CHECK(r.length.count("<512"));
    CHECK(r.length.at("<512").pairs == 3);
    CHECK(r.length.at("<512").mentions == 3);
    // a-b identical (1.0); a-c, b-c share 40 of 100 types (0.4)
    CHECK(r.overlap.at("50-100%").pairs == 1);
    CHECK(r.overlap.at("30-50%").pairs == 2);
    CHECK_FALSE(r.overlap.count("0-10%"));
    CHECK(r.overlap.at("30-50%").mention_ids == std::vector<std::string>{"a", "b", "c"});
    CHECK(r.overlap.at("50-100%").mention_ids == std::vector<std::string>{"a", "b"});
    CHECK(r.overlap.at("50-100%").report.conll_f1 == doctest::Approx(1.0));
    // system merges everything: the identical pair's bucket stays perfect on B3 recall
    const BucketReport merged = bucketed_eval(c, pairs, ClusterSet{{{"a", "b", "c"}}}, gold);
    CHECK(merged.overlap.at("50-100%").report.conll_f1 == doctest::Approx(1.0));
    CHECK(merged.overlap.at("30-50%").report.b3.recall == doctest::Approx(1.0));
    CHECK(merged.overlap.at("30-50%").report.b3.precision == doctest::Approx(5.0 / 9.0));
    CHECK(r.to_json()["overlap"].size() == 2);
}

TEST_CASE("bucket mention universes cover the scored mentions") {
    Rng rng(43);
    Corpus c;
    for (int i = 0; i < 12; ++i) {
        std::vector<std::string> words;
        const int len = 400 + static_cast<int>(rng.below(900));
        for (int t = 0; t < len; ++t) words.push_back("v" + std::to_string(rng.below(300)));
        c.add_document(doc("d" + std::to_string(i), words));
        c.add_mention(fixtures::mention("m" + std::to_string(i), "d" + std::to_string(i), 0, 0, words[0], i % 4));
    }
    const auto pairs = generate_pairs(c, PairMode::wec_eval, 10, 0);
    const ClusterSet gold = gold_clusters(c);
    const BucketReport r = bucketed_eval(c, pairs, gold, gold);
    std::size_t total_pairs = 0;
    for (const auto& [name, b] : r.length) total_pairs += b.pairs;
    CHECK(total_pairs == pairs.size());
    total_pairs = 0;
    for (const auto& [name, b] : r.overlap) total_pairs += b.pairs;
    CHECK(total_pairs == pairs.size());
    for (const auto* side : {&r.length, &r.overlap}) {
        std::set<std::string> seen;
        for (const auto& [name, b] : *side) seen.insert(b.mention_ids.begin(), b.mention_ids.end());
        CHECK(std::vector<std::string>(seen.begin(), seen.end()) == gold.universe());
    }
    CHECK(r.length.size() >= 2);
}

}  // TEST_SUITE
