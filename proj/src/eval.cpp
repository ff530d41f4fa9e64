#include "diec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "diec/assignment.hpp"
#include "diec/error.hpp"

namespace diec {

using json = nlohmann::json;

namespace {

void check_universes(const ClusterSet& gold, const ClusterSet& sys) {
    const auto g = gold.universe();
    const auto s = sys.universe();
    if (std::adjacent_find(g.begin(), g.end()) != g.end())
        throw DataError("gold clusters repeat a mention");
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw DataError("system clusters repeat a mention");
    if (g != s)
        throw DataError("gold and system partitions cover different mentions (" +
                        std::to_string(g.size()) + " vs " + std::to_string(s.size()) + ")");
}

std::unordered_map<std::string, std::size_t> owner_map(const ClusterSet& c) {
    std::unordered_map<std::string, std::size_t> owner;
    for (std::size_t i = 0; i < c.clusters.size(); ++i)
        for (const auto& m : c.clusters[i]) owner[m] = i;
    return owner;
}

// sum over key clusters of (|K| - |partitions of K by response|), and of (|K| - 1)
std::pair<double, double> muc_counts(const ClusterSet& key, const ClusterSet& response) {
    const auto owner = owner_map(response);
    double num = 0.0;
    double den = 0.0;
    for (const auto& k : key.clusters) {
        std::set<std::size_t> parts;
        for (const auto& m : k) parts.insert(owner.at(m));
        num += static_cast<double>(k.size() - parts.size());
        den += static_cast<double>(k.size() - 1);
    }
    return {num, den};
}

double b3_recall(const ClusterSet& key, const ClusterSet& response) {
    const auto owner = owner_map(response);
    std::vector<std::size_t> response_size(response.clusters.size());
    for (std::size_t i = 0; i < response.clusters.size(); ++i) response_size[i] = response.clusters[i].size();
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& k : key.clusters) {
        std::unordered_map<std::size_t, std::size_t> overlap;
        for (const auto& m : k) ++overlap[owner.at(m)];
        for (const auto& m : k) {
            total += static_cast<double>(overlap[owner.at(m)]) / static_cast<double>(k.size());
            ++n;
        }
    }
    return n ? total / static_cast<double>(n) : 0.0;
}

std::string format_percent_range(double lo, double hi) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g-%g%%", lo * 100.0, hi * 100.0);
    return buf;
}

std::set<std::string> types_of(const Document& d) {
    std::set<std::string> out;
    for (const auto& t : d.tokens) out.insert(to_lower(t.surface));
    return out;
}

json prf_json(const PRF& p) { return {{"r", p.recall}, {"p", p.precision}, {"f1", p.f1}}; }

}  // namespace

PRF PRF::from(double recall, double precision) {
    PRF out{recall, precision, 0.0};
    if (recall + precision > 0.0) out.f1 = 2.0 * precision * recall / (precision + recall);
    return out;
}

json MetricReport::to_json() const {
    return {{"muc", prf_json(muc)}, {"b3", prf_json(b3)}, {"ceaf", prf_json(ceaf)},
            {"conll_f1", conll_f1}};
}

PRF muc(const ClusterSet& gold, const ClusterSet& sys) {
    check_universes(gold, sys);
    const auto [rn, rd] = muc_counts(gold, sys);
    const auto [pn, pd] = muc_counts(sys, gold);
    return PRF::from(rd > 0.0 ? rn / rd : 0.0, pd > 0.0 ? pn / pd : 0.0);
}

PRF b_cubed(const ClusterSet& gold, const ClusterSet& sys) {
    check_universes(gold, sys);
    return PRF::from(b3_recall(gold, sys), b3_recall(sys, gold));
}

PRF ceaf_e(const ClusterSet& gold, const ClusterSet& sys) {
    check_universes(gold, sys);
    if (gold.clusters.empty()) return {};
    const auto owner = owner_map(sys);
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gold.size()),
                                                static_cast<Eigen::Index>(sys.size()));
    for (std::size_t g = 0; g < gold.clusters.size(); ++g) {
        std::unordered_map<std::size_t, std::size_t> overlap;
        for (const auto& m : gold.clusters[g]) ++overlap[owner.at(m)];
        for (const auto& [s, common] : overlap)
            phi(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(s)) =
                2.0 * static_cast<double>(common) /
                static_cast<double>(gold.clusters[g].size() + sys.clusters[s].size());
    }
    const double total = assignment_value(phi, max_weight_assignment(phi));
    return PRF::from(total / static_cast<double>(gold.size()), total / static_cast<double>(sys.size()));
}

double conll_f1(const MetricReport& r) { return (r.muc.f1 + r.b3.f1 + r.ceaf.f1) / 3.0; }

MetricReport evaluate(const ClusterSet& gold, const ClusterSet& sys) {
    MetricReport r;
    r.muc = muc(gold, sys);
    r.b3 = b_cubed(gold, sys);
    r.ceaf = ceaf_e(gold, sys);
    r.conll_f1 = conll_f1(r);
    return r;
}

std::string format_report_table(const std::vector<std::pair<std::string, MetricReport>>& rows) {
    std::size_t name_w = 6;
    for (const auto& [name, _] : rows) name_w = std::max(name_w, name.size());
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s | %-23s | %-23s | %-23s | %s\n", static_cast<int>(name_w),
                  "", "        MUC", "        B3", "       CEAF-e", "CoNLL");
    out += buf;
    std::snprintf(buf, sizeof buf, "%-*s | %7s %7s %7s | %7s %7s %7s | %7s %7s %7s | %7s\n",
                  static_cast<int>(name_w), "system", "R", "P", "F1", "R", "P", "F1", "R", "P", "F1",
                  "F1");
    out += buf;
    for (const auto& [name, r] : rows) {
        std::snprintf(buf, sizeof buf,
                      "%-*s | %7.3f %7.3f %7.3f | %7.3f %7.3f %7.3f | %7.3f %7.3f %7.3f | %7.3f\n",
                      static_cast<int>(name_w), name.c_str(), r.muc.recall, r.muc.precision, r.muc.f1,
                      r.b3.recall, r.b3.precision, r.b3.f1, r.ceaf.recall, r.ceaf.precision, r.ceaf.f1,
                      r.conll_f1);
        out += buf;
    }
    return out;
}

double fleiss_kappa(const RatingMatrix& ratings) {
    if (ratings.size() < 2) throw DataError("Fleiss' kappa needs at least two items");
    const std::size_t k = ratings[0].size();
    if (k == 0) throw DataError("Fleiss' kappa needs at least one category");
    long raters = -1;
    std::vector<double> category_total(k, 0.0);
    double agreement = 0.0;
    for (const auto& row : ratings) {
        if (row.size() != k) throw DataError("rating rows have different category counts");
        long n = 0;
        double sq = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (row[j] < 0) throw DataError("negative rating count");
            n += row[j];
            sq += static_cast<double>(row[j]) * row[j];
            category_total[j] += row[j];
        }
        if (raters < 0) raters = n;
        if (n != raters) throw DataError("every item must be rated by the same number of raters");
        if (n < 2) throw DataError("Fleiss' kappa needs at least two raters");
        agreement += (sq - static_cast<double>(n)) / (static_cast<double>(n) * (n - 1));
    }
    const double items = static_cast<double>(ratings.size());
    const double p_bar = agreement / items;
    double p_e = 0.0;
    for (double t : category_total) {
        const double p = t / (items * static_cast<double>(raters));
        p_e += p * p;
    }
    if (p_e >= 1.0) {
        if (p_bar >= 1.0) return 1.0;
        throw NumericError("Fleiss' kappa undefined: chance agreement is 1");
    }
    return (p_bar - p_e) / (1.0 - p_e);
}

double lexical_overlap_rate(const Document& a, const Document& b) {
    if (a.tokens.empty() || b.tokens.empty()) throw DataError("overlap rate of an empty document");
    const auto ta = types_of(a);
    const auto tb = types_of(b);
    std::size_t shared = 0;
    for (const auto& t : ta) shared += tb.count(t);
    return static_cast<double>(shared) / ((static_cast<double>(ta.size()) + tb.size()) / 2.0);
}

json CorpusStats::to_json() const {
    json hist = json::object();
    for (const auto& [t, n] : size_at_least) hist[">=" + std::to_string(t)] = n;
    return {{"mentions", mentions},    {"clusters", clusters},   {"singleton_clusters", singleton_clusters},
            {"ambiguity", ambiguity},  {"diversity", diversity}, {"cluster_size_at_least", hist}};
}

CorpusStats corpus_stats(const Corpus& corpus) {
    CorpusStats s;
    s.mentions = corpus.mentions().size();
    std::map<std::int64_t, std::size_t> sizes;
    std::map<std::int64_t, std::set<std::string>> lemmas_of_cluster;
    std::map<std::string, std::set<std::int64_t>> clusters_of_lemma;
    for (const auto& m : corpus.mentions()) {
        const auto lemma = to_lower(m.head_lemma);
        ++sizes[m.gold_cluster];
        lemmas_of_cluster[m.gold_cluster].insert(lemma);
        clusters_of_lemma[lemma].insert(m.gold_cluster);
    }
    s.clusters = sizes.size();
    for (int t : {2, 5, 10, 20, 50}) s.size_at_least[t] = 0;
    for (const auto& [c, n] : sizes) {
        if (n == 1) ++s.singleton_clusters;
        for (auto& [t, count] : s.size_at_least)
            if (n >= static_cast<std::size_t>(t)) ++count;
    }
    if (!clusters_of_lemma.empty()) {
        double total = 0.0;
        for (const auto& [l, cs] : clusters_of_lemma) total += static_cast<double>(cs.size());
        s.ambiguity = total / static_cast<double>(clusters_of_lemma.size());
    }
    if (!lemmas_of_cluster.empty()) {
        double total = 0.0;
        for (const auto& [c, ls] : lemmas_of_cluster) total += static_cast<double>(ls.size());
        s.diversity = total / static_cast<double>(lemmas_of_cluster.size());
    }
    return s;
}

std::string BucketSpec::overlap_bucket(double rate) const {
    for (std::size_t i = 0; i + 1 < overlap_edges.size(); ++i) {
        const bool last = i + 2 == overlap_edges.size();
        if (rate < overlap_edges[i + 1] || (last && rate <= overlap_edges[i + 1]))
            return format_percent_range(overlap_edges[i], overlap_edges[i + 1]);
    }
    return format_percent_range(overlap_edges[overlap_edges.size() - 2], overlap_edges.back());
}

std::string BucketSpec::length_bucket(int words) const {
    if (words < length_edges.front()) return "<" + std::to_string(length_edges.front());
    for (std::size_t i = 0; i + 1 < length_edges.size(); ++i)
        if (words <= length_edges[i + 1])
            return std::to_string(length_edges[i]) + "-" + std::to_string(length_edges[i + 1]);
    return ">" + std::to_string(length_edges.back());
}

std::vector<std::string> BucketSpec::overlap_names() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i + 1 < overlap_edges.size(); ++i)
        out.push_back(format_percent_range(overlap_edges[i], overlap_edges[i + 1]));
    return out;
}

std::vector<std::string> BucketSpec::length_names() const {
    std::vector<std::string> out{"<" + std::to_string(length_edges.front())};
    for (std::size_t i = 0; i + 1 < length_edges.size(); ++i)
        out.push_back(std::to_string(length_edges[i]) + "-" + std::to_string(length_edges[i + 1]));
    out.push_back(">" + std::to_string(length_edges.back()));
    return out;
}

json BucketReport::to_json() const {
    auto dump = [](const std::map<std::string, BucketResult>& m) {
        json out = json::object();
        for (const auto& [name, r] : m)
            out[name] = {{"pairs", r.pairs}, {"mentions", r.mentions}, {"report", r.report.to_json()}};
        return out;
    };
    return {{"overlap", dump(overlap)}, {"length", dump(length)}};
}

BucketReport bucketed_eval(const Corpus& corpus, const std::vector<MentionPair>& pairs,
                           const ClusterSet& sys, const ClusterSet& gold, const BucketSpec& spec) {
    check_universes(gold, sys);
    std::map<std::string, std::pair<std::size_t, std::set<std::string>>> by_overlap;
    std::map<std::string, std::pair<std::size_t, std::set<std::string>>> by_length;
    for (const auto& p : pairs) {
        const auto& a = corpus.document(corpus.mention(p.mention_a).doc_id);
        const auto& b = corpus.document(corpus.mention(p.mention_b).doc_id);
        auto& o = by_overlap[spec.overlap_bucket(lexical_overlap_rate(a, b))];
        ++o.first;
        o.second.insert({p.mention_a, p.mention_b});
        auto& l = by_length[spec.length_bucket(std::max(a.size(), b.size()))];
        ++l.first;
        l.second.insert({p.mention_a, p.mention_b});
    }
    auto score = [&](const auto& buckets, std::map<std::string, BucketResult>& out) {
        for (const auto& [name, entry] : buckets) {
            const std::vector<std::string> universe(entry.second.begin(), entry.second.end());
            BucketResult r;
            r.pairs = entry.first;
            r.mentions = universe.size();
            r.report = evaluate(restrict_to(gold, universe), restrict_to(sys, universe));
            r.mention_ids = universe;
            out[name] = std::move(r);
        }
    };
    BucketReport report;
    score(by_overlap, report.overlap);
    score(by_length, report.length);
    return report;
}

}  // namespace diec
