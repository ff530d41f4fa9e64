#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "diec/cluster.hpp"
#include "diec/corpus.hpp"

namespace diec {

struct PRF {
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;

    /// f1 = 2PR / (P + R), 0 when P + R = 0.
    static PRF from(double recall, double precision);
};

struct MetricReport {
    PRF muc;
    PRF b3;
    PRF ceaf;
    double conll_f1 = 0.0;

    nlohmann::json to_json() const;
};

/// Link-based MUC. Mention universes of gold and sys must match.
PRF muc(const ClusterSet& gold, const ClusterSet& sys);
/// Mention-averaged B-cubed.
PRF b_cubed(const ClusterSet& gold, const ClusterSet& sys);
/// Entity CEAF with phi4 = 2|K n S| / (|K| + |S|) and an optimal alignment.
PRF ceaf_e(const ClusterSet& gold, const ClusterSet& sys);
double conll_f1(const MetricReport& report);

MetricReport evaluate(const ClusterSet& gold, const ClusterSet& sys);

/// Plain-text table: one row per system, MUC / B3 / CEAF-e R P F1 then CoNLL F1.
std::string format_report_table(const std::vector<std::pair<std::string, MetricReport>>& rows);

/// items x categories rating counts; every row sums to the rater count.
using RatingMatrix = std::vector<std::vector<int>>;

double fleiss_kappa(const RatingMatrix& ratings);

/// Shared word types over the mean type count of both documents
/// (case-normalized surfaces).
double lexical_overlap_rate(const Document& a, const Document& b);

struct CorpusStats {
    std::size_t mentions = 0;
    std::size_t clusters = 0;
    std::size_t singleton_clusters = 0;
    double ambiguity = 0.0;  // mean number of clusters per head lemma type
    double diversity = 0.0;  // mean number of head lemma types per cluster
    std::map<int, std::size_t> size_at_least;  // thresholds 2/5/10/20/50

    nlohmann::json to_json() const;
};

CorpusStats corpus_stats(const Corpus& corpus);

struct BucketSpec {
    std::vector<double> overlap_edges{0.0, 0.1, 0.3, 0.5, 1.0};
    std::vector<int> length_edges{512, 1024};

    std::string overlap_bucket(double rate) const;
    std::string length_bucket(int words) const;
    std::vector<std::string> overlap_names() const;
    std::vector<std::string> length_names() const;
};

struct BucketResult {
    std::size_t pairs = 0;
    std::size_t mentions = 0;
    std::vector<std::string> mention_ids;  // sorted
    MetricReport report;
};

struct BucketReport {
    std::map<std::string, BucketResult> overlap;
    std::map<std::string, BucketResult> length;

    nlohmann::json to_json() const;
};

/// Assigns each pair to an overlap bucket and a length bucket (longer
/// document of the pair), then scores gold vs sys restricted to the mentions
/// of each bucket. Empty buckets are absent.
BucketReport bucketed_eval(const Corpus& corpus, const std::vector<MentionPair>& pairs,
                           const ClusterSet& sys, const ClusterSet& gold,
                           const BucketSpec& spec = {});

}  // namespace diec
