#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "diec/corpus.hpp"
#include "diec/lexchain.hpp"

namespace diec {

struct SynthConfig {
    int num_topics = 10;
    int clusters_per_topic = 4;
    int mentions_per_cluster = 4;
    int docs = 0;  // 0: one document per mention (the only supported layout)
    int doc_length = 40;
    int vocab_size = 20000;
    double overlap_rate_target = 0.5;
    std::uint64_t seed = 7;
    int embedding_dim = 16;
    int topic_words = 2;
    int argument_words = 2;  // cluster words placed around the head in every mention span
    double synonym_head_rate = 0.3;
    double ambiguous_head_rate = 0.2;

    int total_mentions() const { return num_topics * clusters_per_topic * mentions_per_cluster; }
    void validate() const;

    nlohmann::json to_json() const;
    static SynthConfig from_json(const nlohmann::json& j);
};

struct SynthData {
    Corpus corpus;
    EmbeddingTable embeddings;
    std::map<std::string, std::string> rst;  // doc_id -> serialized tree
    Lexicon lexicon;
    Stoplist stoplist;
};

/// Planted-cluster corpus. Documents of one cluster share a block of words
/// sized so their pairwise overlap rate lands near the target; mention heads
/// mix a cluster head, its synonym and a head shared across the topic, framed
/// by the cluster's argument words.
SynthData generate_synthetic(const SynthConfig& config);

struct CorpusSplit {
    Corpus train;
    Corpus test;
};

/// Whole topics go to one side: the last `test_topics` topics in sorted
/// order form the test split.
CorpusSplit split_by_topic(const Corpus& corpus, int test_topics);

}  // namespace diec
