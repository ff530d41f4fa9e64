#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "diec/cluster.hpp"
#include "diec/corpus.hpp"
#include "diec/eval.hpp"
#include "diec/pairscorer.hpp"
#include "diec/synth.hpp"

namespace diec::cli {

struct HashEmbedSpec {
    int dim = 16;
    std::uint64_t seed = 0;
};

/// Parses `d=<n>,seed=<n>` (either key may be omitted).
HashEmbedSpec parse_hash_embed(const std::string& text);

struct Paths {
    std::string corpus;
    std::string embeddings;
    std::string rst_dir;
    std::string lexicon;
    std::string stoplist;
    std::string pairs;
    std::string model;
    std::string scores;
    std::string clusters;
    std::string output_dir;
};

/// Everything a run can be configured with. Loaded from one JSON file;
/// command-line flags override individual fields.
struct PipelineConfig {
    Paths paths;
    ModelConfig model;
    TrainConfig train;
    ClusterConfig cluster;
    bool within_topic = false;
    PairMode pair_mode = PairMode::wec_train;
    int neg_ratio = 10;
    BucketSpec buckets;
    SynthConfig synth;
    int test_topics = 3;
    std::uint64_t seed = 13;  // pair sampling
    int workers = 1;
    std::optional<HashEmbedSpec> hash_embed;

    void validate() const;
    nlohmann::json to_json() const;
    /// Unknown keys are rejected so typos do not silently fall back to defaults.
    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig load(const std::string& path);
};

/// Entry point of the `diec` tool; returns the process exit status
/// (0 ok, 2 config error, 3 data error, 4 numeric failure).
int run(int argc, char** argv);

}  // namespace diec::cli
