#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "diec/corpus.hpp"
#include "diec/gnn.hpp"
#include "diec/pipeline.hpp"

namespace diec {

struct ScoredPair {
    std::string mention_a;
    std::string mention_b;
    double score = 0.0;

    bool operator==(const ScoredPair&) const = default;
};

/// TSV `mention_a  mention_b  score`, scores written with round-trip precision.
void write_scores(const std::vector<ScoredPair>& scores, std::ostream& out);
std::vector<ScoredPair> parse_scores(std::istream& in);
std::vector<ScoredPair> load_scores(const std::filesystem::path& path);

/// Token vectors of the mention concatenated in order and zero-padded to
/// `max_len * d`; spans longer than `max_len` keep their leading tokens.
Eigen::VectorXd mention_repr(const Document& doc, const EventMention& mention,
                             const EmbeddingTable& embeddings, int max_len);

/// [v_a || v_b || h'_a || h'_b]
Eigen::VectorXd pair_representation(const Eigen::VectorXd& v_a, const Eigen::VectorXd& v_b,
                                    const Eigen::VectorXd& h_a, const Eigen::VectorXd& h_b);

struct MlpLayer {
    Eigen::MatrixXd W;  // out x in
    Eigen::VectorXd b;
};

/// Affine layers with ReLU between them; the last layer has one output.
struct MlpParams {
    std::vector<MlpLayer> layers;

    int in_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().W.cols()); }
    void validate() const;
    static MlpParams random(const std::vector<int>& widths, Rng& rng);
    static MlpParams zeros(const std::vector<int>& widths);

    nlohmann::json to_json() const;
    static MlpParams from_json(const nlohmann::json& j);
};

double mlp_logit(const Eigen::VectorXd& x, const MlpParams& mlp);

/// sigmoid(MLP(pr)), kept strictly inside (0, 1).
double score_pair(const Eigen::VectorXd& pr, const MlpParams& mlp);

double sigmoid(double x);

/// 1 iff the case-normalized head lemmas match.
int lemma_baseline(const MentionPair& pair, const Corpus& corpus);
std::vector<ScoredPair> lemma_baseline_scores(const std::vector<MentionPair>& pairs,
                                              const Corpus& corpus);

struct ModelConfig {
    int embed_dim = 16;       // d
    int gat_dim = 16;         // d'
    int heads = 2;            // K
    int layers = 1;
    int max_mention_len = 8;  // M
    double leaky_slope = 0.2;
    std::vector<int> mlp_hidden;  // empty: in/2, in/4
    // first-layer rows come in +/- pairs that read v_a - v_b and h'_a - h'_b
    bool mirror_init = true;

    int pair_dim() const { return 2 * max_mention_len * embed_dim + 2 * gat_dim; }
    /// Full MLP widths including input and the single output.
    std::vector<int> mlp_widths() const;
    void validate() const;

    nlohmann::json to_json() const;
    static ModelConfig from_json(const nlohmann::json& j);
};

/// GAT stack plus pair MLP. Also used as a same-shaped gradient / moment
/// container during training.
struct Model {
    ModelConfig config;
    std::vector<GatParams> gat;
    MlpParams mlp;

    static Model init(const ModelConfig& config, std::uint64_t seed);
    /// Same shapes as `like`, every entry zero.
    static Model zeros_like(const Model& like);

    /// Views of every parameter tensor in a fixed order.
    std::vector<std::span<double>> tensors();
    std::vector<std::span<const double>> tensors() const;
    std::size_t parameter_count() const;

    nlohmann::json to_json() const;
    static Model from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static Model load(const std::filesystem::path& path);

    bool operator==(const Model& other) const;
};

/// One mention pair ready for the model.
struct PairExample {
    std::string mention_a;
    std::string mention_b;
    PairGraph graph;
    Eigen::VectorXd v_a;
    Eigen::VectorXd v_b;
    double label = 0.0;
};

PairExample make_example(const PipelineInputs& in, const MentionPair& pair, int max_len);

/// Coreference probability of one example.
double predict_example(const Model& model, const PairExample& ex);

/// Binary cross-entropy of one example. Adds d loss / d params to `grad`
/// when non-null.
double pair_loss(const Model& model, const PairExample& ex, Model* grad);

struct TrainConfig {
    double learning_rate = 1e-5;
    int warmup_steps = -1;  // -1: 10% of total steps
    int batch_size = 128;
    double weight_decay = 0.01;
    int epochs = 10;
    std::uint64_t seed = 13;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);
};

struct TrainResult {
    Model model;
    std::vector<double> epoch_loss;
};

/// Mini-batch AdamW with linear warm-up, decoupled weight decay and a
/// seeded per-epoch shuffle. Starts from Model::init(config, train.seed).
TrainResult train(const std::vector<MentionPair>& pairs, const PipelineInputs& in,
                  const ModelConfig& config, const TrainConfig& train);

/// Same, starting from `initial` and a prepared example set.
TrainResult train(std::vector<PairExample> examples, Model initial, const TrainConfig& train);

/// One score per pair, in input order. Work is spread over `workers` threads.
std::vector<ScoredPair> predict(const std::vector<MentionPair>& pairs, const Model& model,
                                const PipelineInputs& in, int workers = 1);

}  // namespace diec
