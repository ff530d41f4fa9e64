#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "diec/fusion.hpp"
#include "diec/rng.hpp"

namespace diec {

/// One attention head: projection `W` (in_dim x out_dim) applied as h W, and
/// attention vector `a` of length 2 * out_dim scoring [W h_i || W h_j].
struct GatHead {
    Eigen::MatrixXd W;
    Eigen::VectorXd a;
};

/// Parameters of one averaged multi-head attention layer.
struct GatParams {
    std::vector<GatHead> heads;
    double leaky_slope = 0.2;

    int num_heads() const { return static_cast<int>(heads.size()); }
    int in_dim() const { return heads.empty() ? 0 : static_cast<int>(heads[0].W.rows()); }
    int out_dim() const { return heads.empty() ? 0 : static_cast<int>(heads[0].W.cols()); }

    /// Throws DataError on inconsistent shapes or non-finite entries.
    void validate() const;

    /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
    static GatParams random(int heads, int in_dim, int out_dim, Rng& rng, double leaky_slope = 0.2);

    nlohmann::json to_json() const;
    static GatParams from_json(const nlohmann::json& j);
};

/// In-neighbourhoods used for attention: N(i) = {j : edge j -> i} plus i
/// itself, sorted and duplicate-free.
struct Adjacency {
    int num_nodes = 0;
    std::vector<std::vector<int>> in;

    static Adjacency from_edges(int num_nodes, const std::vector<std::pair<int, int>>& src_dst);
};

Adjacency adjacency_of(const CorefGraph& graph);

/// alpha[k][i][t] is the weight of in[i][t] for node i under head k.
struct AttentionMatrix {
    std::vector<std::vector<std::vector<double>>> alpha;

    /// Weight of edge j -> i under head k (0 when j is not a neighbour).
    double weight(const Adjacency& adj, int head, int i, int j) const;
};

/// Intermediate values of a forward pass, kept for the backward pass.
struct GatCache {
    std::vector<Eigen::MatrixXd> z;                          // per head: h W
    std::vector<std::vector<std::vector<double>>> logits;   // pre-LeakyReLU scores
    std::vector<std::vector<std::vector<double>>> alpha;
    Eigen::MatrixXd pre_activation;                          // before ReLU
};

/// h'_i = ReLU( (1/K) sum_k sum_{j in N(i)} alpha^k_ij h_j W_k ),
/// alpha^k_i. = softmax_j LeakyReLU(a_k . [h_i W_k || h_j W_k]).
Eigen::MatrixXd gat_forward(const Adjacency& adj, const Eigen::MatrixXd& h, const GatParams& params,
                            GatCache* cache = nullptr);

AttentionMatrix attention_weights(const Adjacency& adj, const Eigen::MatrixXd& h,
                                  const GatParams& params);

/// Same map evaluated over full masked m x m matrices. Test reference only.
Eigen::MatrixXd dense_oracle(const Adjacency& adj, const Eigen::MatrixXd& h, const GatParams& params);

struct GatGradients {
    std::vector<Eigen::MatrixXd> dW;
    std::vector<Eigen::VectorXd> da;
    Eigen::MatrixXd dh;
};

/// Exact gradients of <upstream, gat_forward(h)> with respect to the
/// parameters and the input features.
GatGradients gat_gradients(const Adjacency& adj, const Eigen::MatrixXd& h, const GatParams& params,
                           const Eigen::MatrixXd& upstream);

/// Backward pass reusing a cache filled by gat_forward on the same inputs.
GatGradients gat_backward(const Adjacency& adj, const Eigen::MatrixXd& h, const GatParams& params,
                          const GatCache& cache, const Eigen::MatrixXd& upstream);

}  // namespace diec
