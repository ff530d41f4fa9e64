#include "diec/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diec/error.hpp"

namespace diec {

using json = nlohmann::json;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double leaky(double x, double slope) { return x > 0.0 ? x : slope * x; }
double leaky_grad(double x, double slope) { return x > 0.0 ? 1.0 : (x < 0.0 ? slope : 0.0); }

void check_inputs(const Adjacency& adj, const MatrixXd& h, const GatParams& params) {
    params.validate();
    if (params.heads.empty()) throw DataError("GAT layer needs at least one head");
    if (h.cols() != params.in_dim())
        throw DataError("feature dimension " + std::to_string(h.cols()) +
                        " does not match GAT input dimension " + std::to_string(params.in_dim()));
    if (h.rows() != adj.num_nodes)
        throw DataError("feature rows " + std::to_string(h.rows()) + " != node count " +
                        std::to_string(adj.num_nodes));
    if (!h.allFinite()) throw NumericError("non-finite node features");
    for (int i = 0; i < adj.num_nodes; ++i)
        if (adj.in[static_cast<std::size_t>(i)].empty())
            throw DataError("node " + std::to_string(i) + " has an empty neighbourhood");
}

MatrixXd matrix_from_rows(const json& rows, const char* what) {
    if (!rows.is_array() || rows.empty()) throw DataError(std::string("bad tensor ") + what);
    const auto cols = rows[0].size();
    MatrixXd m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw DataError(std::string("ragged tensor ") + what);
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c].get<double>();
    }
    return m;
}

}  // namespace

void GatParams::validate() const {
    if (heads.empty()) throw DataError("GAT layer needs at least one head");
    for (const auto& head : heads) {
        if (head.W.rows() != in_dim() || head.W.cols() != out_dim() || head.W.cols() < 1)
            throw DataError("GAT heads have inconsistent projection shapes");
        if (head.a.size() != 2 * head.W.cols())
            throw DataError("GAT attention vector must have length 2 * out_dim");
        if (!head.W.allFinite() || !head.a.allFinite())
            throw NumericError("non-finite GAT parameters");
    }
}

GatParams GatParams::random(int heads, int in_dim, int out_dim, Rng& rng, double leaky_slope) {
    if (heads < 1 || in_dim < 1 || out_dim < 1) throw ConfigError("GAT shapes must be positive");
    GatParams p;
    p.leaky_slope = leaky_slope;
    const double wb = 1.0 / std::sqrt(static_cast<double>(in_dim));
    const double ab = 1.0 / std::sqrt(2.0 * out_dim);
    for (int k = 0; k < heads; ++k) {
        GatHead head{MatrixXd(in_dim, out_dim), VectorXd(2 * out_dim)};
        for (int c = 0; c < out_dim; ++c)
            for (int r = 0; r < in_dim; ++r) head.W(r, c) = (2.0 * rng.uniform() - 1.0) * wb;
        for (int i = 0; i < 2 * out_dim; ++i) head.a[i] = (2.0 * rng.uniform() - 1.0) * ab;
        p.heads.push_back(std::move(head));
    }
    return p;
}

json GatParams::to_json() const {
    json W = json::array();
    json a = json::array();
    for (const auto& head : heads) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < head.W.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < head.W.cols(); ++c) row.push_back(head.W(r, c));
            rows.push_back(std::move(row));
        }
        W.push_back(std::move(rows));
        a.push_back(std::vector<double>(head.a.data(), head.a.data() + head.a.size()));
    }
    return {{"K", num_heads()}, {"d", in_dim()}, {"d_prime", out_dim()},
            {"leaky_slope", leaky_slope}, {"W", W}, {"a", a}};
}

GatParams GatParams::from_json(const json& j) {
    try {
        GatParams p;
        const int K = j.at("K").get<int>();
        const int d = j.at("d").get<int>();
        const int dp = j.at("d_prime").get<int>();
        p.leaky_slope = j.at("leaky_slope").get<double>();
        const auto& W = j.at("W");
        const auto& a = j.at("a");
        if (K < 1 || static_cast<int>(W.size()) != K || static_cast<int>(a.size()) != K)
            throw DataError("checkpoint head count does not match K");
        for (int k = 0; k < K; ++k) {
            GatHead head;
            head.W = matrix_from_rows(W[static_cast<std::size_t>(k)], "W");
            const auto av = a[static_cast<std::size_t>(k)].get<std::vector<double>>();
            head.a = Eigen::Map<const VectorXd>(av.data(), static_cast<Eigen::Index>(av.size()));
            if (head.W.rows() != d || head.W.cols() != dp || head.a.size() != 2 * dp)
                throw DataError("checkpoint tensor shapes do not match K/d/d_prime");
            p.heads.push_back(std::move(head));
        }
        p.validate();
        return p;
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid GAT checkpoint: ") + e.what());
    }
}

Adjacency Adjacency::from_edges(int num_nodes, const std::vector<std::pair<int, int>>& src_dst) {
    Adjacency adj;
    adj.num_nodes = num_nodes;
    adj.in.assign(static_cast<std::size_t>(num_nodes), {});
    for (int i = 0; i < num_nodes; ++i) adj.in[static_cast<std::size_t>(i)].push_back(i);
    for (const auto& [s, d] : src_dst) {
        if (s < 0 || d < 0 || s >= num_nodes || d >= num_nodes)
            throw DataError("edge endpoint out of range");
        adj.in[static_cast<std::size_t>(d)].push_back(s);
    }
    for (auto& n : adj.in) {
        std::sort(n.begin(), n.end());
        n.erase(std::unique(n.begin(), n.end()), n.end());
    }
    return adj;
}

Adjacency adjacency_of(const CorefGraph& graph) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(graph.edges.size());
    for (const auto& e : graph.edges) edges.emplace_back(e.src, e.dst);
    return Adjacency::from_edges(graph.size(), edges);
}

double AttentionMatrix::weight(const Adjacency& adj, int head, int i, int j) const {
    const auto& nb = adj.in[static_cast<std::size_t>(i)];
    auto it = std::lower_bound(nb.begin(), nb.end(), j);
    if (it == nb.end() || *it != j) return 0.0;
    return alpha[static_cast<std::size_t>(head)][static_cast<std::size_t>(i)]
                [static_cast<std::size_t>(it - nb.begin())];
}

MatrixXd gat_forward(const Adjacency& adj, const MatrixXd& h, const GatParams& params,
                     GatCache* cache) {
    check_inputs(adj, h, params);
    const int m = adj.num_nodes;
    const int K = params.num_heads();
    const int dp = params.out_dim();
    MatrixXd agg = MatrixXd::Zero(m, dp);

    GatCache local;
    GatCache& c = cache ? *cache : local;
    c.z.assign(static_cast<std::size_t>(K), {});
    c.logits.assign(static_cast<std::size_t>(K), {});
    c.alpha.assign(static_cast<std::size_t>(K), {});

    for (int k = 0; k < K; ++k) {
        const auto& head = params.heads[static_cast<std::size_t>(k)];
        auto& z = c.z[static_cast<std::size_t>(k)];
        z = h * head.W;
        const auto a_self = head.a.head(dp);
        const auto a_nb = head.a.tail(dp);
        auto& logits = c.logits[static_cast<std::size_t>(k)];
        auto& alpha = c.alpha[static_cast<std::size_t>(k)];
        logits.assign(static_cast<std::size_t>(m), {});
        alpha.assign(static_cast<std::size_t>(m), {});
        for (int i = 0; i < m; ++i) {
            const auto& nb = adj.in[static_cast<std::size_t>(i)];
            auto& s = logits[static_cast<std::size_t>(i)];
            auto& w = alpha[static_cast<std::size_t>(i)];
            s.resize(nb.size());
            w.resize(nb.size());
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < nb.size(); ++t) {
                s[t] = a_self.dot(z.row(i)) + a_nb.dot(z.row(nb[t]));
                best = std::max(best, leaky(s[t], params.leaky_slope));
            }
            double total = 0.0;
            for (std::size_t t = 0; t < nb.size(); ++t) {
                w[t] = std::exp(leaky(s[t], params.leaky_slope) - best);
                total += w[t];
            }
            for (std::size_t t = 0; t < nb.size(); ++t) {
                w[t] /= total;
                agg.row(i) += w[t] * z.row(nb[t]);
            }
        }
    }
    agg /= static_cast<double>(K);
    c.pre_activation = agg;
    return agg.cwiseMax(0.0);
}

AttentionMatrix attention_weights(const Adjacency& adj, const MatrixXd& h, const GatParams& params) {
    GatCache cache;
    gat_forward(adj, h, params, &cache);
    return {std::move(cache.alpha)};
}

MatrixXd dense_oracle(const Adjacency& adj, const MatrixXd& h, const GatParams& params) {
    check_inputs(adj, h, params);
    const int m = adj.num_nodes;
    const int dp = params.out_dim();
    MatrixXd mask = MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j : adj.in[static_cast<std::size_t>(i)]) mask(i, j) = 1.0;

    MatrixXd out = MatrixXd::Zero(m, dp);
    for (const auto& head : params.heads) {
        const MatrixXd z = h * head.W;
        const VectorXd left = z * head.a.head(dp);
        const VectorXd right = z * head.a.tail(dp);
        MatrixXd e = left.replicate(1, m) + right.transpose().replicate(m, 1);
        e = e.unaryExpr([&](double x) { return leaky(x, params.leaky_slope); });
        MatrixXd att = MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < m; ++j)
                if (mask(i, j) != 0.0) best = std::max(best, e(i, j));
            for (int j = 0; j < m; ++j) att(i, j) = mask(i, j) * std::exp(e(i, j) - best);
            att.row(i) /= att.row(i).sum();
        }
        out += att * z;
    }
    out /= static_cast<double>(params.num_heads());
    return out.cwiseMax(0.0);
}

GatGradients gat_backward(const Adjacency& adj, const MatrixXd& h, const GatParams& params,
                          const GatCache& cache, const MatrixXd& upstream) {
    const int m = adj.num_nodes;
    const int K = params.num_heads();
    const int dp = params.out_dim();
    if (upstream.rows() != m || upstream.cols() != dp)
        throw DataError("upstream gradient shape does not match GAT output");

    GatGradients g;
    g.dh = MatrixXd::Zero(h.rows(), h.cols());
    // d loss / d pre-activation, already divided by K
    const MatrixXd g_agg =
        (upstream.array() * (cache.pre_activation.array() > 0.0).cast<double>()).matrix() /
        static_cast<double>(K);

    for (int k = 0; k < K; ++k) {
        const auto& head = params.heads[static_cast<std::size_t>(k)];
        const auto& z = cache.z[static_cast<std::size_t>(k)];
        const auto& logits = cache.logits[static_cast<std::size_t>(k)];
        const auto& alpha = cache.alpha[static_cast<std::size_t>(k)];
        const auto a_self = head.a.head(dp);
        const auto a_nb = head.a.tail(dp);
        MatrixXd g_z = MatrixXd::Zero(m, dp);
        VectorXd g_a = VectorXd::Zero(2 * dp);

        for (int i = 0; i < m; ++i) {
            const auto& nb = adj.in[static_cast<std::size_t>(i)];
            const auto& w = alpha[static_cast<std::size_t>(i)];
            const auto& s = logits[static_cast<std::size_t>(i)];
            const auto gi = g_agg.row(i);
            std::vector<double> g_w(nb.size());
            double weighted = 0.0;
            for (std::size_t t = 0; t < nb.size(); ++t) {
                g_z.row(nb[t]) += w[t] * gi;
                g_w[t] = gi.dot(z.row(nb[t]));
                weighted += w[t] * g_w[t];
            }
            for (std::size_t t = 0; t < nb.size(); ++t) {
                const double g_e = w[t] * (g_w[t] - weighted);
                const double g_s = g_e * leaky_grad(s[t], params.leaky_slope);
                if (g_s == 0.0) continue;
                g_a.head(dp) += g_s * z.row(i).transpose();
                g_a.tail(dp) += g_s * z.row(nb[t]).transpose();
                g_z.row(i) += g_s * a_self.transpose();
                g_z.row(nb[t]) += g_s * a_nb.transpose();
            }
        }
        g.dW.push_back(h.transpose() * g_z);
        g.da.push_back(std::move(g_a));
        g.dh += g_z * head.W.transpose();
    }
    return g;
}

GatGradients gat_gradients(const Adjacency& adj, const MatrixXd& h, const GatParams& params,
                           const MatrixXd& upstream) {
    GatCache cache;
    gat_forward(adj, h, params, &cache);
    return gat_backward(adj, h, params, cache, upstream);
}

}  // namespace diec
