#include "diec/pairscorer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "diec/error.hpp"

namespace diec {

using json = nlohmann::json;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

json matrix_json(const MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixXd matrix_from_json(const json& rows) {
    if (!rows.is_array() || rows.empty()) throw DataError("empty tensor in checkpoint");
    const auto cols = rows[0].size();
    MatrixXd m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw DataError("ragged tensor in checkpoint");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c].get<double>();
    }
    return m;
}

double uniform_in(Rng& rng, double bound) { return (2.0 * rng.uniform() - 1.0) * bound; }

// log(1 + exp(x)) without overflow
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

// ---------------------------------------------------------------------------
// Score tables

void write_scores(const std::vector<ScoredPair>& scores, std::ostream& out) {
    char buf[64];
    for (const auto& s : scores) {
        std::snprintf(buf, sizeof buf, "%.17g", s.score);
        out << s.mention_a << '\t' << s.mention_b << '\t' << buf << '\n';
    }
}

std::vector<ScoredPair> parse_scores(std::istream& in) {
    std::vector<ScoredPair> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        ScoredPair s;
        std::string score;
        if (!(fields >> s.mention_a >> s.mention_b >> score))
            throw ParseError("expected mention_a<TAB>mention_b<TAB>score", line_no);
        try {
            std::size_t used = 0;
            s.score = std::stod(score, &used);
            if (used != score.size()) throw std::invalid_argument(score);
        } catch (const std::exception&) {
            throw ParseError("bad score '" + score + "'", line_no);
        }
        if (s.mention_b < s.mention_a) std::swap(s.mention_a, s.mention_b);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ScoredPair> load_scores(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return parse_scores(in);
}

// ---------------------------------------------------------------------------
// Representations and the MLP

VectorXd mention_repr(const Document& doc, const EventMention& mention,
                      const EmbeddingTable& embeddings, int max_len) {
    const int d = embeddings.dim();
    const MatrixXd& v = embeddings.vectors(doc.doc_id);
    if (v.rows() != doc.size())
        throw DataError("embeddings for " + doc.doc_id + " do not match its token count");
    VectorXd out = VectorXd::Zero(static_cast<Eigen::Index>(max_len) * d);
    const int n = std::min(mention.span.length(), max_len);
    for (int t = 0; t < n; ++t) out.segment(t * d, d) = v.row(mention.span.start + t).transpose();
    return out;
}

VectorXd pair_representation(const VectorXd& v_a, const VectorXd& v_b, const VectorXd& h_a,
                             const VectorXd& h_b) {
    VectorXd out(v_a.size() + v_b.size() + h_a.size() + h_b.size());
    out << v_a, v_b, h_a, h_b;
    return out;
}

void MlpParams::validate() const {
    if (layers.empty()) throw DataError("MLP has no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& L = layers[l];
        if (L.b.size() != L.W.rows()) throw DataError("MLP bias does not match layer width");
        if (l > 0 && L.W.cols() != layers[l - 1].W.rows())
            throw DataError("MLP layer shapes do not compose");
        if (!L.W.allFinite() || !L.b.allFinite()) throw NumericError("non-finite MLP parameters");
    }
    if (layers.back().W.rows() != 1) throw DataError("MLP output layer must have width 1");
}

MlpParams MlpParams::random(const std::vector<int>& widths, Rng& rng) {
    MlpParams p;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const int in = widths[l];
        const int out = widths[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        MlpLayer L{MatrixXd(out, in), VectorXd(out)};
        for (int c = 0; c < in; ++c)
            for (int r = 0; r < out; ++r) L.W(r, c) = uniform_in(rng, bound);
        for (int r = 0; r < out; ++r) L.b[r] = uniform_in(rng, bound);
        p.layers.push_back(std::move(L));
    }
    return p;
}

MlpParams MlpParams::zeros(const std::vector<int>& widths) {
    MlpParams p;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l)
        p.layers.push_back({MatrixXd::Zero(widths[l + 1], widths[l]), VectorXd::Zero(widths[l + 1])});
    return p;
}

json MlpParams::to_json() const {
    json out = json::array();
    for (const auto& L : layers)
        out.push_back({{"W", matrix_json(L.W)},
                       {"b", std::vector<double>(L.b.data(), L.b.data() + L.b.size())}});
    return out;
}

MlpParams MlpParams::from_json(const json& j) {
    MlpParams p;
    for (const auto& L : j) {
        const auto b = L.at("b").get<std::vector<double>>();
        p.layers.push_back({matrix_from_json(L.at("W")),
                            Eigen::Map<const VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()))});
    }
    p.validate();
    return p;
}

double mlp_logit(const VectorXd& x, const MlpParams& mlp) {
    if (x.size() != mlp.in_dim())
        throw DataError("pair representation has length " + std::to_string(x.size()) +
                        " but the MLP expects " + std::to_string(mlp.in_dim()));
    VectorXd act = x;
    for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
        VectorXd z = mlp.layers[l].W * act + mlp.layers[l].b;
        act = l + 1 < mlp.layers.size() ? VectorXd(z.cwiseMax(0.0)) : z;
    }
    return act[0];
}

double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double score_pair(const VectorXd& pr, const MlpParams& mlp) {
    const double p = sigmoid(mlp_logit(pr, mlp));
    return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

int lemma_baseline(const MentionPair& pair, const Corpus& corpus) {
    return to_lower(corpus.mention(pair.mention_a).head_lemma) ==
                   to_lower(corpus.mention(pair.mention_b).head_lemma)
               ? 1
               : 0;
}

std::vector<ScoredPair> lemma_baseline_scores(const std::vector<MentionPair>& pairs,
                                              const Corpus& corpus) {
    std::vector<ScoredPair> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs)
        out.push_back({p.mention_a, p.mention_b, static_cast<double>(lemma_baseline(p, corpus))});
    return out;
}

// ---------------------------------------------------------------------------
// Model

std::vector<int> ModelConfig::mlp_widths() const {
    const int in = pair_dim();
    std::vector<int> widths{in};
    if (mlp_hidden.empty()) {
        widths.push_back(std::max(1, in / 2));
        widths.push_back(std::max(1, in / 4));
    } else {
        widths.insert(widths.end(), mlp_hidden.begin(), mlp_hidden.end());
    }
    widths.push_back(1);
    return widths;
}

void ModelConfig::validate() const {
    if (embed_dim < 1 || gat_dim < 1 || heads < 1 || layers < 1 || max_mention_len < 1)
        throw ConfigError("model dimensions, heads, layers and max mention length must be >= 1");
    if (layers > 1 && gat_dim != embed_dim)
        throw ConfigError("stacked GAT layers require d' == d");
    if (!mlp_hidden.empty() && mlp_hidden.size() != 2)
        throw ConfigError("a 3-layer MLP takes exactly two hidden widths");
    for (int w : mlp_hidden)
        if (w < 1) throw ConfigError("MLP widths must be >= 1");
    if (!(leaky_slope >= 0.0) || !std::isfinite(leaky_slope))
        throw ConfigError("leaky_slope must be a finite non-negative value");
}

json ModelConfig::to_json() const {
    return {{"d", embed_dim},          {"d_prime", gat_dim},        {"K", heads},
            {"layers", layers},        {"M", max_mention_len},      {"leaky_slope", leaky_slope},
            {"mlp_hidden", mlp_hidden}, {"mirror_init", mirror_init}};
}

ModelConfig ModelConfig::from_json(const json& j) {
    ModelConfig c;
    c.embed_dim = j.value("d", c.embed_dim);
    c.gat_dim = j.value("d_prime", c.gat_dim);
    c.heads = j.value("K", c.heads);
    c.layers = j.value("layers", c.layers);
    c.max_mention_len = j.value("M", c.max_mention_len);
    c.leaky_slope = j.value("leaky_slope", c.leaky_slope);
    c.mlp_hidden = j.value("mlp_hidden", c.mlp_hidden);
    c.mirror_init = j.value("mirror_init", c.mirror_init);
    c.validate();
    return c;
}

Model Model::init(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    Model m;
    m.config = config;
    Rng rng(splitmix64(seed));
    for (int l = 0; l < config.layers; ++l) {
        const int in = l == 0 ? config.embed_dim : config.gat_dim;
        m.gat.push_back(GatParams::random(config.heads, in, config.gat_dim, rng, config.leaky_slope));
    }
    m.mlp = MlpParams::random(config.mlp_widths(), rng);
    if (config.mirror_init) {
        auto& L = m.mlp.layers.front();
        const int mm = config.max_mention_len * config.embed_dim;
        const int g = config.gat_dim;
        for (Eigen::Index r = 0; r + 1 < L.W.rows(); r += 2) {
            for (int c = 0; c < mm; ++c) L.W(r, mm + c) = -L.W(r, c);
            for (int c = 0; c < g; ++c) L.W(r, 2 * mm + g + c) = -L.W(r, 2 * mm + c);
            L.W.row(r + 1) = -L.W.row(r);
            L.b(r + 1) = L.b(r);
        }
    }
    return m;
}

Model Model::zeros_like(const Model& like) {
    Model m = like;
    for (auto t : m.tensors()) std::fill(t.begin(), t.end(), 0.0);
    return m;
}

std::vector<std::span<double>> Model::tensors() {
    std::vector<std::span<double>> out;
    for (auto& layer : gat)
        for (auto& head : layer.heads) {
            out.emplace_back(head.W.data(), static_cast<std::size_t>(head.W.size()));
            out.emplace_back(head.a.data(), static_cast<std::size_t>(head.a.size()));
        }
    for (auto& L : mlp.layers) {
        out.emplace_back(L.W.data(), static_cast<std::size_t>(L.W.size()));
        out.emplace_back(L.b.data(), static_cast<std::size_t>(L.b.size()));
    }
    return out;
}

std::vector<std::span<const double>> Model::tensors() const {
    std::vector<std::span<const double>> out;
    for (auto t : const_cast<Model*>(this)->tensors()) out.emplace_back(t.data(), t.size());
    return out;
}

std::size_t Model::parameter_count() const {
    std::size_t n = 0;
    for (auto t : tensors()) n += t.size();
    return n;
}

bool Model::operator==(const Model& other) const {
    if (!(config.to_json() == other.config.to_json())) return false;
    const auto a = tensors();
    const auto b = other.tensors();
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].size() != b[i].size() || !std::equal(a[i].begin(), a[i].end(), b[i].begin()))
            return false;
    return true;
}

json Model::to_json() const {
    json layers = json::array();
    for (const auto& g : gat) layers.push_back(g.to_json());
    return {{"config", config.to_json()}, {"gat", layers}, {"mlp", mlp.to_json()}};
}

Model Model::from_json(const json& j) {
    try {
        Model m;
        m.config = ModelConfig::from_json(j.at("config"));
        for (const auto& g : j.at("gat")) m.gat.push_back(GatParams::from_json(g));
        m.mlp = MlpParams::from_json(j.at("mlp"));
        if (static_cast<int>(m.gat.size()) != m.config.layers)
            throw DataError("checkpoint layer count does not match its config");
        for (std::size_t l = 0; l < m.gat.size(); ++l) {
            const int in = l == 0 ? m.config.embed_dim : m.config.gat_dim;
            if (m.gat[l].num_heads() != m.config.heads || m.gat[l].in_dim() != in ||
                m.gat[l].out_dim() != m.config.gat_dim)
                throw DataError("checkpoint GAT shapes do not match its config");
        }
        const auto widths = m.config.mlp_widths();
        if (m.mlp.layers.size() + 1 != widths.size())
            throw DataError("checkpoint MLP depth does not match its config");
        for (std::size_t l = 0; l < m.mlp.layers.size(); ++l)
            if (m.mlp.layers[l].W.cols() != widths[l] || m.mlp.layers[l].W.rows() != widths[l + 1])
                throw DataError("checkpoint MLP shapes do not match its config");
        return m;
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid checkpoint: ") + e.what());
    }
}

void Model::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << to_json().dump() << '\n';
}

Model Model::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Forward / backward

PairExample make_example(const PipelineInputs& in, const MentionPair& pair, int max_len) {
    const auto& a = in.corpus->mention(pair.mention_a);
    const auto& b = in.corpus->mention(pair.mention_b);
    PairExample ex;
    ex.mention_a = pair.mention_a;
    ex.mention_b = pair.mention_b;
    ex.graph = build_pair_graph(in, a, b);
    ex.v_a = mention_repr(in.corpus->document(a.doc_id), a, *in.embeddings, max_len);
    ex.v_b = mention_repr(in.corpus->document(b.doc_id), b, *in.embeddings, max_len);
    ex.label = pair.label.value_or(false) ? 1.0 : 0.0;
    return ex;
}

namespace {

struct ForwardState {
    std::vector<MatrixXd> inputs;  // per GAT layer
    std::vector<GatCache> caches;
    MatrixXd h_out;
    std::vector<VectorXd> acts;  // MLP inputs per layer
    std::vector<VectorXd> pre;   // MLP pre-activations per layer
    double logit = 0.0;
};

ForwardState forward(const Model& model, const PairExample& ex) {
    ForwardState st;
    MatrixXd h = ex.graph.features;
    st.caches.resize(model.gat.size());
    for (std::size_t l = 0; l < model.gat.size(); ++l) {
        st.inputs.push_back(h);
        h = gat_forward(ex.graph.adjacency, h, model.gat[l], &st.caches[l]);
    }
    st.h_out = std::move(h);
    VectorXd x = pair_representation(ex.v_a, ex.v_b, st.h_out.row(ex.graph.node_a).transpose(),
                                     st.h_out.row(ex.graph.node_b).transpose());
    if (x.size() != model.mlp.in_dim())
        throw DataError("pair representation has length " + std::to_string(x.size()) +
                        " but the MLP expects " + std::to_string(model.mlp.in_dim()));
    const auto& layers = model.mlp.layers;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        st.acts.push_back(x);
        VectorXd z = layers[l].W * x + layers[l].b;
        st.pre.push_back(z);
        x = l + 1 < layers.size() ? VectorXd(z.cwiseMax(0.0)) : z;
    }
    st.logit = x[0];
    return st;
}

}  // namespace

double predict_example(const Model& model, const PairExample& ex) {
    const double p = sigmoid(forward(model, ex).logit);
    return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double pair_loss(const Model& model, const PairExample& ex, Model* grad) {
    const ForwardState st = forward(model, ex);
    const double y = ex.label;
    const double loss = softplus(st.logit) - y * st.logit;
    if (!grad) return loss;

    const auto& layers = model.mlp.layers;
    VectorXd g = VectorXd::Constant(1, sigmoid(st.logit) - y);
    for (std::size_t l = layers.size(); l-- > 0;) {
        if (l + 1 < layers.size()) g = (g.array() * (st.pre[l].array() > 0.0).cast<double>()).matrix();
        grad->mlp.layers[l].W.noalias() += g * st.acts[l].transpose();
        grad->mlp.layers[l].b += g;
        g = layers[l].W.transpose() * g;
    }

    const int d_prime = model.config.gat_dim;
    const Eigen::Index offset = ex.v_a.size() + ex.v_b.size();
    MatrixXd upstream = MatrixXd::Zero(st.h_out.rows(), st.h_out.cols());
    upstream.row(ex.graph.node_a) += g.segment(offset, d_prime).transpose();
    upstream.row(ex.graph.node_b) += g.segment(offset + d_prime, d_prime).transpose();
    for (std::size_t l = model.gat.size(); l-- > 0;) {
        auto gg = gat_backward(ex.graph.adjacency, st.inputs[l], model.gat[l], st.caches[l], upstream);
        for (std::size_t k = 0; k < gg.dW.size(); ++k) {
            grad->gat[l].heads[k].W += gg.dW[k];
            grad->gat[l].heads[k].a += gg.da[k];
        }
        upstream = std::move(gg.dh);
    }
    return loss;
}

// ---------------------------------------------------------------------------
// Training

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw ConfigError("learning_rate must be finite and >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0))
        throw ConfigError("invalid Adam moments");
}

json TrainConfig::to_json() const {
    return {{"learning_rate", learning_rate}, {"warmup_steps", warmup_steps},
            {"batch_size", batch_size},       {"weight_decay", weight_decay},
            {"epochs", epochs},               {"seed", seed},
            {"beta1", beta1},                 {"beta2", beta2},
            {"epsilon", epsilon}};
}

TrainConfig TrainConfig::from_json(const json& j) {
    TrainConfig c;
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.warmup_steps = j.value("warmup_steps", c.warmup_steps);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.epochs = j.value("epochs", c.epochs);
    c.seed = j.value("seed", c.seed);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.validate();
    return c;
}

TrainResult train(std::vector<PairExample> examples, Model initial, const TrainConfig& cfg) {
    cfg.validate();
    TrainResult result{std::move(initial), {}};
    Model& model = result.model;
    if (examples.empty()) return result;

    Model grad = Model::zeros_like(model);
    Model m1 = Model::zeros_like(model);
    Model m2 = Model::zeros_like(model);
    auto params = model.tensors();
    auto grads = grad.tensors();
    auto first = m1.tensors();
    auto second = m2.tensors();

    const std::size_t n = examples.size();
    const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
    const std::size_t steps_per_epoch = (n + bs - 1) / bs;
    const std::size_t total = steps_per_epoch * static_cast<std::size_t>(cfg.epochs);
    const double warmup = cfg.warmup_steps >= 0
                              ? static_cast<double>(cfg.warmup_steps)
                              : std::ceil(0.1 * static_cast<double>(total));
    if (warmup > static_cast<double>(total) && total > 0)
        throw ConfigError("warmup_steps exceeds the total number of steps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.seed);
    std::size_t step = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t batch = 0; batch < steps_per_epoch; ++batch) {
            for (auto t : grads) std::fill(t.begin(), t.end(), 0.0);
            const std::size_t begin = batch * bs;
            const std::size_t end = std::min(n, begin + bs);
            for (std::size_t i = begin; i < end; ++i) {
                const auto& ex = examples[order[i]];
                const double loss = pair_loss(model, ex, &grad);
                if (!std::isfinite(loss))
                    throw NumericError("non-finite loss in epoch " + std::to_string(epoch) +
                                       " batch " + std::to_string(batch) + " at pair " +
                                       ex.mention_a + " " + ex.mention_b);
                epoch_loss += loss;
            }
            const double scale = 1.0 / static_cast<double>(end - begin);
            ++step;
            const double lr = warmup > 0.0
                                  ? cfg.learning_rate * std::min(1.0, static_cast<double>(step) / warmup)
                                  : cfg.learning_rate;
            const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
            for (std::size_t t = 0; t < params.size(); ++t) {
                auto p = params[t];
                auto g = grads[t];
                auto mo = first[t];
                auto ve = second[t];
                for (std::size_t i = 0; i < p.size(); ++i) {
                    const double gi = g[i] * scale;
                    mo[i] = cfg.beta1 * mo[i] + (1.0 - cfg.beta1) * gi;
                    ve[i] = cfg.beta2 * ve[i] + (1.0 - cfg.beta2) * gi * gi;
                    const double update =
                        (mo[i] / c1) / (std::sqrt(ve[i] / c2) + cfg.epsilon) + cfg.weight_decay * p[i];
                    p[i] -= lr * update;
                }
            }
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(n));
    }
    return result;
}

TrainResult train(const std::vector<MentionPair>& pairs, const PipelineInputs& in,
                  const ModelConfig& config, const TrainConfig& cfg) {
    config.validate();
    cfg.validate();
    if (in.embeddings->dim() != config.embed_dim)
        throw ConfigError("embedding dimension " + std::to_string(in.embeddings->dim()) +
                          " does not match model d = " + std::to_string(config.embed_dim));
    std::vector<PairExample> examples;
    examples.reserve(pairs.size());
    for (const auto& p : pairs) {
        if (!p.label) throw DataError("training pair " + p.mention_a + " " + p.mention_b + " has no label");
        examples.push_back(make_example(in, p, config.max_mention_len));
    }
    return train(std::move(examples), Model::init(config, cfg.seed), cfg);
}

std::vector<ScoredPair> predict(const std::vector<MentionPair>& pairs, const Model& model,
                                const PipelineInputs& in, int workers) {
    if (in.embeddings->dim() != model.config.embed_dim)
        throw ConfigError("embedding dimension " + std::to_string(in.embeddings->dim()) +
                          " does not match model d = " + std::to_string(model.config.embed_dim));
    std::vector<ScoredPair> out(pairs.size());
    auto score_range = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < pairs.size(); i += stride) {
            const auto ex = make_example(in, pairs[i], model.config.max_mention_len);
            out[i] = {pairs[i].mention_a, pairs[i].mention_b, predict_example(model, ex)};
        }
    };
    const std::size_t n_workers =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), 1, std::max<std::size_t>(1, pairs.size()));
    if (n_workers == 1) {
        score_range(0, 1);
        return out;
    }
    std::vector<std::exception_ptr> errors(n_workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                score_range(w, n_workers);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace diec
