#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "diec/error.hpp"
#include "diec/gnn.hpp"
#include "diec/rng.hpp"

using namespace diec;

namespace {

Adjacency random_graph(int n, double p, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int s = 0; s < n; ++s)
        for (int d = 0; d < n; ++d)
            if (s != d && rng.bernoulli(p)) edges.push_back({s, d});
    return Adjacency::from_edges(n, edges);
}

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

double rel_err(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-3});
}

double objective(const Adjacency& adj, const Eigen::MatrixXd& h, const GatParams& p,
                 const Eigen::MatrixXd& up) {
    return (gat_forward(adj, h, p).array() * up.array()).sum();
}

}  // namespace

TEST_SUITE("gnn") {

TEST_CASE("adjacency is in-neighbours plus self") {
    const Adjacency adj = Adjacency::from_edges(3, {{0, 1}, {2, 1}, {0, 1}, {1, 1}});
    CHECK(adj.in[0] == std::vector<int>{0});
    CHECK(adj.in[1] == std::vector<int>{0, 1, 2});
    CHECK(adj.in[2] == std::vector<int>{2});
    CHECK_THROWS_AS(Adjacency::from_edges(2, {{0, 2}}), DataError);
}

TEST_CASE("isolated node reduces to ReLU of the projection") {
    Rng rng(1);
    const GatParams p = GatParams::random(1, 3, 3, rng);
    const Adjacency adj = Adjacency::from_edges(4, {});
    const Eigen::MatrixXd h = random_matrix(4, 3, rng);
    const Eigen::MatrixXd out = gat_forward(adj, h, p);
    const Eigen::MatrixXd expected = (h * p.heads[0].W).cwiseMax(0.0);
    CHECK((out - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((dense_oracle(adj, h, p) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("identical features give uniform attention") {
    Rng rng(2);
    const GatParams p = GatParams::random(2, 4, 4, rng);
    const Adjacency two = Adjacency::from_edges(2, {{0, 1}, {1, 0}});
    const Eigen::MatrixXd same = Eigen::MatrixXd::Ones(2, 4);
    const auto att = attention_weights(two, same, p);
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i) {
            CHECK(att.weight(two, k, i, 0) == doctest::Approx(0.5).epsilon(1e-12));
            CHECK(att.weight(two, k, i, 1) == doctest::Approx(0.5).epsilon(1e-12));
        }
    const Adjacency g = random_graph(7, 0.4, rng);
    const auto uniform = attention_weights(g, Eigen::MatrixXd::Constant(7, 4, 0.3), p);
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 7; ++i)
            for (double a : uniform.alpha[k][i]) CHECK(a == doctest::Approx(1.0 / g.in[i].size()).epsilon(1e-12));
}

TEST_CASE("attention rows are distributions") {
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(20));
        const Adjacency adj = random_graph(n, 0.3, rng);
        const GatParams p = GatParams::random(3, 5, 4, rng);
        const auto att = attention_weights(adj, random_matrix(n, 5, rng), p);
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < n; ++i) {
                const auto& row = att.alpha[k][i];
                CHECK(row.size() == adj.in[i].size());
                CHECK(std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) <= 1e-9);
                for (double a : row) CHECK(a >= 0.0);
            }
    }
}

TEST_CASE("scaling the attention vector keeps the favourite neighbour") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const Adjacency adj = random_graph(8, 0.5, rng);
        const Eigen::MatrixXd h = random_matrix(8, 4, rng);
        GatParams p = GatParams::random(1, 4, 4, rng);
        const auto before = attention_weights(adj, h, p);
        p.heads[0].a *= 2.0;
        const auto after = attention_weights(adj, h, p);
        for (int i = 0; i < 8; ++i) {
            const auto& b = before.alpha[0][i];
            const auto& a = after.alpha[0][i];
            CHECK(std::max_element(b.begin(), b.end()) - b.begin() ==
                  std::max_element(a.begin(), a.end()) - a.begin());
        }
    }
}

TEST_CASE("forward matches the dense oracle") {
    Rng rng(5);
    {
        const Adjacency adj = random_graph(6, 0.4, rng);
        const GatParams p = GatParams::random(3, 4, 4, rng);
        const Eigen::MatrixXd h = random_matrix(6, 4, rng);
        CHECK((gat_forward(adj, h, p) - dense_oracle(adj, h, p)).cwiseAbs().maxCoeff() < 1e-9);
    }
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(50));
        const int d = 1 + static_cast<int>(rng.below(6));
        const int k = 1 + static_cast<int>(rng.below(3));
        const Adjacency adj = random_graph(n, rng.uniform() * 0.5, rng);
        const GatParams p = GatParams::random(k, d, 1 + static_cast<int>(rng.below(6)), rng);
        const Eigen::MatrixXd h = random_matrix(n, d, rng);
        CHECK((gat_forward(adj, h, p) - dense_oracle(adj, h, p)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("relabelling nodes permutes the output") {
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + static_cast<int>(rng.below(15));
        std::vector<std::pair<int, int>> edges;
        for (int s = 0; s < n; ++s)
            for (int d = 0; d < n; ++d)
                if (s != d && rng.bernoulli(0.3)) edges.push_back({s, d});
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        std::vector<std::pair<int, int>> moved;
        for (auto [s, d] : edges) moved.push_back({perm[s], perm[d]});
        const Eigen::MatrixXd h = random_matrix(n, 4, rng);
        Eigen::MatrixXd hp(n, 4);
        for (int i = 0; i < n; ++i) hp.row(perm[i]) = h.row(i);
        const GatParams p = GatParams::random(2, 4, 3, rng);
        const Eigen::MatrixXd out = gat_forward(Adjacency::from_edges(n, edges), h, p);
        const Eigen::MatrixXd outp = gat_forward(Adjacency::from_edges(n, moved), hp, p);
        for (int i = 0; i < n; ++i) CHECK((out.row(i) - outp.row(perm[i])).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("output depends only on the neighbourhood") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 10;
        const Adjacency adj = random_graph(n, 0.2, rng);
        const GatParams p = GatParams::random(2, 3, 3, rng);
        const Eigen::MatrixXd h = random_matrix(n, 3, rng);
        const Eigen::MatrixXd base = gat_forward(adj, h, p);
        const int j = static_cast<int>(rng.below(n));
        Eigen::MatrixXd h2 = h;
        h2.row(j) += random_matrix(1, 3, rng);
        const Eigen::MatrixXd moved = gat_forward(adj, h2, p);
        for (int i = 0; i < n; ++i) {
            if (std::binary_search(adj.in[i].begin(), adj.in[i].end(), j)) continue;
            CHECK(base.row(i) == moved.row(i));
        }
    }
}

TEST_CASE("zero upstream gives zero gradients") {
    Rng rng(8);
    const Adjacency adj = random_graph(5, 0.5, rng);
    const GatParams p = GatParams::random(2, 3, 3, rng);
    const Eigen::MatrixXd h = random_matrix(5, 3, rng);
    const auto g = gat_gradients(adj, h, p, Eigen::MatrixXd::Zero(5, 3));
    REQUIRE(g.dW.size() == 2);
    for (int k = 0; k < 2; ++k) {
        CHECK(g.dW[k].isZero(0.0));
        CHECK(g.da[k].isZero(0.0));
    }
    CHECK(g.dh.isZero(0.0));
}

TEST_CASE("gradients match central finite differences") {
    Rng rng(9);
    const double eps = 1e-5;
    for (int trial = 0; trial < 21; ++trial) {
        // first trial is the K=1, d=3, 4-node case
        const int n = trial == 0 ? 4 : 2 + static_cast<int>(rng.below(8));
        const int d = trial == 0 ? 3 : 1 + static_cast<int>(rng.below(4));
        const int k = trial == 0 ? 1 : 1 + static_cast<int>(rng.below(3));
        const int out = trial == 0 ? 3 : 1 + static_cast<int>(rng.below(4));
        const Adjacency adj = random_graph(n, 0.5, rng);
        const GatParams p = GatParams::random(k, d, out, rng);
        const Eigen::MatrixXd h = random_matrix(n, d, rng);
        const Eigen::MatrixXd up = random_matrix(n, out, rng);
        const auto g = gat_gradients(adj, h, p, up);

        GatCache cache;
        gat_forward(adj, h, p, &cache);
        const auto g2 = gat_backward(adj, h, p, cache, up);
        CHECK(g2.dh == g.dh);

        double worst = 0.0;
        for (int head = 0; head < k; ++head) {
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < out; ++c) {
                    GatParams plus = p, minus = p;
                    plus.heads[head].W(r, c) += eps;
                    minus.heads[head].W(r, c) -= eps;
                    const double fd = (objective(adj, h, plus, up) - objective(adj, h, minus, up)) / (2 * eps);
                    worst = std::max(worst, rel_err(g.dW[head](r, c), fd));
                }
            for (int t = 0; t < 2 * out; ++t) {
                GatParams plus = p, minus = p;
                plus.heads[head].a(t) += eps;
                minus.heads[head].a(t) -= eps;
                const double fd = (objective(adj, h, plus, up) - objective(adj, h, minus, up)) / (2 * eps);
                worst = std::max(worst, rel_err(g.da[head](t), fd));
            }
        }
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < d; ++c) {
                Eigen::MatrixXd hp = h, hm = h;
                hp(i, c) += eps;
                hm(i, c) -= eps;
                const double fd = (objective(adj, hp, p, up) - objective(adj, hm, p, up)) / (2 * eps);
                worst = std::max(worst, rel_err(g.dh(i, c), fd));
            }
        CAPTURE(trial);
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("shape and value checks") {
    Rng rng(10);
    const GatParams p = GatParams::random(2, 3, 3, rng);
    const Adjacency adj = Adjacency::from_edges(2, {});
    CHECK_THROWS_AS(gat_forward(adj, Eigen::MatrixXd::Zero(2, 4), p), DataError);
    CHECK_THROWS_AS(gat_forward(adj, Eigen::MatrixXd::Zero(3, 3), p), DataError);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 3);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(gat_forward(adj, bad, p), NumericError);
    GatParams broken = p;
    broken.heads[1].a.resize(5);
    CHECK_THROWS_AS(broken.validate(), DataError);
    CHECK_THROWS_AS(GatParams{}.validate(), DataError);
}

TEST_CASE("parameter json round trip validates shapes") {
    Rng rng(11);
    const GatParams p = GatParams::random(2, 4, 3, rng, 0.1);
    const GatParams back = GatParams::from_json(p.to_json());
    REQUIRE(back.num_heads() == 2);
    CHECK(back.leaky_slope == 0.1);
    for (int k = 0; k < 2; ++k) {
        CHECK(back.heads[k].W == p.heads[k].W);
        CHECK(back.heads[k].a == p.heads[k].a);
    }
    auto j = p.to_json();
    j["K"] = 3;
    CHECK_THROWS_AS(GatParams::from_json(j), DataError);
}

}  // TEST_SUITE
