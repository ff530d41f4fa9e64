#include "diec/assignment.hpp"

#include <algorithm>
#include <limits>

namespace diec {

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights) {
    const int rows = static_cast<int>(weights.rows());
    const int cols = static_cast<int>(weights.cols());
    const int n = std::max(rows, cols);
    if (n == 0) return {};

    // square cost matrix, padded with zeros; minimise (max - w)
    const double top = weights.size() ? weights.maxCoeff() : 0.0;
    Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(n, n, top);
    cost.topLeftCorner(rows, cols) = (top - weights.array()).matrix();

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> out(rows, -1);
    for (int j = 1; j <= n; ++j) {
        const int i = p[j] - 1;
        if (i < rows && j - 1 < cols) out[i] = j - 1;
    }
    return out;
}

double assignment_value(const Eigen::MatrixXd& weights, const std::vector<int>& assignment) {
    double total = 0.0;
    for (std::size_t r = 0; r < assignment.size(); ++r)
        if (assignment[r] >= 0) total += weights(static_cast<Eigen::Index>(r), assignment[r]);
    return total;
}

}  // namespace diec
