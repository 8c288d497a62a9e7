#include "kpe/neldermead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace kpe {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& start, double initial_step,
                             int max_iters, double ftol) {
    const int n = static_cast<int>(start.size());
    const double alpha = 1.0, gamma = 2.0, beta = 0.5, sigma = 0.5;

    std::vector<Eigen::VectorXd> x(n + 1, start);
    std::vector<double> fx(n + 1);
    int evals = 0;
    for (int i = 1; i <= n; ++i) x[i](i - 1) += initial_step;
    for (int i = 0; i <= n; ++i) {
        fx[i] = f(x[i]);
        ++evals;
    }

    std::vector<int> order(n + 1);
    auto sort_order = [&]() {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return fx[a] < fx[b]; });
    };

    int iter = 0;
    for (; iter < max_iters; ++iter) {
        sort_order();
        const int best = order[0], worst = order[n], second = order[n - 1];
        if (std::abs(fx[worst] - fx[best]) <= ftol * (std::abs(fx[best]) + ftol)) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != worst) centroid += x[i];
        centroid /= n;

        Eigen::VectorXd xr = centroid + alpha * (centroid - x[worst]);
        const double fr = f(xr);
        ++evals;

        if (fr < fx[best]) {
            Eigen::VectorXd xe = centroid + gamma * (xr - centroid);
            const double fe = f(xe);
            ++evals;
            if (fe < fr) {
                x[worst] = xe;
                fx[worst] = fe;
            } else {
                x[worst] = xr;
                fx[worst] = fr;
            }
        } else if (fr < fx[second]) {
            x[worst] = xr;
            fx[worst] = fr;
        } else {
            const bool outside = fr < fx[worst];
            Eigen::VectorXd xc =
                outside ? centroid + beta * (xr - centroid) : centroid + beta * (x[worst] - centroid);
            const double fc = f(xc);
            ++evals;
            if (fc < (outside ? fr : fx[worst])) {
                x[worst] = xc;
                fx[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    x[i] = x[best] + sigma * (x[i] - x[best]);
                    fx[i] = f(x[i]);
                    ++evals;
                }
            }
        }
    }

    sort_order();
    NelderMeadResult out;
    out.x = x[order[0]];
    out.value = fx[order[0]];
    out.iterations = iter;
    out.evaluations = evals;
    return out;
}

}  // namespace kpe
