#pragma once

#include <Eigen/Dense>

#include <functional>

namespace kpe {

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
};

// Downhill simplex minimization. Deterministic given the start point; stops
// after max_iters or when the simplex value spread falls below ftol.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& start, double initial_step,
                             int max_iters, double ftol = 1e-12);

}  // namespace kpe
