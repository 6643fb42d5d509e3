#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace qcc {

struct OptimizerConfig {
    int restarts = 8;
    int max_iters = 300;
    double penalty_weight = 10.0;  // symmetry penalty mu, used by extensions
    std::uint64_t seed = 0;
    double tolerance = 1e-10;      // improvement threshold for convergence
    double target = -1.0;          // stop all restarts once best <= target; <0 disables
    double init_step = 0.5;
    double min_step = 1e-9;
    int stall_iters = 50;          // converged when improvement < tolerance this long
};

struct OptimizerReport {
    double best_value = 0.0;
    int restarts_used = 0;
    long long evaluations = 0;
    bool converged = false;
    std::vector<double> restart_values;  // best objective seen per restart
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct SearchOutcome {
    Eigen::VectorXd best_x;
    OptimizerReport report;
};

// Multi-restart compass (pattern) search. Restart k starts from starts[k]
// when provided, otherwise from a seeded Gaussian point of scale init_step.
// Deterministic given (config.seed, starts); parallel restarts (capped by
// the QCC_THREADS environment variable) reduce by (value, restart index).
SearchOutcome minimize_multistart(const Objective& f, int n_params,
                                  const OptimizerConfig& config,
                                  const std::vector<Eigen::VectorXd>& starts = {});

} // namespace qcc
