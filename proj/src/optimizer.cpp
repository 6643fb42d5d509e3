#include "qcc/optimizer.hpp"

#include "qcc/rng.hpp"

#include <algorithm>
#include <cstdlib>
#include <future>
#include <limits>

namespace qcc {

namespace {

struct RestartResult {
    Eigen::VectorXd x;
    double value = std::numeric_limits<double>::infinity();
    long long evals = 0;
    bool converged = false;
};

RestartResult compass_search(const Objective& f, Eigen::VectorXd x,
                             const OptimizerConfig& cfg) {
    RestartResult res;
    const int n = int(x.size());
    double value = f(x);
    ++res.evals;
    double step = cfg.init_step;
    double window_best = value;
    int stall = 0;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        if (cfg.target >= 0.0 && value <= cfg.target) { res.converged = true; break; }
        bool improved = false;
        for (int i = 0; i < n; ++i) {
            for (double sgn : {1.0, -1.0}) {
                const double old = x[i];
                x[i] = old + sgn * step;
                const double v = f(x);
                ++res.evals;
                if (v < value - 1e-15) {
                    value = v;
                    improved = true;
                    break;  // opportunistic: keep the move
                }
                x[i] = old;
            }
        }
        if (!improved) {
            step *= 0.5;
            if (step < cfg.min_step) { res.converged = true; break; }
        }
        if (value < window_best - cfg.tolerance) {
            window_best = value;
            stall = 0;
        } else if (++stall >= cfg.stall_iters) {
            res.converged = true;
            break;
        }
    }
    res.x = std::move(x);
    res.value = value;
    return res;
}

int thread_cap() {
    if (const char* env = std::getenv("QCC_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

} // namespace

SearchOutcome minimize_multistart(const Objective& f, int n_params,
                                  const OptimizerConfig& cfg,
                                  const std::vector<Eigen::VectorXd>& starts) {
    const int restarts = std::max(cfg.restarts, int(starts.size()));
    CounterRng master(cfg.seed);

    std::vector<Eigen::VectorXd> x0(restarts);
    for (int k = 0; k < restarts; ++k) {
        if (k < int(starts.size())) {
            if (int(starts[k].size()) != n_params)
                throw std::invalid_argument("minimize_multistart: start size mismatch");
            x0[k] = starts[k];
        } else {
            CounterRng r = master.child(k);
            x0[k] = Eigen::VectorXd::Zero(n_params);
            // When no explicit starts are given, restart 0 probes the base point.
            if (!(starts.empty() && k == 0))
                for (int i = 0; i < n_params; ++i) x0[k][i] = r.normal() * cfg.init_step * 2.0;
        }
    }

    SearchOutcome out;
    out.report.restart_values.assign(restarts, std::numeric_limits<double>::infinity());
    double best = std::numeric_limits<double>::infinity();
    int best_idx = -1;
    bool best_conv = false;
    std::vector<RestartResult> results(restarts);

    const int cap = thread_cap();
    for (int base = 0; base < restarts; base += cap) {
        const int batch = std::min(cap, restarts - base);
        if (batch == 1) {
            results[base] = compass_search(f, x0[base], cfg);
        } else {
            std::vector<std::future<RestartResult>> futs;
            futs.reserve(batch);
            for (int j = 0; j < batch; ++j)
                futs.push_back(std::async(std::launch::async, [&, j] {
                    return compass_search(f, x0[base + j], cfg);
                }));
            for (int j = 0; j < batch; ++j) results[base + j] = futs[j].get();
        }
        for (int j = 0; j < batch; ++j) {
            const int k = base + j;
            out.report.restart_values[k] = results[k].value;
            out.report.evaluations += results[k].evals;
            ++out.report.restarts_used;
            if (results[k].value < best) {
                best = results[k].value;
                best_idx = k;
                best_conv = results[k].converged;
            }
        }
        if (cfg.target >= 0.0 && best <= cfg.target) break;
    }

    out.best_x = results[best_idx].x;
    out.report.best_value = best;
    out.report.converged = best_conv;
    out.report.restart_values.resize(out.report.restarts_used);
    return out;
}

} // namespace qcc
