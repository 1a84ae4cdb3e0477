/*
 * Copyright 2026 The photongrad authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "photongrad/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace photongrad {

Method method_from_string(const std::string& name) {
    if (name == "gd-psr") return Method::GdPsr;
    if (name == "gd-fd") return Method::GdFd;
    if (name == "gd-spsa") return Method::GdSpsa;
    if (name == "nelder-mead") return Method::NelderMead;
    throw std::invalid_argument("unknown optimizer method '" + name + "'");
}

std::string method_to_string(Method m) {
    switch (m) {
        case Method::GdPsr: return "gd-psr";
        case Method::GdFd: return "gd-fd";
        case Method::GdSpsa: return "gd-spsa";
        case Method::NelderMead: return "nelder-mead";
    }
    return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Convergence window on the best loss seen: stop once a full window brings
/// less than `tolerance` improvement.
class StopWindow {
  public:
    StopWindow(double tolerance, int window)
        : tolerance_(tolerance), window_(window) {}

    bool update(double loss) {
        if (tolerance_ <= 0.0) return false;
        if (loss < best_ - tolerance_) {
            best_ = std::min(best_, loss);
            stale_ = 0;
            return false;
        }
        best_ = std::min(best_, loss);
        return ++stale_ >= window_;
    }

  private:
    double tolerance_;
    int window_;
    double best_ = std::numeric_limits<double>::infinity();
    int stale_ = 0;
};

}  // namespace

nlohmann::json OptimizationTrace::to_json() const {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& pt : points) {
        nlohmann::json p{{"iteration", pt.iteration},
                         {"loss", pt.loss},
                         {"evaluations", pt.evaluations},
                         {"evaluations_loss", pt.evaluations_loss},
                         {"shots", pt.shots},
                         {"wall_seconds", pt.wall_seconds}};
        std::vector<double> th(pt.theta.data(), pt.theta.data() + pt.theta.size());
        p["theta"] = th;
        pts.push_back(std::move(p));
    }
    std::vector<double> final_th(final_theta.data(),
                                 final_theta.data() + final_theta.size());
    return {{"points", std::move(pts)},
            {"final_theta", final_th},
            {"total_evaluations", total_evaluations},
            {"total_shots", total_shots},
            {"aborted_non_finite", aborted_non_finite}};
}

OptimizationTrace gradient_descent(const GradientStep& step, Eigen::VectorXd theta0,
                                   const OptimizerConfig& config) {
    OptimizationTrace trace;
    Eigen::VectorXd theta = std::move(theta0);
    StopWindow stop(config.tolerance, config.tolerance_window);
    const auto t0 = Clock::now();

    for (int k = 0; k < config.max_iterations; ++k) {
        const StepEval se = step(theta, k);
        TracePoint pt;
        pt.iteration = k;
        pt.theta = theta;
        pt.loss = se.loss;
        pt.evaluations = se.evaluations;
        pt.evaluations_loss = se.evaluations_loss;
        pt.shots = se.shots;
        pt.wall_seconds = seconds_since(t0);
        trace.points.push_back(pt);
        trace.total_evaluations += se.evaluations;
        trace.total_shots += se.shots;

        if (!std::isfinite(se.loss) || !se.grad.allFinite()) {
            trace.aborted_non_finite = true;
            break;
        }
        const double rate = (config.method == Method::GdSpsa)
                                ? config.spsa_gains.step_size(k)
                                : config.learning_rate;
        theta -= rate * se.grad;
        if (stop.update(se.loss)) break;
    }
    trace.final_theta = theta;
    return trace;
}

OptimizationTrace nelder_mead(const LossFunction& loss, Eigen::VectorXd theta0,
                              const OptimizerConfig& config) {
    const Eigen::Index d = theta0.size();
    if (d < 1) throw std::invalid_argument("nelder_mead: dimension must be >= 1");
    if (config.simplex_step == 0.0)
        throw std::invalid_argument("nelder_mead: zero simplex displacement is degenerate");

    constexpr double kReflect = 1.0;
    constexpr double kExpand = 2.0;
    constexpr double kContract = 0.5;
    constexpr double kShrink = 0.5;

    OptimizationTrace trace;
    const auto t0 = Clock::now();
    long long iter_evals = 0, iter_shots = 0;

    auto eval = [&](const Eigen::VectorXd& x) {
        const LossSample s = loss(x);
        iter_evals += s.evaluations;
        iter_shots += s.shots;
        return s.loss;
    };

    std::vector<Eigen::VectorXd> verts;
    std::vector<double> vals;
    verts.reserve(static_cast<std::size_t>(d) + 1);
    verts.push_back(theta0);
    for (Eigen::Index i = 0; i < d; ++i) {
        Eigen::VectorXd v = theta0;
        v(i) += config.simplex_step;
        verts.push_back(std::move(v));
    }
    for (const auto& v : verts) vals.push_back(eval(v));

    std::vector<std::size_t> order(verts.size());
    auto sort_simplex = [&]() {
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    };

    StopWindow stop(config.tolerance, config.tolerance_window);
    for (int k = 0; k < config.max_iterations; ++k) {
        sort_simplex();
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (std::size_t i = 0; i < verts.size(); ++i) {
            if (i != worst) centroid += verts[i];
        }
        centroid /= static_cast<double>(d);

        const Eigen::VectorXd reflected = centroid + kReflect * (centroid - verts[worst]);
        const double f_reflected = eval(reflected);

        if (f_reflected < vals[best]) {
            const Eigen::VectorXd expanded = centroid + kExpand * (reflected - centroid);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                verts[worst] = expanded;
                vals[worst] = f_expanded;
            } else {
                verts[worst] = reflected;
                vals[worst] = f_reflected;
            }
        } else if (f_reflected < vals[second_worst]) {
            verts[worst] = reflected;
            vals[worst] = f_reflected;
        } else {
            const Eigen::VectorXd contracted =
                centroid + kContract * (verts[worst] - centroid);
            const double f_contracted = eval(contracted);
            if (f_contracted < vals[worst]) {
                verts[worst] = contracted;
                vals[worst] = f_contracted;
            } else {
                for (std::size_t i = 0; i < verts.size(); ++i) {
                    if (i == best) continue;
                    verts[i] = verts[best] + kShrink * (verts[i] - verts[best]);
                    vals[i] = eval(verts[i]);
                }
            }
        }

        sort_simplex();
        TracePoint pt;
        pt.iteration = k;
        pt.theta = verts[order.front()];
        pt.loss = vals[order.front()];
        pt.evaluations = iter_evals;
        pt.evaluations_loss = iter_evals;
        pt.shots = iter_shots;
        pt.wall_seconds = seconds_since(t0);
        trace.points.push_back(pt);
        trace.total_evaluations += iter_evals;
        trace.total_shots += iter_shots;
        iter_evals = 0;
        iter_shots = 0;

        if (!std::isfinite(vals[order.front()])) {
            trace.aborted_non_finite = true;
            break;
        }
        if (stop.update(vals[order.front()])) break;
    }

    sort_simplex();
    trace.final_theta = verts[order.front()];
    return trace;
}

}  // namespace photongrad
