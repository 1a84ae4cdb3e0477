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

#ifndef PHOTONGRAD_OPTIMIZE_HPP
#define PHOTONGRAD_OPTIMIZE_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "photongrad/gradients.hpp"

namespace photongrad {

enum class Method { GdPsr, GdFd, GdSpsa, NelderMead };

Method method_from_string(const std::string& name);
std::string method_to_string(Method m);

struct OptimizerConfig {
    Method method = Method::GdPsr;
    std::string name;  // label in artifacts; defaults to the method name
    double learning_rate = 0.4;
    int max_iterations = 100;
    double tolerance = 0.0;  // 0 disables the convergence stop
    int tolerance_window = 10;
    double fd_stepsize = 0.01;
    SpsaGains spsa_gains;
    double simplex_step = 0.1;  // Nelder-Mead initial displacement

    std::string label() const { return name.empty() ? method_to_string(method) : name; }
};

struct TracePoint {
    int iteration = 0;
    Eigen::VectorXd theta;
    double loss = 0.0;
    long long evaluations = 0;       // estimations this iteration
    long long evaluations_loss = 0;  // portion spent on the loss record
    long long shots = 0;
    double wall_seconds = 0.0;
};

struct OptimizationTrace {
    std::vector<TracePoint> points;
    Eigen::VectorXd final_theta;
    long long total_evaluations = 0;
    long long total_shots = 0;
    bool aborted_non_finite = false;

    nlohmann::json to_json() const;
};

/// One gradient-descent step evaluation at θ: loss record plus gradient,
/// with the estimation counts split between them.
struct StepEval {
    double loss = 0.0;
    Eigen::VectorXd grad;
    long long evaluations = 0;
    long long evaluations_loss = 0;
    long long shots = 0;
};

using GradientStep = std::function<StepEval(const Eigen::VectorXd&, int iteration)>;

/// θ ← θ - η_k ∇; η_k is the configured learning rate, or the SPSA gain
/// schedule a_k for Method::GdSpsa. Stops at max iterations or when the
/// best-loss improvement over `tolerance_window` iterations falls below
/// `tolerance` (when positive). A non-finite loss or gradient aborts with
/// the trace collected so far.
OptimizationTrace gradient_descent(const GradientStep& step, Eigen::VectorXd theta0,
                                   const OptimizerConfig& config);

struct LossSample {
    double loss = 0.0;
    long long evaluations = 0;
    long long shots = 0;
};

using LossFunction = std::function<LossSample(const Eigen::VectorXd&)>;

/// Standard simplex method (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5); the initial simplex is θ0 plus one vertex displaced by
/// `simplex_step` per coordinate (must be nonzero). Each trace point records
/// the best vertex after one reflect/expand/contract/shrink cycle.
OptimizationTrace nelder_mead(const LossFunction& loss, Eigen::VectorXd theta0,
                              const OptimizerConfig& config);

}  // namespace photongrad

#endif
