#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "netent/network.hpp"

namespace netent {

/// A regression function on [0, 1].
struct Target {
  std::string name;
  std::function<double(double)> g;
};

/// Built-in targets, all 1-Lipschitz and bounded by 1:
///   abs           |x - 1/2|
///   hat           max(0, 1/4 - |x - 1/2|)
///   sine-clamped  clamp(sin(2 pi x) / (2 pi), -0.1, 0.1)
///   zero          0
Target target_from_name(const std::string& name);

struct RegressionTask {
  Target target;
  double sigma = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

struct Sample {
  double x;
  double y;
};

/// x_i uniform on [0, 1], y_i = g(x_i) + sigma xi_i with xi_i standard
/// normal. The x and noise streams use independent derived seeds.
std::vector<Sample> generate_samples(const RegressionTask& task);

/// ceil(2 (width_const + 1) sqrt(rate_const + 1) n^(1/6)).
std::size_t depth_schedule(std::size_t n, double width_const, double rate_const);

/// clamp(v, -1, 1).
inline double truncate1(double v) { return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v); }

/// (1/n) sum (T_1(f(x_i)) - y_i)^2.
double empirical_risk(const NetworkConfig& cfg, const std::vector<Sample>& samples);

enum class Optimizer { GradientDescent, Adam };

struct FitOptions {
  std::size_t width = 8;
  /// Architectures tried: every depth in `depths`, all hidden layers of
  /// `width` neurons.
  std::vector<std::size_t> depths{2};
  std::size_t restarts = 32;
  std::size_t steps = 5000;
  double lr = 0.01;
  /// Halve the step size after this many steps without a new best risk.
  std::size_t patience = 100;
  double decay = 0.5;
  Optimizer optimizer = Optimizer::GradientDescent;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct RegressionRun {
  NetworkConfig config;
  /// Final empirical risk of the selected restart.
  double risk = 0.0;
  /// Lowest empirical risk seen along any restart's trajectory.
  double best_restart_risk = 0.0;
  /// risk - best_restart_risk.
  double slack = 0.0;
  /// Final risk of every restart, NaN for diverged ones.
  std::vector<double> restart_risks;
  /// Empirical risk of the selected restart, every `steps / 50` steps.
  std::vector<double> trajectory;
  std::size_t diverged = 0;
};

/// Projected full-batch gradient descent on the truncated squared loss.
/// Weights are clipped to [-1, 1] after every step. The loss subgradient is
/// 0 where the truncation is active and on the inactive side of every ReLU.
/// Returns the restart with the lowest final risk.
RegressionRun fit_erm(const std::vector<Sample>& samples, const FitOptions& options);

struct ExactErm {
  NetworkConfig config;
  double risk;
};

/// Exhaustive minimizer of the truncated empirical risk over a finite
/// family. Throws ResourceError when the family exceeds cap.
ExactErm exact_erm_quantized(const std::vector<Sample>& samples, const FamilySpec& spec,
                             std::size_t cap = 1000000);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo estimate of the squared L2 error of f against g under the
/// uniform distribution on [0, 1].
MonteCarloEstimate prediction_error(const std::function<double(double)>& f, const Target& target,
                                    std::size_t mc_points, std::uint64_t seed);

/// 16(A^2 + kappa) + 64(sigma + delta) delta + 800(sigma + sigma^2 + R^2)(logN + 1)/n.
double certificate(double A, double kappa, double delta, double sigma, double R, double logN, double n);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares line through (log2 n, log2 err).
RateFit rate_fit(const std::vector<std::pair<double, double>>& points);

struct Distribution {
  enum class Kind { Bernoulli, Uniform };
  Kind kind = Kind::Bernoulli;
  double p = 0.5;
  double mean() const { return kind == Kind::Bernoulli ? p : 0.5; }
};

struct MaximaReport {
  double estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Monte-Carlo estimate of E sup_j (mu - (2/V) sum_i Z_{j,i}) over U rows
/// of V i.i.d. draws, against 8 log2(U) / V.
MaximaReport maxima_lemma_check(std::size_t U, std::size_t V, const Distribution& dist, std::size_t trials,
                                std::uint64_t seed);

struct RateExperimentOptions {
  Target target = target_from_name("abs");
  double sigma = 0.1;
  std::vector<std::size_t> n_list{128, 256, 512, 1024, 2048, 4096, 8192};
  std::size_t reps = 8;
  std::size_t width = 8;
  double depth_width_const = 0.0;
  double depth_rate_const = 0.0;
  std::size_t restarts = 32;
  std::size_t steps = 5000;
  double lr = 0.01;
  Optimizer optimizer = Optimizer::GradientDescent;
  std::size_t mc_points = 20000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct RateRow {
  std::size_t n = 0;
  std::size_t depth = 0;
  std::vector<double> errors;
  double median_err = 0.0;
  /// Fitted slope over this and all previous rows (NaN below 4 rows).
  double slope_so_far = 0.0;
};

struct RateExperiment {
  std::vector<RateRow> rows;
  RateFit fit;
};

/// For every n: `reps` fits with depth_schedule(n, ...) layers, each scored
/// by prediction_error; reports medians and the log-log slope.
RateExperiment run_rate_experiment(const RateExperimentOptions& options);

nlohmann::ordered_json to_json(const RateFit& f);

}  // namespace netent
