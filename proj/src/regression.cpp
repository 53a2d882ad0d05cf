#include "netent/regression.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "netent/errors.hpp"
#include "netent/numeric.hpp"
#include "netent/oracle.hpp"
#include "netent/parallel.hpp"

namespace netent {

Target target_from_name(const std::string& name) {
  if (name == "abs") return {name, [](double x) { return std::fabs(x - 0.5); }};
  if (name == "hat") return {name, [](double x) { return std::max(0.0, 0.25 - std::fabs(x - 0.5)); }};
  if (name == "sine-clamped")
    return {name, [](double x) {
              const double v = std::sin(2.0 * std::numbers::pi * x) / (2.0 * std::numbers::pi);
              return std::clamp(v, -0.1, 0.1);
            }};
  if (name == "zero") return {name, [](double) { return 0.0; }};
  throw DomainError("unknown target '" + name + "' (expected abs, hat, sine-clamped or zero)");
}

std::vector<Sample> generate_samples(const RegressionTask& task) {
  if (task.n == 0) throw PreconditionError("sample count must be positive");
  std::mt19937_64 xs(derive_seed(task.seed, 0));
  std::mt19937_64 noise(derive_seed(task.seed, 1));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Sample> out(task.n);
  for (Sample& s : out) {
    s.x = unif(xs);
    const double xi = gauss(noise);
    s.y = task.target.g(s.x) + task.sigma * xi;
  }
  return out;
}

std::size_t depth_schedule(std::size_t n, double width_const, double rate_const) {
  if (n == 0) throw PreconditionError("sample count must be positive");
  if (!(width_const >= 0.0) || !(rate_const >= 0.0)) throw DomainError("schedule constants must be nonnegative");
  // n^(1/6) as cbrt(sqrt(n)) is exact on perfect sixth powers.
  const double root = std::cbrt(std::sqrt(static_cast<double>(n)));
  return static_cast<std::size_t>(ceil_snapped(2.0 * (width_const + 1.0) * std::sqrt(rate_const + 1.0) * root));
}

double empirical_risk(const NetworkConfig& cfg, const std::vector<Sample>& samples) {
  if (samples.empty()) throw PreconditionError("empirical risk needs samples");
  double acc = 0.0;
  for (const Sample& s : samples) {
    const double r = truncate1(cfg.evaluate(s.x)) - s.y;
    acc += r * r;
  }
  return acc / static_cast<double>(samples.size());
}

namespace {

// Dense 1-input, 1-output network trained on a fixed batch. Activations are
// stored neuron-major so the inner loops run over samples.
class Trainer {
 public:
  Trainer(const std::vector<Sample>& samples, std::vector<std::size_t> dims)
      : dims_(std::move(dims)), n_(samples.size()), y_(n_) {
    const std::size_t depth = dims_.size() - 1;
    w_.resize(depth);
    b_.resize(depth);
    gw_.resize(depth);
    gb_.resize(depth);
    z_.resize(depth);
    a_.resize(depth + 1);
    a_[0].resize(n_);
    for (std::size_t s = 0; s < n_; ++s) {
      a_[0][s] = samples[s].x;
      y_[s] = samples[s].y;
    }
    for (std::size_t l = 0; l < depth; ++l) {
      w_[l].resize(dims_[l + 1] * dims_[l]);
      b_[l].resize(dims_[l + 1]);
      gw_[l].resize(w_[l].size());
      gb_[l].resize(b_[l].size());
      z_[l].resize(dims_[l + 1] * n_);
      a_[l + 1].resize(dims_[l + 1] * n_);
    }
    delta_.resize(*std::max_element(dims_.begin(), dims_.end()) * n_);
    prev_.resize(delta_.size());
  }

  void initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l < w_.size(); ++l) {
      const double scale = std::min(1.0, std::sqrt(6.0 / static_cast<double>(dims_[l])));
      std::uniform_real_distribution<double> wd(-scale, scale);
      std::uniform_real_distribution<double> bd(-0.5, 0.5);
      for (double& v : w_[l]) v = wd(rng);
      for (double& v : b_[l]) v = bd(rng);
    }
  }

  double forward() {
    const std::size_t depth = w_.size();
    for (std::size_t l = 0; l < depth; ++l) {
      const std::size_t rows = dims_[l + 1];
      const std::size_t cols = dims_[l];
      for (std::size_t i = 0; i < rows; ++i) {
        double* z = z_[l].data() + i * n_;
        std::fill(z, z + n_, b_[l][i]);
        for (std::size_t j = 0; j < cols; ++j) {
          const double w = w_[l][i * cols + j];
          if (w == 0.0) continue;
          const double* a = a_[l].data() + j * n_;
          for (std::size_t s = 0; s < n_; ++s) z[s] += w * a[s];
        }
        double* out = a_[l + 1].data() + i * n_;
        if (l + 1 < depth)
          for (std::size_t s = 0; s < n_; ++s) out[s] = z[s] > 0.0 ? z[s] : 0.0;
        else
          std::copy(z, z + n_, out);
      }
    }
    const double* f = a_[depth].data();
    double loss = 0.0;
    for (std::size_t s = 0; s < n_; ++s) {
      const double r = truncate1(f[s]) - y_[s];
      loss += r * r;
    }
    return loss / static_cast<double>(n_);
  }

  // Gradient of the loss at the state left by the last forward().
  void backward() {
    const std::size_t depth = w_.size();
    const double* f = a_[depth].data();
    const double scale = 2.0 / static_cast<double>(n_);
    for (std::size_t s = 0; s < n_; ++s)
      delta_[s] = (f[s] > -1.0 && f[s] < 1.0) ? scale * (f[s] - y_[s]) : 0.0;
    for (std::size_t l = depth; l-- > 0;) {
      const std::size_t rows = dims_[l + 1];
      const std::size_t cols = dims_[l];
      for (std::size_t i = 0; i < rows; ++i) {
        const double* d = delta_.data() + i * n_;
        double gb = 0.0;
        for (std::size_t s = 0; s < n_; ++s) gb += d[s];
        gb_[l][i] = gb;
        for (std::size_t j = 0; j < cols; ++j) {
          const double* a = a_[l].data() + j * n_;
          double g = 0.0;
          for (std::size_t s = 0; s < n_; ++s) g += d[s] * a[s];
          gw_[l][i * cols + j] = g;
        }
      }
      if (l == 0) break;
      std::fill(prev_.begin(), prev_.begin() + static_cast<std::ptrdiff_t>(cols * n_), 0.0);
      for (std::size_t i = 0; i < rows; ++i) {
        const double* d = delta_.data() + i * n_;
        for (std::size_t j = 0; j < cols; ++j) {
          const double w = w_[l][i * cols + j];
          if (w == 0.0) continue;
          double* p = prev_.data() + j * n_;
          for (std::size_t s = 0; s < n_; ++s) p[s] += w * d[s];
        }
      }
      for (std::size_t j = 0; j < cols; ++j) {
        const double* z = z_[l - 1].data() + j * n_;
        double* p = prev_.data() + j * n_;
        for (std::size_t s = 0; s < n_; ++s)
          if (!(z[s] > 0.0)) p[s] = 0.0;
      }
      std::copy(prev_.begin(), prev_.begin() + static_cast<std::ptrdiff_t>(cols * n_), delta_.begin());
    }
  }

  void step(double lr, Optimizer opt) {
    if (opt == Optimizer::Adam) {
      ++t_;
      if (mw_.empty()) {
        mw_ = vw_ = gw_;
        mb_ = vb_ = gb_;
        for (auto* v : {&mw_, &vw_, &mb_, &vb_})
          for (auto& layer : *v) std::fill(layer.begin(), layer.end(), 0.0);
      }
      const double c1 = 1.0 - std::pow(0.9, static_cast<double>(t_));
      const double c2 = 1.0 - std::pow(0.999, static_cast<double>(t_));
      auto adam = [&](double& p, double g, double& m, double& v) {
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        p = std::clamp(p - lr * (m / c1) / (std::sqrt(v / c2) + 1e-8), -1.0, 1.0);
      };
      for (std::size_t l = 0; l < w_.size(); ++l) {
        for (std::size_t k = 0; k < w_[l].size(); ++k) adam(w_[l][k], gw_[l][k], mw_[l][k], vw_[l][k]);
        for (std::size_t k = 0; k < b_[l].size(); ++k) adam(b_[l][k], gb_[l][k], mb_[l][k], vb_[l][k]);
      }
      return;
    }
    for (std::size_t l = 0; l < w_.size(); ++l) {
      for (std::size_t k = 0; k < w_[l].size(); ++k) w_[l][k] = std::clamp(w_[l][k] - lr * gw_[l][k], -1.0, 1.0);
      for (std::size_t k = 0; k < b_[l].size(); ++k) b_[l][k] = std::clamp(b_[l][k] - lr * gb_[l][k], -1.0, 1.0);
    }
  }

  NetworkConfig config() const {
    std::vector<Layer> layers;
    for (std::size_t l = 0; l < w_.size(); ++l) layers.emplace_back(dims_[l + 1], dims_[l], w_[l], b_[l]);
    return NetworkConfig(1, std::move(layers));
  }

 private:
  std::vector<std::size_t> dims_;
  std::size_t n_;
  std::vector<double> y_;
  std::vector<std::vector<double>> w_, b_, gw_, gb_, z_, a_;
  std::vector<double> delta_, prev_;
  std::vector<std::vector<double>> mw_, vw_, mb_, vb_;
  std::size_t t_ = 0;
};

struct RestartResult {
  NetworkConfig config{1, {Layer(1, 1)}};
  double final_risk = std::numeric_limits<double>::quiet_NaN();
  double best_risk = std::numeric_limits<double>::infinity();
  std::vector<double> trajectory;
  bool diverged = false;
};

RestartResult run_restart(const std::vector<Sample>& samples, const std::vector<std::size_t>& dims,
                          const FitOptions& opt, std::uint64_t seed) {
  Trainer t(samples, dims);
  t.initialize(seed);
  RestartResult r;
  const std::size_t every = std::max<std::size_t>(1, opt.steps / 50);
  double lr = opt.lr;
  std::size_t since_best = 0;
  for (std::size_t it = 0; it < opt.steps; ++it) {
    const double loss = t.forward();
    if (!std::isfinite(loss)) {
      r.diverged = true;
      return r;
    }
    if (it % every == 0) r.trajectory.push_back(loss);
    if (loss < r.best_risk) {
      r.best_risk = loss;
      since_best = 0;
    } else if (++since_best >= opt.patience) {
      lr *= opt.decay;
      since_best = 0;
    }
    t.backward();
    t.step(lr, opt.optimizer);
  }
  r.final_risk = t.forward();
  if (!std::isfinite(r.final_risk)) {
    r.diverged = true;
    return r;
  }
  r.best_risk = std::min(r.best_risk, r.final_risk);
  r.trajectory.push_back(r.final_risk);
  r.config = t.config();
  return r;
}

}  // namespace

RegressionRun fit_erm(const std::vector<Sample>& samples, const FitOptions& options) {
  if (samples.empty()) throw PreconditionError("fitting needs samples");
  if (options.depths.empty() || options.restarts == 0) throw PreconditionError("fitting needs a depth and a restart");
  for (std::size_t depth : options.depths)
    if (depth == 0) throw PreconditionError("depth must be positive");

  const std::size_t per_arch = options.restarts;
  const std::size_t total = per_arch * options.depths.size();
  std::vector<RestartResult> results(total);
  parallel_for(total, options.threads, [&](std::size_t k) {
    const std::size_t depth = options.depths[k / per_arch];
    std::vector<std::size_t> dims(depth + 1, options.width);
    dims.front() = 1;
    dims.back() = 1;
    results[k] = run_restart(samples, dims, options, derive_seed(options.seed, k));
  });

  RegressionRun run{results.front().config, 0.0, 0.0, 0.0, {}, {}, 0};
  run.best_restart_risk = std::numeric_limits<double>::infinity();
  std::size_t chosen = total;
  for (std::size_t k = 0; k < total; ++k) {
    const RestartResult& r = results[k];
    run.restart_risks.push_back(r.final_risk);
    if (r.diverged) {
      ++run.diverged;
      continue;
    }
    run.best_restart_risk = std::min(run.best_restart_risk, r.best_risk);
    if (chosen == total || r.final_risk < results[chosen].final_risk) chosen = k;
  }
  if (chosen == total) throw SolverError("every restart diverged");
  run.config = results[chosen].config;
  run.risk = results[chosen].final_risk;
  run.trajectory = results[chosen].trajectory;
  run.slack = run.risk - run.best_restart_risk;
  return run;
}

ExactErm exact_erm_quantized(const std::vector<Sample>& samples, const FamilySpec& spec, std::size_t cap) {
  if (samples.empty()) throw PreconditionError("exact ERM needs samples");
  std::optional<NetworkConfig> best;
  double best_risk = std::numeric_limits<double>::infinity();
  for_each_config(
      spec,
      [&](const NetworkConfig& cfg) {
        const double r = empirical_risk(cfg, samples);
        if (r < best_risk) {
          best_risk = r;
          best = cfg;
        }
      },
      cap);
  if (!best) throw PreconditionError("family is empty");
  return {*best, best_risk};
}

MonteCarloEstimate prediction_error(const std::function<double(double)>& f, const Target& target,
                                    std::size_t mc_points, std::uint64_t seed) {
  if (mc_points < 2) throw PreconditionError("Monte-Carlo estimate needs at least 2 points");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < mc_points; ++k) {
    const double x = unif(rng);
    const double d = f(x) - target.g(x);
    const double v = d * d;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(mc_points - 1);
  return {mean, std::sqrt(var / static_cast<double>(mc_points))};
}

double certificate(double A, double kappa, double delta, double sigma, double R, double logN, double n) {
  if (!(delta > 0.0 && delta < 0.5)) throw DomainError("delta must lie in (0, 1/2)");
  if (A < 0.0 || kappa < 0.0 || sigma < 0.0 || R < 0.0 || logN < 0.0)
    throw DomainError("certificate inputs must be nonnegative");
  if (!(n > 0.0)) throw DomainError("sample size must be positive");
  return 16.0 * (A * A + kappa) + 64.0 * (sigma + delta) * delta +
         800.0 * (sigma + sigma * sigma + R * R) * (logN + 1.0) / n;
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4) throw PreconditionError("rate fit needs at least 4 points");
  double sx = 0.0, sy = 0.0;
  std::vector<std::pair<double, double>> lg;
  for (const auto& [n, err] : points) {
    if (!(n > 0.0) || !(err > 0.0)) throw DomainError("rate fit needs positive n and errors");
    lg.emplace_back(std::log2(n), std::log2(err));
    sx += lg.back().first;
    sy += lg.back().second;
  }
  const double k = static_cast<double>(lg.size());
  const double mx = sx / k, my = sy / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : lg) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) throw PreconditionError("rate fit needs at least two distinct n");
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

namespace {

// Sum of V Bernoulli(1/2) draws via popcount of random words.
std::size_t fair_coin_sum(std::mt19937_64& rng, std::size_t V) {
  std::size_t total = 0;
  std::size_t left = V;
  while (left >= 64) {
    total += static_cast<std::size_t>(std::popcount(rng()));
    left -= 64;
  }
  if (left > 0) total += static_cast<std::size_t>(std::popcount(rng() & ((std::uint64_t{1} << left) - 1)));
  return total;
}

}  // namespace

MaximaReport maxima_lemma_check(std::size_t U, std::size_t V, const Distribution& dist, std::size_t trials,
                                std::uint64_t seed) {
  if (U == 0 || V == 0) throw PreconditionError("U and V must be positive");
  if (trials < 2) throw PreconditionError("Monte-Carlo check needs at least 2 trials");
  if (dist.kind == Distribution::Kind::Bernoulli && !(dist.p >= 0.0 && dist.p <= 1.0))
    throw DomainError("Bernoulli parameter must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(dist.p);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const bool fair = dist.kind == Distribution::Kind::Bernoulli && dist.p == 0.5;
  const double mu = dist.mean();
  const double scale = 2.0 / static_cast<double>(V);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    double sup = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < U; ++j) {
      double sum = 0.0;
      if (fair) {
        sum = static_cast<double>(fair_coin_sum(rng, V));
      } else {
        for (std::size_t i = 0; i < V; ++i)
          sum += dist.kind == Distribution::Kind::Bernoulli ? static_cast<double>(coin(rng)) : unif(rng);
      }
      sup = std::max(sup, mu - scale * sum);
    }
    const double delta = sup - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (sup - mean);
  }
  MaximaReport r;
  r.estimate = mean;
  r.std_error = std::sqrt(m2 / static_cast<double>(trials - 1) / static_cast<double>(trials));
  r.bound = 8.0 * std::log2(static_cast<double>(U)) / static_cast<double>(V);
  r.pass = r.estimate <= r.bound + 3.0 * r.std_error;
  return r;
}

RateExperiment run_rate_experiment(const RateExperimentOptions& o) {
  if (o.n_list.empty() || o.reps == 0) throw PreconditionError("rate experiment needs sample sizes and repetitions");
  RateExperiment ex;
  const std::size_t jobs = o.n_list.size() * o.reps;
  std::vector<double> errors(jobs);
  parallel_for(jobs, o.threads, [&](std::size_t k) {
    const std::size_t n = o.n_list[k / o.reps];
    const std::uint64_t seed = derive_seed(o.seed, k);
    const RegressionTask task{o.target, o.sigma, n, derive_seed(seed, 0)};
    const std::vector<Sample> samples = generate_samples(task);
    FitOptions fit;
    fit.width = o.width;
    fit.depths = {depth_schedule(n, o.depth_width_const, o.depth_rate_const)};
    fit.restarts = o.restarts;
    fit.steps = o.steps;
    fit.lr = o.lr;
    fit.optimizer = o.optimizer;
    fit.seed = derive_seed(seed, 1);
    const RegressionRun run = fit_erm(samples, fit);
    const NetworkConfig& cfg = run.config;
    errors[k] = prediction_error([&](double x) { return truncate1(cfg.evaluate(x)); }, o.target, o.mc_points,
                                 derive_seed(seed, 2))
                    .estimate;
  });
  std::vector<std::pair<double, double>> points;
  for (std::size_t i = 0; i < o.n_list.size(); ++i) {
    RateRow row;
    row.n = o.n_list[i];
    row.depth = depth_schedule(row.n, o.depth_width_const, o.depth_rate_const);
    row.errors.assign(errors.begin() + static_cast<std::ptrdiff_t>(i * o.reps),
                      errors.begin() + static_cast<std::ptrdiff_t>((i + 1) * o.reps));
    std::vector<double> sorted = row.errors;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t h = sorted.size() / 2;
    row.median_err = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
    points.emplace_back(static_cast<double>(row.n), row.median_err);
    row.slope_so_far = points.size() >= 4 ? rate_fit(points).slope : std::numeric_limits<double>::quiet_NaN();
    ex.rows.push_back(std::move(row));
  }
  ex.fit = rate_fit(points);
  return ex;
}

nlohmann::ordered_json to_json(const RateFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
}

}  // namespace netent
