#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "netent/bounds.hpp"
#include "netent/errors.hpp"
#include "netent/oracle.hpp"
#include "netent/regression.hpp"

using namespace netent;

namespace {

FamilySpec tiny_family() {
  FamilySpec s;
  s.W = 1;
  s.L = 2;
  s.B = 1.0;
  s.domain = WeightDomain::finite_set({-1.0, 0.0, 1.0});
  return s;
}

}  // namespace

TEST_CASE("generate_samples") {
  RegressionTask t{target_from_name("abs"), 0.0, 500, 9};
  for (const Sample& s : generate_samples(t)) {
    CHECK(s.x >= 0.0);
    CHECK(s.x <= 1.0);
    CHECK(s.y == t.target.g(s.x));
  }

  t.sigma = 0.3;
  t.n = 100000;
  const auto samples = generate_samples(t);
  double mean = 0.0;
  for (const Sample& s : samples) mean += s.y - t.target.g(s.x);
  mean /= static_cast<double>(t.n);
  CHECK(std::fabs(mean) <= 4.0 * t.sigma / std::sqrt(static_cast<double>(t.n)));

  const auto again = generate_samples(t);
  for (std::size_t i = 0; i < samples.size(); i += 997) {
    CHECK(samples[i].x == again[i].x);
    CHECK(samples[i].y == again[i].y);
  }
  t.seed = 10;
  CHECK(generate_samples(t)[0].x != samples[0].x);

  // The design points do not depend on sigma.
  RegressionTask quiet = t;
  quiet.sigma = 0.0;
  CHECK(generate_samples(quiet)[5].x == generate_samples(t)[5].x);
}

TEST_CASE("built-in targets are bounded and 1-Lipschitz") {
  for (const char* name : {"abs", "hat", "sine-clamped", "zero"}) {
    const Target g = target_from_name(name);
    std::vector<double> v(1025);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = g.g(static_cast<double>(i) / 1024.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(std::fabs(v[i]) <= 1.0);
      for (std::size_t j = i + 1; j < v.size(); ++j)
        if (std::fabs(v[i] - v[j]) > static_cast<double>(j - i) / 1024.0 + 1e-9) FAIL(name << " at " << i << "," << j);
    }
  }
  CHECK_THROWS_AS(target_from_name("cubic"), DomainError);
}

TEST_CASE("depth_schedule") {
  CHECK(depth_schedule(64, 1.0, 0.0) == 8);
  CHECK(depth_schedule(128, 0.0, 0.0) == 5);
  CHECK(depth_schedule(8192, 0.0, 0.0) == 9);
  std::size_t prev = 0;
  for (std::size_t n = 1; n < 200000; n = n * 3 / 2 + 1) {
    const std::size_t L = depth_schedule(n, 0.5, 1.0);
    CHECK(L >= prev);
    prev = L;
  }
  const double big = std::ldexp(1.0, 48);
  const double ratio = static_cast<double>(depth_schedule(static_cast<std::size_t>(64 * big), 0.0, 0.0)) /
                       static_cast<double>(depth_schedule(static_cast<std::size_t>(big), 0.0, 0.0));
  CHECK(ratio == doctest::Approx(2.0).epsilon(1e-3));
  CHECK_THROWS_AS(depth_schedule(10, -1.0, 0.0), DomainError);
}

TEST_CASE("truncation never increases the squared loss when |y| <= 1") {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const NetworkConfig cfg = random_network(seed, 1, {4, 4}, 3.0);
    const auto samples = generate_samples({target_from_name("hat"), 0.5, 200, seed});
    for (const Sample& s : samples) {
      if (std::fabs(s.y) > 1.0) continue;
      const double f = cfg.evaluate(s.x);
      CHECK((truncate1(f) - s.y) * (truncate1(f) - s.y) <= (f - s.y) * (f - s.y));
    }
  }
}

TEST_CASE("fit_erm on the zero target") {
  const auto samples = generate_samples({target_from_name("zero"), 0.0, 64, 1});
  FitOptions o;
  o.width = 4;
  o.depths = {3};
  o.restarts = 4;
  o.steps = 2000;
  o.optimizer = Optimizer::Adam;
  o.seed = 5;
  const RegressionRun r = fit_erm(samples, o);
  CHECK(r.risk <= 1e-6);
  CHECK(r.slack >= 0.0);
  CHECK(r.restart_risks.size() == 4);
  CHECK(r.config.magnitude() <= 1.0);
}

TEST_CASE("fit_erm is deterministic and reports a nonnegative slack") {
  const auto samples = generate_samples({target_from_name("abs"), 0.1, 128, 2});
  FitOptions o;
  o.depths = {2, 3};
  o.restarts = 3;
  o.steps = 300;
  o.optimizer = Optimizer::Adam;
  o.seed = 8;
  const RegressionRun a = fit_erm(samples, o);
  o.threads = 2;
  const RegressionRun b = fit_erm(samples, o);
  CHECK(a.risk == b.risk);
  CHECK(a.restart_risks == b.restart_risks);
  CHECK(a.slack >= 0.0);
  CHECK(a.risk == doctest::Approx(empirical_risk(a.config, samples)).epsilon(1e-12));
  CHECK(a.best_restart_risk <= a.risk);
  CHECK(a.config.magnitude() <= 1.0);
}

TEST_CASE("exact_erm_quantized") {
  std::vector<Sample> zeros;
  for (int i = 0; i < 8; ++i) zeros.push_back({i / 8.0, 0.0});
  CHECK(exact_erm_quantized(zeros, tiny_family()).risk == 0.0);

  FamilySpec consts = tiny_family();
  consts.L = 1;
  const ExactErm one = exact_erm_quantized({{0.0, 0.7}}, consts);
  CHECK(one.risk == doctest::Approx(0.09));
  CHECK(one.config.evaluate(0.0) == 1.0);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto samples = generate_samples({target_from_name("abs"), 0.1, 16, seed});
    const ExactErm best = exact_erm_quantized(samples, tiny_family());
    CHECK(best.risk == doctest::Approx(empirical_risk(best.config, samples)));
    for (const NetworkConfig& c : enumerate_configs(tiny_family())) CHECK(best.risk <= empirical_risk(c, samples));
  }
}

TEST_CASE("gradient ERM tracks the exact oracle on tiny instances") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto samples = generate_samples({target_from_name("abs"), 0.1, 16, seed});
    const double oracle = exact_erm_quantized(samples, tiny_family()).risk;
    FitOptions o;
    o.width = 1;
    o.depths = {1, 2};
    o.restarts = 8;
    o.steps = 1000;
    o.seed = seed;
    const RegressionRun r = fit_erm(samples, o);
    CHECK(r.risk <= oracle + 0.02);
  }
}

TEST_CASE("prediction_error") {
  const Target abs = target_from_name("abs");
  CHECK(prediction_error(abs.g, abs, 1000, 1).estimate == 0.0);
  const MonteCarloEstimate shift = prediction_error([&](double x) { return abs.g(x) + 0.1; }, abs, 1000, 1);
  CHECK(shift.estimate == doctest::Approx(0.01).epsilon(1e-9));

  const MonteCarloEstimate zero = prediction_error([](double) { return 0.0; }, abs, 100000, 3);
  CHECK(std::fabs(zero.estimate - 1.0 / 12.0) <= 4.0 * zero.std_error);

  const Target hat = target_from_name("hat");
  const auto f = [](double x) { return 0.2 * x; };
  const MonteCarloEstimate h1 = prediction_error(f, hat, 20000, 11);
  const MonteCarloEstimate h2 = prediction_error(f, hat, 20000, 12);
  CHECK(std::fabs(h1.estimate - h2.estimate) <= 3.0 * std::hypot(h1.std_error, h2.std_error));
}

TEST_CASE("certificate") {
  CHECK(certificate(0.25, 1.0 / 16, 1.0 / 16, 1.0, 1.0, 10.0, 100.0) == doctest::Approx(270.25));
  const double full = certificate(0.1, 0.01, 0.01, 0.5, 0.3, 40.0, 1000.0);
  const double fixed = certificate(0.1, 0.01, 0.01, 0.5, 0.3, 40.0, 1e300);
  const double half = certificate(0.1, 0.01, 0.01, 0.5, 0.3, 40.0, 2000.0);
  CHECK(half - fixed == doctest::Approx((full - fixed) / 2.0));
  CHECK(certificate(0.0, 0.0, 1e-12, 0.0, 0.0, 0.0, 1e300) <= 1e-9);
  CHECK_THROWS_AS(certificate(0.1, 0.1, 0.5, 0.1, 0.1, 1.0, 10.0), DomainError);
  CHECK_THROWS_AS(certificate(0.1, 0.1, 0.1, -0.1, 0.1, 1.0, 10.0), DomainError);
}

TEST_CASE("certificate dominates the measured error") {
  const Target abs = target_from_name("abs");
  const ConstantsLedger ledger = ConstantsLedger::traced();
  for (std::size_t n : {128, 256}) {
    const auto samples = generate_samples({abs, 0.1, n, n});
    FitOptions o;
    o.depths = {depth_schedule(n, 0.0, 0.0)};
    o.restarts = 2;
    o.steps = 200;
    o.optimizer = Optimizer::Adam;
    const RegressionRun r = fit_erm(samples, o);
    const double err =
        prediction_error([&](double x) { return truncate1(r.config.evaluate(x)); }, abs, 5000, 1).estimate;
    const double eps = 0.25, delta = eps * eps;
    const double logN = fc_bound(o.width, o.depths[0], 1.0, delta, Side::Upper, ledger).value;
    CHECK(err <= certificate(eps, delta, delta, 0.1, 1.0, logN, static_cast<double>(n)));
  }
}

TEST_CASE("rate_fit") {
  std::vector<std::pair<double, double>> pts, flat;
  for (int k = 7; k <= 13; ++k) {
    const double n = std::ldexp(1.0, k);
    pts.emplace_back(n, std::pow(n, -2.0 / 3.0));
    flat.emplace_back(n, 0.3);
  }
  const RateFit f = rate_fit(pts);
  CHECK(std::fabs(f.slope + 2.0 / 3.0) <= 1e-12);
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(std::fabs(rate_fit(flat).slope) <= 1e-12);
  pts[2].second = 0.0;
  CHECK_THROWS_AS(rate_fit(pts), DomainError);
  pts.resize(3);
  CHECK_THROWS_AS(rate_fit(pts), PreconditionError);
}

TEST_CASE("maxima_lemma_check") {
  const MaximaReport single = maxima_lemma_check(1, 64, {}, 4000, 1);
  CHECK(single.bound == 0.0);
  CHECK(single.estimate == doctest::Approx(-0.5).epsilon(0.05));
  CHECK(single.pass);

  const MaximaReport r = maxima_lemma_check(64, 1024, {}, 2000, 2);
  CHECK(r.bound == 0.046875);
  CHECK(r.pass);
  CHECK(maxima_lemma_check(64, 2048, {}, 10, 2).bound == r.bound / 2.0);

  Distribution u{Distribution::Kind::Uniform};
  CHECK(maxima_lemma_check(8, 256, u, 2000, 3).pass);
  Distribution skew{Distribution::Kind::Bernoulli, 0.2};
  const MaximaReport sk = maxima_lemma_check(1, 100, skew, 4000, 4);
  CHECK(sk.estimate == doctest::Approx(-0.2).epsilon(0.1));
}
