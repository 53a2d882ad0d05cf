#include <doctest.h>

#include <cmath>
#include <random>

#include "netent/bounds.hpp"
#include "netent/errors.hpp"

using namespace netent;

TEST_CASE("ledger defaults and derived constants") {
  const ConstantsLedger l = ConstantsLedger::traced();
  CHECK(l.C_fc_upper == 30.0);
  CHECK(l.c_fc_lower == doctest::Approx(1.0 / 92160000.0).epsilon(1e-15));
  CHECK(l.D_sparse == 21600.0);
  CHECK(l.c_sparse == doctest::Approx(l.c_fc_lower / 96.0).epsilon(1e-15));
  CHECK(l.C_quant == 10.0 + 3.0 * l.C_fc_upper);
  const double c1 = l.c_fc_lower / 8.0;
  const double c2 = c1 / (32.0 * 32.0 * 8.0 * 160.0);
  CHECK(l.c_quant == doctest::Approx(std::min(c1, c2) / 2.0).epsilon(1e-15));
  CHECK(l.c_bit_budget == doctest::Approx(5.0 / l.c_fc_lower + 2.0));

  ConstantsLedger custom = ConstantsLedger::traced();
  custom.c_fc_lower = 1.0;
  custom.derive();
  CHECK(custom.c_sparse == doctest::Approx(1.0 / 96.0));

  bool shape_flagged = false;
  for (const LedgerEntry& e : l.entries())
    if (e.name == "K_mendelson") shape_flagged = e.shape_only;
  CHECK(shape_flagged);
}

TEST_CASE("fc_bound") {
  const ConstantsLedger unit = ConstantsLedger::unit();
  const BoundReport r = fc_bound(2, 2, 1.0, 0.5, Side::Upper, unit);
  CHECK(r.value == doctest::Approx(8.0 * std::log2(18.0)));
  CHECK(r.value == doctest::Approx(33.36).epsilon(1e-3));

  const ConstantsLedger traced = ConstantsLedger::traced();
  CHECK_FALSE(fc_bound(30, 80, 1.0, 0.1, Side::Lower, traced).validity);
  CHECK(fc_bound(60, 60, 1.0, 0.1, Side::Lower, traced).validity);
  CHECK(fc_bound(60, 60, 1.0, 0.1, Side::Upper, traced).validity);
  CHECK_THROWS_AS(fc_bound(4, 4, 1.0, 0.0, Side::Upper, traced), DomainError);
  CHECK_THROWS_AS(fc_bound(4, 4, 1.0, 0.6, Side::Upper, traced), DomainError);
  CHECK_THROWS_AS(fc_bound(4, 4, 0.5, 0.1, Side::Upper, traced), PreconditionError);
}

TEST_CASE("lower reports never exceed upper reports") {
  const ConstantsLedger l = ConstantsLedger::traced();
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> dim(60, 400);
  std::uniform_real_distribution<double> mag(1.0, 8.0);
  std::uniform_real_distribution<double> lg(-20.0, -2.1);
  for (int k = 0; k < 200; ++k) {
    const std::size_t W = dim(rng), L = dim(rng);
    const double B = mag(rng);
    const double eps = std::exp2(lg(rng));
    CHECK(fc_bound(W, L, B, eps, Side::Lower, l).value <= fc_bound(W, L, B, eps, Side::Upper, l).value);
    const std::size_t s = static_cast<std::size_t>(l.D_sparse) * L + k;
    CHECK(sparse_bound(W, L, B, s, 1, eps, Side::Lower, l).value <=
          sparse_bound(W, L, B, s, 1, eps, Side::Upper, l).value);
    const int a = static_cast<int>(k % 5), b = static_cast<int>(10 + k % 40);
    CHECK(quantized_bound(W, L, a, b, eps, Side::Lower, l).value <=
          quantized_bound(W, L, a, b, eps, Side::Upper, l).value);
  }
}

TEST_CASE("sparse_bound") {
  const ConstantsLedger l = ConstantsLedger::traced();
  const BoundReport r = sparse_bound(10, 2, 1.0, 18, 1, 0.1, Side::Lower, l);
  REQUIRE(r.W_tilde.has_value());
  CHECK(*r.W_tilde == 3);
  CHECK(r.regime == "s");

  const BoundReport full = sparse_bound(5, 3, 1.0, 1000, 1, 0.1, Side::Upper, l);
  CHECK(full.regime == "W^2 L");
  CHECK(full.value == doctest::Approx(fc_bound(5, 3, 1.0, 0.1, Side::Upper, l).value * l.C_sparse / l.C_fc_upper));

  CHECK_FALSE(sparse_bound(60, 60, 1.0, 21600 * 60 - 1, 1, 0.1, Side::Lower, l).validity);
  CHECK(sparse_bound(60, 60, 1.0, 21600 * 60, 1, 0.1, Side::Lower, l).validity);
  CHECK_THROWS_AS(sparse_bound(10, 20, 1.0, 15, 1, 0.1, Side::Upper, l), PreconditionError);
  CHECK_THROWS_AS(sparse_bound(10, 2, 1.0, 100, 1, 0.3, Side::Lower, l), DomainError);
}

TEST_CASE("quantized_bound branches") {
  const ConstantsLedger unit = ConstantsLedger::unit();
  const BoundReport at = quantized_bound(3, 2, 1, 5, 1.0, Side::Upper, unit);
  REQUIRE(at.eps_star.has_value());
  CHECK(*at.eps_star == 1.0);
  CHECK(at.value == doctest::Approx(18.0 * 6.0));

  const BoundReport below1 = quantized_bound(3, 2, 1, 5, 0.25, Side::Upper, unit);
  const BoundReport below2 = quantized_bound(3, 2, 1, 5, 0.01, Side::Upper, unit);
  CHECK(below1.regime == "a+b");
  CHECK(below1.value == below2.value);

  const BoundReport above = quantized_bound(3, 2, 1, 5, 2.0, Side::Upper, unit);
  CHECK(above.regime == "log");
  CHECK(above.value == doctest::Approx(18.0 * std::log2(16.0 * 4.0 / 2.0)));

  // In the log branch the value is the fully connected shape with B = 2^a.
  const BoundReport q = quantized_bound(4, 3, 2, 20, 0.1, Side::Upper, unit);
  CHECK(q.regime == "log");
  CHECK(q.value == doctest::Approx(fc_bound(4, 3, 4.0, 0.1, Side::Upper, unit).value));

  CHECK_THROWS_AS(quantized_bound(3, 2, 1, 5, 0.0, Side::Upper, unit), DomainError);
  CHECK_FALSE(quantized_bound(100, 100, 1, 5, 0.001, Side::Lower, ConstantsLedger::traced()).validity);
}

TEST_CASE("truncated_bound") {
  ConstantsLedger l = ConstantsLedger::traced();
  l.K_mendelson = 0.5;  // C = 2 K c_truncfat = 1
  CHECK(truncated_bound(2, 2, 0.5, l).value == doctest::Approx(32.0));
  CHECK(truncated_bound(2, 2, 1.0 / 1024, l).value == doctest::Approx(320.0));
  const double v1 = truncated_bound(5, 7, 0.1, l).value;
  const double v2 = truncated_bound(5, 7, 0.01, l).value;
  CHECK(v2 / v1 == doctest::Approx(std::log2(100.0) / std::log2(10.0)));
  CHECK(truncated_bound(5, 7, 1.0 / 16, l).value == doctest::Approx(2.0 * truncated_bound(5, 7, 0.25, l).value));
  CHECK_THROWS_AS(truncated_bound(1, 7, 0.1, l), PreconditionError);
}

TEST_CASE("cardinality bounds") {
  CHECK(cardinality_bound(1, 2, 2.0) == 10.0);
  CHECK(cardinality_bound(3, 4, 16.0) == doctest::Approx(2.0 * cardinality_bound(3, 4, 4.0)));
  CHECK(sparse_cardinality_bound(2, 2, 2, 2.0) == doctest::Approx(10.0 * (std::log2(6.0) + 1.0)));
  CHECK_THROWS_AS(cardinality_bound(2, 2, 1.0), PreconditionError);
  CHECK_THROWS_AS(sparse_cardinality_bound(4, 2, 3, 2.0), PreconditionError);
}

TEST_CASE("transform_feasibility") {
  const ConstantsLedger unit = ConstantsLedger::unit();
  const FeasibilityVerdict v = transform_feasibility({60, 60, 1.0}, {30, 30, 1.0}, 1.0 / 16, unit);
  CHECK_FALSE(v.holds);
  CHECK(v.verdict() == "impossible");
  const double lhs = 3600.0 * 60.0 * (60.0 * std::log2(61.0) + 2.0);
  const double rhs = 900.0 * 30.0 * (30.0 * std::log2(31.0) + 4.0);
  CHECK(v.lhs == doctest::Approx(lhs));
  CHECK(v.rhs == doctest::Approx(rhs));
  CHECK(v.lhs == doctest::Approx(7.73e7).epsilon(1e-3));
  CHECK(v.rhs == doctest::Approx(4.12e6).epsilon(1e-3));

  const ConstantsLedger traced = ConstantsLedger::traced();
  CHECK(transform_feasibility({80, 70, 2.0}, {80, 70, 2.0}, 0.01, traced).holds);
  CHECK(transform_feasibility({80, 70, 2.0}, {80, 70, 2.0}, 0.0, traced).holds);
  CHECK_FALSE(transform_feasibility({60, 60, 1.0}, {1, 1, 1.0}, 0.0, unit).holds);
  CHECK_FALSE(transform_feasibility({10, 60, 1.0}, {10, 60, 1.0}, 0.0, traced).validity);
  CHECK_THROWS_AS(transform_feasibility({60, 60, 1.0}, {60, 60, 1.0}, 0.2, traced), DomainError);
}

TEST_CASE("quantization_bit_budget") {
  const ConstantsLedger l = ConstantsLedger::traced();
  const BitBudget r = quantization_bit_budget(60, 60, 1.0, 1.0 / 16, l);
  CHECK(r.achievable_b == static_cast<int>(std::ceil(std::log2(60.0) + 60.0 * std::log2(61.0) + 4.0)));
  CHECK(r.achievable_b == 366);
  CHECK(r.achievable_bits <= r.achievable_cap);
  CHECK(r.validity);

  ConstantsLedger one = l;
  one.c_bit_budget = 1.0;
  const double m1 = quantization_bit_budget(60, 60, 1.0, 1.0 / 16, one).min_bits;
  const double m2 = quantization_bit_budget(60, 60, 1.0, 1.0 / 32, one).min_bits;
  CHECK(m2 - m1 == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_FALSE(quantization_bit_budget(60, 60, 1.0, 0.125, l).in_regime);
  CHECK_THROWS_AS(quantization_bit_budget(60, 60, 1.0, 0.0, l), DomainError);
}

TEST_CASE("yang_barron_kappa") {
  const double k = yang_barron_kappa([](double x) { return 1.0 / x; }, 1000.0);
  CHECK(k == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(k * k == doctest::Approx(0.01).epsilon(1e-11));

  const double k1 = yang_barron_kappa([](double x) { return 1.5 / x; }, 5000.0);
  const double k2 = yang_barron_kappa([](double x) { return 3.0 / x; }, 5000.0);
  CHECK(std::fabs(k2 / k1 - std::cbrt(2.0)) <= 1e-10);

  // A model sandwiched between c/kappa and C/kappa.
  const double c = 0.5, C = 2.0;
  auto model = [&](double x) { return (c + (C - c) * (0.5 + 0.5 * std::sin(10.0 * x))) / x; };
  for (double n : {1e2, 1e4, 1e6}) {
    const double kn = yang_barron_kappa(model, n);
    CHECK(kn * kn >= std::pow(c, 2.0 / 3) * std::pow(n, -2.0 / 3) * (1 - 1e-9));
    CHECK(kn * kn <= std::pow(C, 2.0 / 3) * std::pow(n, -2.0 / 3) * (1 + 1e-9));
  }

  CHECK_THROWS_AS(yang_barron_kappa([](double) { return 1e-30; }, 10.0, 1e-12, 0.5, 1.0), SolverError);
}

TEST_CASE("lip_entropy_bounds") {
  const ConstantsLedger l = ConstantsLedger::traced();
  const auto [lo, hi] = lip_entropy_bounds(0.125, l);
  CHECK(lo == 8.0);
  CHECK(hi == 8.0);
  const auto [lo2, hi2] = lip_entropy_bounds(0.0625, l);
  CHECK(lo2 == 2.0 * lo);
  CHECK(hi2 == 2.0 * hi);
  ConstantsLedger bad = l;
  bad.c_lip_entropy = 3.0;
  CHECK_THROWS_AS(lip_entropy_bounds(0.1, bad), PreconditionError);
  CHECK_THROWS_AS(lip_entropy_bounds(0.7, l), DomainError);
}

TEST_CASE("approx_error_bounds_H1") {
  const ConstantsLedger l = ConstantsLedger::traced();
  const ApproxErrorBounds r = approx_error_bounds_H1(64, 64, l);
  CHECK(r.lower_bounded / r.upper_bounded == doctest::Approx(1.0));
  const double lw = std::log2(64.0), lwl = std::log2(64.0 * 64.0);
  CHECK(r.lower_unbounded / r.upper_bounded == doctest::Approx(lw / (lwl * lwl)));

  ConstantsLedger big = l;
  big.c_lip_approx = 100.0;
  big.C_unbounded_approx = 100.0;
  const ApproxErrorBounds s = approx_error_bounds_H1(2, 2, big);
  CHECK(s.lower_bounded == 0.125);
  CHECK(s.lower_unbounded == 0.125);
  CHECK_THROWS_AS(approx_error_bounds_H1(1, 4, l), PreconditionError);
}
