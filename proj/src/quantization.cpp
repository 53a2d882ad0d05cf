#include "netent/quantization.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "netent/errors.hpp"
#include "netent/numeric.hpp"
#include "netent/parallel.hpp"

namespace netent {

Dyadic Dyadic::from_double(double v) {
  if (!std::isfinite(v)) throw DomainError("dyadic value must be finite");
  if (v == 0.0) return {};
  int e = 0;
  const double mant = std::frexp(v, &e);
  auto num = static_cast<std::int64_t>(std::ldexp(mant, 53));
  int exponent = 53 - e;
  while ((num & 1) == 0) {
    num /= 2;
    --exponent;
  }
  return {num, exponent};
}

double Dyadic::value() const { return std::ldexp(static_cast<double>(numerator), -exponent); }

Dyadic quantize_scalar(double x, const QuantSpec& spec) {
  if (!(std::fabs(x) <= spec.B)) throw DomainError("value outside [-B, B]");
  if (spec.b < 0) throw DomainError("precision must be nonnegative");
  return Dyadic::from_double(std::ldexp(std::trunc(std::ldexp(x, spec.b)), -spec.b));
}

NetworkConfig quantize_network(const NetworkConfig& cfg, const QuantSpec& spec) {
  if (cfg.magnitude() > spec.B) throw DomainError("configuration magnitude exceeds B");
  std::vector<Layer> layers = cfg.layers();
  for (Layer& layer : layers) {
    for (double& v : layer.weights) v = quantize_scalar(v, spec).value();
    for (double& v : layer.bias) v = quantize_scalar(v, spec).value();
  }
  return NetworkConfig(cfg.input_dim(), std::move(layers));
}

double max_entry_deviation(const NetworkConfig& a, const NetworkConfig& b) {
  if (a.architecture() != b.architecture()) throw DimensionError(0, "architectures differ");
  double m = 0.0;
  for (std::size_t l = 0; l < a.depth(); ++l) {
    const Layer& x = a.layer(l);
    const Layer& y = b.layer(l);
    for (std::size_t i = 0; i < x.weights.size(); ++i) m = std::max(m, std::fabs(x.weights[i] - y.weights[i]));
    for (std::size_t i = 0; i < x.bias.size(); ++i) m = std::max(m, std::fabs(x.bias[i] - y.bias[i]));
  }
  return m;
}

double perturbation_bound(std::size_t W, std::size_t L, double B, double delta) {
  if (!(B >= 1.0)) throw PreconditionError("perturbation bound needs B >= 1");
  if (!(delta >= 0.0)) throw DomainError("delta must be nonnegative");
  return static_cast<double>(L) * std::pow(static_cast<double>(W + 1), static_cast<double>(L)) *
         std::pow(B, static_cast<double>(L) - 1.0) * delta;
}

int precision_for_radius(std::size_t W, std::size_t L, double B, double eps) {
  if (!(eps > 0.0)) throw DomainError("radius must be positive");
  if (!(B >= 1.0)) throw PreconditionError("precision schedule needs B >= 1");
  const double lg = std::log2(static_cast<double>(L)) + static_cast<double>(L) * std::log2(static_cast<double>(W + 1)) +
                    (static_cast<double>(L) - 1.0) * std::log2(B) - std::log2(eps);
  return std::max(0, static_cast<int>(ceil_snapped(lg)));
}

BigCount grid_cardinality(double B, int b) { return WeightDomain::dyadic_grid(B, b).cardinality(); }

double log2_grid_cardinality(double B, int b) {
  const double k = std::floor(std::ldexp(B, b));
  if (k < 0x1p52) return std::log2(2.0 * k + 1.0);
  // Above 2^52, B 2^b is already an integer, possibly beyond the double
  // range. 2k + 1 = 2k (1 + 1/(2k)).
  const double log2_k = std::log2(B) + static_cast<double>(b);
  return 1.0 + log2_k + std::log1p(0.5 * std::exp2(-log2_k)) / std::log(2.0);
}

CoveringReport verify_covering_property(const FamilySpec& spec, double eps, std::size_t trials,
                                        std::uint64_t seed, std::size_t grid_m, std::size_t threads) {
  spec.validate();
  if (!std::isfinite(spec.B)) throw PreconditionError("covering check needs a finite B");
  if (trials == 0) throw PreconditionError("covering check needs at least one trial");
  CoveringReport report;
  std::ostringstream fam;
  fam << "N(d=" << spec.d << ",W=" << spec.W << ",L=" << spec.L << ",B=" << spec.B << ")";
  report.family = fam.str();
  report.eps = eps;
  report.trials = trials;
  report.b = precision_for_radius(spec.W, spec.L, spec.B, eps);
  report.bound = perturbation_bound(spec.W, spec.L, spec.B, std::ldexp(1.0, -report.b));
  const std::size_t m = grid_m ? grid_m : default_grid_points(spec.d);
  const QuantSpec q{spec.B, report.b};

  std::vector<double> gaps(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const NetworkConfig cfg = random_member(derive_seed(seed, t), spec.d, spec.W, spec.L, spec.B);
    const NetworkConfig quant = quantize_network(cfg, q);
    gaps[t] = lp_distance(sample_grid(cfg, m), sample_grid(quant, m), INFINITY);
  });
  for (double g : gaps) {
    report.max_gap = std::max(report.max_gap, g);
    if (!(g <= eps && g <= report.bound)) ++report.failures;
  }
  report.pass = report.failures == 0;
  return report;
}

nlohmann::ordered_json to_json(const CoveringReport& r) {
  return {{"family", r.family}, {"eps", r.eps},       {"b", r.b},           {"max_gap", r.max_gap},
          {"bound", r.bound},   {"pass", r.pass},     {"trials", r.trials}, {"failures", r.failures}};
}

}  // namespace netent
