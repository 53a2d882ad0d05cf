#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "netent/network.hpp"

namespace netent {

/// numerator * 2^-exponent, numerator odd or zero.
struct Dyadic {
  std::int64_t numerator = 0;
  int exponent = 0;

  static Dyadic from_double(double v);
  double value() const;
  bool operator==(const Dyadic&) const = default;
};

/// Grid [-B, B] with spacing 2^-b.
struct QuantSpec {
  double B = 1.0;
  int b = 0;
};

/// q_b(x): round toward zero onto 2^-b Z. Throws DomainError if |x| > B.
Dyadic quantize_scalar(double x, const QuantSpec& spec);

/// Elementwise q_b. Throws DomainError if magnitude(cfg) > B.
NetworkConfig quantize_network(const NetworkConfig& cfg, const QuantSpec& spec);

/// Max elementwise |difference| between two configs of equal architecture.
double max_entry_deviation(const NetworkConfig& a, const NetworkConfig& b);

/// L (W+1)^L B^(L-1) delta.
double perturbation_bound(std::size_t W, std::size_t L, double B, double delta);

/// b = ceil(log2(L (W+1)^L B^(L-1) / eps)), clamped at 0.
int precision_for_radius(std::size_t W, std::size_t L, double B, double eps);

/// Exact |[-B, B] ∩ 2^-b Z| = 2 floor(2^b B) + 1.
BigCount grid_cardinality(double B, int b);
/// log2 of grid_cardinality, accurate for arbitrarily large b.
double log2_grid_cardinality(double B, int b);

struct CoveringReport {
  std::string family;
  double eps = 0.0;
  int b = 0;
  double max_gap = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::size_t trials = 0;
  std::size_t failures = 0;
};

/// Quantizes `trials` random members of the family at
/// precision_for_radius(W, L, B, eps) and records the largest grid sup-norm
/// gap. A trial fails if its gap exceeds eps or the perturbation bound.
CoveringReport verify_covering_property(const FamilySpec& spec, double eps, std::size_t trials,
                                        std::uint64_t seed, std::size_t grid_m = 0,
                                        std::size_t threads = 1);

nlohmann::ordered_json to_json(const CoveringReport& r);

}  // namespace netent
