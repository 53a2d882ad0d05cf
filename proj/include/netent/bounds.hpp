#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace netent {

struct LedgerEntry {
  std::string name;
  double value;
  std::string provenance;
  bool shape_only;
};

/// Absolute constants of the covering-number bounds. Traced constants
/// default to their proof values; the rest default to 1 and are flagged
/// shape-only. Derived constants are recomputed by derive().
struct ConstantsLedger {
  double C_fc_upper = 30.0;
  double c_fc_lower = 1.0 / (4.0 * 40.0 * 40.0 * 120.0 * 120.0);
  double C_sparse = 80.0;
  double D_sparse = 60.0 * 60.0 * 6.0;
  double c_sparse = 0.0;
  double C_quant = 100.0;
  double D_quant = 960.0;
  double E_quant = 2e5;
  double c_quant = 0.0;
  double C_regression = 800.0;
  double c_bit_budget = 0.0;

  double c_lip_entropy = 1.0;
  double C_lip_entropy = 1.0;
  double c_truncfat = 1.0;
  double K_mendelson = 1.0;
  double c_mendelson = 1.0;
  double C_lip_approx = 1.0;
  double c_lip_approx = 1.0;
  double C_unbounded_approx = 1.0;

  /// Defaults with derived constants filled in.
  static ConstantsLedger traced();
  /// Every multiplicative constant set to 1, for shape comparisons.
  static ConstantsLedger unit();

  /// Recomputes c_sparse, c_quant and c_bit_budget from c_fc_lower.
  void derive();
  /// The two branch constants of the quantized lower chain.
  double quant_c1() const;
  double quant_c2() const;

  std::vector<LedgerEntry> entries() const;

  /// Overrides one constant by name. Setting c_fc_lower re-derives the
  /// constants that depend on it. Throws DomainError for unknown names or
  /// nonpositive values.
  void set(const std::string& name, double value);
};

enum class Side { Upper, Lower };
const char* to_string(Side s);
Side side_from_string(const std::string& s);

/// One evaluated bound on log2 of a covering number.
struct BoundReport {
  double value = 0.0;
  std::string regime;
  std::vector<std::pair<std::string, double>> constants_used;
  bool validity = true;
  std::vector<std::string> notes;
  std::optional<double> eps_star;
  std::optional<std::size_t> W_tilde;
};

nlohmann::ordered_json to_json(const BoundReport& r);

/// const W^2 L log2((W+1)^L B^L / eps).
BoundReport fc_bound(std::size_t W, std::size_t L, double B, double eps, Side side,
                     const ConstantsLedger& ledger);

/// const min{s, W^2 L} log2((W'+1)^L B^L / eps), W' = W on the upper side
/// and min{ceil(sqrt(s/L)), W} on the lower side.
BoundReport sparse_bound(std::size_t W, std::size_t L, double B, std::size_t s, std::size_t d, double eps,
                         Side side, const ConstantsLedger& ledger);

/// const W^2 L min{a + b, log2((W+1)^L 2^(aL) / eps)} for weights in
/// (-2^(a+1), 2^(a+1)) ∩ 2^-b Z. Reports the transition radius eps_star.
BoundReport quantized_bound(std::size_t W, std::size_t L, int a, int b, double eps, Side side,
                            const ConstantsLedger& ledger);

/// C W^2 L^2 log2(WL) log2(1/eps) with C = 2 K_mendelson c_truncfat.
BoundReport truncated_bound(std::size_t W, std::size_t L, double eps, const ConstantsLedger& ledger);

/// 5 W^2 L log2|A|.
double cardinality_bound(std::size_t W, std::size_t L, double cardA);
/// 5 s (log2(L(W+1)) + log2|A|).
double sparse_cardinality_bound(std::size_t W, std::size_t L, std::size_t s, double cardA);

struct ArchitectureBound {
  std::size_t W;
  std::size_t L;
  double B;
};

struct FeasibilityVerdict {
  bool holds = true;
  double lhs = 0.0;
  double rhs = 0.0;
  bool validity = true;
  std::string verdict() const { return holds ? "necessary-condition-holds" : "impossible"; }
};

/// Necessary condition for every src realization to be approximated within
/// eps by dst realizations:
///   c W^2 L log2((W+1)^L B^L / (4 eps)) <= C W'^2 L' log2((W'+1)^L' B'^L' / eps),
/// and C W'^2 L' >= c W^2 L when eps = 0.
FeasibilityVerdict transform_feasibility(const ArchitectureBound& src, const ArchitectureBound& dst, double eps,
                                         const ConstantsLedger& ledger);

struct BitBudget {
  double min_bits = 0.0;
  double achievable_bits = 0.0;
  int achievable_b = 0;
  /// 6 log2((W+1)^L B^L / kappa).
  double achievable_cap = 0.0;
  bool in_regime = true;
  bool validity = true;
};

BitBudget quantization_bit_budget(std::size_t W, std::size_t L, double B, double kappa,
                                  const ConstantsLedger& ledger);

/// Solves kappa^2 = model(kappa) / n by bisection on [lo, hi].
double yang_barron_kappa(const std::function<double(double)>& model, double n, double tol = 1e-14,
                         double lo = 1e-12, double hi = 1.0);

/// (c eps^-1, C eps^-1) with the Lipschitz-class entropy constants.
std::pair<double, double> lip_entropy_bounds(double eps, const ConstantsLedger& ledger);

struct ApproxErrorBounds {
  double upper_bounded = 0.0;
  double lower_bounded = 0.0;
  double lower_unbounded = 0.0;
};

/// Minimax approximation error of 1-Lipschitz functions by depth-L width-W
/// networks: C/(W^2 L^2 log2 W), min{1/8, c/(W^2 L^2 log2 W)} and
/// min{1/8, C'/(W^2 L^2 log2(WL)^2)}.
ApproxErrorBounds approx_error_bounds_H1(std::size_t W, std::size_t L, const ConstantsLedger& ledger);

}  // namespace netent
