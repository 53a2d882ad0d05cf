#include "netent/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "netent/errors.hpp"
#include "netent/quantization.hpp"

namespace netent {

ConstantsLedger ConstantsLedger::traced() {
  ConstantsLedger l;
  l.derive();
  return l;
}

ConstantsLedger ConstantsLedger::unit() {
  ConstantsLedger l;
  l.C_fc_upper = l.c_fc_lower = 1.0;
  l.C_sparse = l.c_sparse = 1.0;
  l.C_quant = l.c_quant = 1.0;
  l.C_regression = 1.0;
  l.c_bit_budget = 1.0;
  return l;
}

double ConstantsLedger::quant_c1() const { return c_fc_lower / 8.0; }

double ConstantsLedger::quant_c2() const { return (c_fc_lower / 8.0) / (32.0 * 32.0 * 8.0 * 160.0); }

void ConstantsLedger::derive() {
  c_sparse = c_fc_lower / 96.0;
  c_quant = std::min(quant_c1(), quant_c2()) / 2.0;
  c_bit_budget = 5.0 / c_fc_lower + 2.0;
}

std::vector<LedgerEntry> ConstantsLedger::entries() const {
  return {
      {"C_fc_upper", C_fc_upper, "fully connected upper bound: quantized covering plus cardinality count, C := 30",
       false},
      {"c_fc_lower", c_fc_lower, "fully connected lower bound: packing chain, c = 1/(4*40^2*120^2)", false},
      {"C_sparse", C_sparse, "sparse upper bound, C = 80", false},
      {"D_sparse", D_sparse, "sparse lower bound validity, s >= D d^2 L with D := 60^2*6", false},
      {"c_sparse", c_sparse, "sparse lower bound, c = c_fc_lower/96", false},
      {"C_quant", C_quant, "base-2 quantized upper bound, C = 10 + 3*30", false},
      {"D_quant", D_quant, "base-2 quantized lower bound validity, W, L >= D := 960", false},
      {"E_quant", E_quant, "base-2 quantized lower bound validity, L(a+b) >= E log2 W with E := 2e5", false},
      {"c_quant", c_quant, "base-2 quantized lower bound, c = min{c1, c2}/2 with c1 = c_fc_lower/8, c2 = c1/(32^2*8*160)",
       false},
      {"C_regression", C_regression, "prediction error certificate, C = 800", false},
      {"c_bit_budget", c_bit_budget, "minimal quantization bit budget, c = 5/c_fc_lower + 2", false},
      {"c_lip_entropy", c_lip_entropy, "Lipschitz class entropy lower constant (not pinned)", true},
      {"C_lip_entropy", C_lip_entropy, "Lipschitz class entropy upper constant (not pinned)", true},
      {"c_truncfat", c_truncfat, "fat-shattering dimension constant C_h (not pinned)", true},
      {"K_mendelson", K_mendelson, "Mendelson covering constant K (not pinned)", true},
      {"c_mendelson", c_mendelson, "Mendelson scale constant c (not pinned)", true},
      {"C_lip_approx", C_lip_approx, "Lipschitz approximation upper constant (not pinned)", true},
      {"c_lip_approx", c_lip_approx, "Lipschitz approximation lower constant, bounded weights (not pinned)", true},
      {"C_unbounded_approx", C_unbounded_approx,
       "Lipschitz approximation lower constant, unbounded weights (not pinned)", true},
  };
}

void ConstantsLedger::set(const std::string& name, double value) {
  static const std::pair<const char*, double ConstantsLedger::*> fields[] = {
      {"C_fc_upper", &ConstantsLedger::C_fc_upper},
      {"c_fc_lower", &ConstantsLedger::c_fc_lower},
      {"C_sparse", &ConstantsLedger::C_sparse},
      {"D_sparse", &ConstantsLedger::D_sparse},
      {"c_sparse", &ConstantsLedger::c_sparse},
      {"C_quant", &ConstantsLedger::C_quant},
      {"D_quant", &ConstantsLedger::D_quant},
      {"E_quant", &ConstantsLedger::E_quant},
      {"c_quant", &ConstantsLedger::c_quant},
      {"C_regression", &ConstantsLedger::C_regression},
      {"c_bit_budget", &ConstantsLedger::c_bit_budget},
      {"c_lip_entropy", &ConstantsLedger::c_lip_entropy},
      {"C_lip_entropy", &ConstantsLedger::C_lip_entropy},
      {"c_truncfat", &ConstantsLedger::c_truncfat},
      {"K_mendelson", &ConstantsLedger::K_mendelson},
      {"c_mendelson", &ConstantsLedger::c_mendelson},
      {"C_lip_approx", &ConstantsLedger::C_lip_approx},
      {"c_lip_approx", &ConstantsLedger::c_lip_approx},
      {"C_unbounded_approx", &ConstantsLedger::C_unbounded_approx},
  };
  if (!(value > 0.0) || !std::isfinite(value)) throw DomainError("constant " + name + " must be positive and finite");
  for (const auto& [key, member] : fields) {
    if (name != key) continue;
    this->*member = value;
    if (name == "c_fc_lower") derive();
    return;
  }
  throw DomainError("unknown constant '" + name + "'");
}

const char* to_string(Side s) { return s == Side::Upper ? "upper" : "lower"; }

Side side_from_string(const std::string& s) {
  if (s == "upper") return Side::Upper;
  if (s == "lower") return Side::Lower;
  throw DomainError("side must be 'upper' or 'lower', got '" + s + "'");
}

nlohmann::ordered_json to_json(const BoundReport& r) {
  nlohmann::ordered_json consts = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.constants_used) consts[k] = v;
  nlohmann::ordered_json j = {{"value", r.value},
                              {"regime", r.regime},
                              {"constants_used", consts},
                              {"validity", r.validity},
                              {"notes", r.notes}};
  if (r.eps_star) j["eps_star"] = *r.eps_star;
  if (r.W_tilde) j["W_tilde"] = *r.W_tilde;
  return j;
}

namespace {

double dbl(std::size_t v) { return static_cast<double>(v); }

// log2((W+1)^L B^L / eps) without forming the power.
double log_ratio(std::size_t W, std::size_t L, double B, double eps) {
  return dbl(L) * (std::log2(dbl(W + 1)) + std::log2(B)) - std::log2(eps);
}

// Rejects eps outside (0, hi]; eps == hi is accepted but flagged.
void check_radius(double eps, double hi, BoundReport& r) {
  if (!(eps > 0.0) || !(eps <= hi) || !std::isfinite(eps))
    throw DomainError("radius must lie in (0, " + std::to_string(hi) + ")");
  if (eps == hi) {
    r.validity = false;
    r.notes.push_back("radius at the open endpoint of the admissible range");
  }
}

void check_magnitude(double B) {
  if (!(B >= 1.0)) throw PreconditionError("bound needs B >= 1");
}

}  // namespace

BoundReport fc_bound(std::size_t W, std::size_t L, double B, double eps, Side side, const ConstantsLedger& ledger) {
  BoundReport r;
  check_radius(eps, 0.5, r);
  check_magnitude(B);
  const double c = side == Side::Upper ? ledger.C_fc_upper : ledger.c_fc_lower;
  r.constants_used.emplace_back(side == Side::Upper ? "C_fc_upper" : "c_fc_lower", c);
  r.regime = to_string(side);
  if (side == Side::Lower && (W < 60 || L < 60)) {
    r.validity = false;
    r.notes.push_back("lower bound needs W, L >= 60");
  }
  r.value = c * dbl(W) * dbl(W) * dbl(L) * log_ratio(W, L, B, eps);
  return r;
}

BoundReport sparse_bound(std::size_t W, std::size_t L, double B, std::size_t s, std::size_t d, double eps, Side side,
                         const ConstantsLedger& ledger) {
  if (s < std::max(W, L)) throw PreconditionError("sparse bound needs s >= max{W, L}");
  BoundReport r;
  check_radius(eps, side == Side::Upper ? 0.5 : 0.25, r);
  check_magnitude(B);

  // Smallest t with t^2 L >= s.
  auto t = static_cast<std::size_t>(std::sqrt(dbl(s) / dbl(L)));
  while (t * t * L < s) ++t;
  while (t > 0 && (t - 1) * (t - 1) * L >= s) --t;
  const std::size_t Wt = std::min(t, W);
  r.W_tilde = Wt;

  const double full = dbl(W) * dbl(W) * dbl(L);
  const double budget = std::min(dbl(s), full);
  r.regime = dbl(s) < full ? "s" : "W^2 L";
  double c = 0.0;
  if (side == Side::Upper) {
    c = ledger.C_sparse;
    r.constants_used.emplace_back("C_sparse", c);
    r.value = c * budget * log_ratio(W, L, B, eps);
  } else {
    c = ledger.c_sparse;
    r.constants_used.emplace_back("c_sparse", c);
    r.constants_used.emplace_back("D_sparse", ledger.D_sparse);
    if (W < 60 || L < 60) {
      r.validity = false;
      r.notes.push_back("lower bound needs W, L >= 60");
    }
    if (dbl(s) < ledger.D_sparse * dbl(d) * dbl(d) * dbl(L)) {
      r.validity = false;
      r.notes.push_back("lower bound needs s >= D d^2 L");
    }
    r.value = c * budget * log_ratio(Wt, L, B, eps);
  }
  return r;
}

BoundReport quantized_bound(std::size_t W, std::size_t L, int a, int b, double eps, Side side,
                            const ConstantsLedger& ledger) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("radius must be positive");
  if (a < 0 || b < 0) throw DomainError("a and b must be nonnegative");
  BoundReport r;
  const double hi = side == Side::Upper ? 0.5 : 0.01;
  if (!(eps < hi)) {
    r.validity = false;
    r.notes.push_back("radius outside the range of the theorem");
  }
  const double log_x = dbl(L) * std::log2(dbl(W + 1)) + static_cast<double>(a) * dbl(L);
  const double bits = static_cast<double>(a + b);
  r.eps_star = std::exp2(log_x - bits);
  const double log_term = log_x - std::log2(eps);
  double branch = 0.0;
  if (log_term > bits) {
    r.regime = "a+b";
    branch = bits;
  } else if (log_term > 0.0) {
    r.regime = "log";
    branch = log_term;
  } else {
    r.regime = "log-clamped";
    branch = 0.0;
  }
  double c = 0.0;
  if (side == Side::Upper) {
    c = ledger.C_quant;
    r.constants_used.emplace_back("C_quant", c);
  } else {
    c = ledger.c_quant;
    r.constants_used.emplace_back("c_quant", c);
    r.constants_used.emplace_back("D_quant", ledger.D_quant);
    r.constants_used.emplace_back("E_quant", ledger.E_quant);
    if (dbl(W) < ledger.D_quant || dbl(L) < ledger.D_quant) {
      r.validity = false;
      r.notes.push_back("lower bound needs W, L >= D");
    }
    if (dbl(L) * bits < ledger.E_quant * std::log2(dbl(W))) {
      r.validity = false;
      r.notes.push_back("lower bound needs L(a+b) >= E log2 W");
    }
  }
  r.value = c * dbl(W) * dbl(W) * dbl(L) * branch;
  return r;
}

BoundReport truncated_bound(std::size_t W, std::size_t L, double eps, const ConstantsLedger& ledger) {
  if (W < 2 || L < 2) throw PreconditionError("truncated bound needs W, L >= 2");
  BoundReport r;
  check_radius(eps, 0.5, r);
  const double C = 2.0 * ledger.K_mendelson * ledger.c_truncfat;
  r.constants_used = {{"K_mendelson", ledger.K_mendelson}, {"c_truncfat", ledger.c_truncfat}};
  r.regime = "upper";
  r.notes.push_back("shape-only unless K_mendelson and c_truncfat are supplied");
  r.value = C * dbl(W) * dbl(W) * dbl(L) * dbl(L) * std::log2(dbl(W) * dbl(L)) * -std::log2(eps);
  return r;
}

double cardinality_bound(std::size_t W, std::size_t L, double cardA) {
  if (!(cardA >= 2.0)) throw PreconditionError("cardinality bound needs |A| >= 2");
  return 5.0 * dbl(W) * dbl(W) * dbl(L) * std::log2(cardA);
}

double sparse_cardinality_bound(std::size_t W, std::size_t L, std::size_t s, double cardA) {
  if (!(cardA >= 2.0)) throw PreconditionError("cardinality bound needs |A| >= 2");
  if (s < std::max(W, L)) throw PreconditionError("sparse cardinality bound needs s >= max{W, L}");
  return 5.0 * dbl(s) * (std::log2(dbl(L) * dbl(W + 1)) + std::log2(cardA));
}

FeasibilityVerdict transform_feasibility(const ArchitectureBound& src, const ArchitectureBound& dst, double eps,
                                         const ConstantsLedger& ledger) {
  if (!(eps >= 0.0) || !(eps < 0.125)) throw DomainError("radius must be 0 or lie in (0, 1/8)");
  check_magnitude(src.B);
  check_magnitude(dst.B);
  FeasibilityVerdict v;
  v.validity = src.W >= 60 && src.L >= 60;
  const double c = ledger.c_fc_lower;
  const double C = ledger.C_fc_upper;
  const double src_size = dbl(src.W) * dbl(src.W) * dbl(src.L);
  const double dst_size = dbl(dst.W) * dbl(dst.W) * dbl(dst.L);
  if (eps == 0.0) {
    v.lhs = c * src_size;
    v.rhs = C * dst_size;
  } else {
    v.lhs = c * src_size * log_ratio(src.W, src.L, src.B, 4.0 * eps);
    v.rhs = C * dst_size * log_ratio(dst.W, dst.L, dst.B, eps);
  }
  v.holds = v.lhs <= v.rhs;
  return v;
}

BitBudget quantization_bit_budget(std::size_t W, std::size_t L, double B, double kappa,
                                  const ConstantsLedger& ledger) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive");
  check_magnitude(B);
  BitBudget r;
  const double t = log_ratio(W, L, B, kappa);
  r.min_bits = t / ledger.c_bit_budget;
  r.achievable_b = precision_for_radius(W, L, B, kappa);
  r.achievable_bits = log2_grid_cardinality(B, r.achievable_b);
  r.achievable_cap = 6.0 * t;
  r.in_regime = kappa < 0.125;
  r.validity = r.in_regime && W >= 60 && L >= 60;
  return r;
}

double yang_barron_kappa(const std::function<double(double)>& model, double n, double tol, double lo, double hi) {
  if (!(n >= 1.0)) throw PreconditionError("sample size must be at least 1");
  if (!(lo > 0.0) || !(hi > lo)) throw PreconditionError("bracket must satisfy 0 < lo < hi");
  auto h = [&](double k) { return k * k - model(k) / n; };
  const double flo = h(lo);
  const double fhi = h(hi);
  if (!(flo < 0.0 && fhi > 0.0)) throw SolverError("no sign change of kappa^2 - model(kappa)/n on the bracket");
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    const double mid = lo + (hi - lo) / 2.0;
    const double fm = h(mid);
    if (fm == 0.0) return mid;
    if (fm < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return lo + (hi - lo) / 2.0;
}

std::pair<double, double> lip_entropy_bounds(double eps, const ConstantsLedger& ledger) {
  if (!(eps > 0.0) || !(eps <= 0.5)) throw DomainError("radius must lie in (0, 1/2)");
  if (ledger.c_lip_entropy > ledger.C_lip_entropy)
    throw PreconditionError("lower entropy constant exceeds the upper one");
  return {ledger.c_lip_entropy / eps, ledger.C_lip_entropy / eps};
}

ApproxErrorBounds approx_error_bounds_H1(std::size_t W, std::size_t L, const ConstantsLedger& ledger) {
  if (W < 2 || L < 2) throw PreconditionError("approximation bounds need W, L >= 2");
  const double size = dbl(W) * dbl(W) * dbl(L) * dbl(L);
  const double lw = std::log2(dbl(W));
  const double lwl = std::log2(dbl(W) * dbl(L));
  ApproxErrorBounds r;
  r.upper_bounded = ledger.C_lip_approx / (size * lw);
  r.lower_bounded = std::min(0.125, ledger.c_lip_approx / (size * lw));
  r.lower_unbounded = std::min(0.125, ledger.C_unbounded_approx / (size * lwl * lwl));
  return r;
}

}  // namespace netent
