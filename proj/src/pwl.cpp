#include "netent/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "netent/errors.hpp"
#include "netent/numeric.hpp"
#include "netent/weight_domain.hpp"

namespace netent {

PwlFunction::PwlFunction(std::vector<double> breakpoints, std::vector<double> values)
    : x_(std::move(breakpoints)), y_(std::move(values)) {
  if (x_.empty() || x_.size() != y_.size()) throw PreconditionError("breakpoints and values must match and be nonempty");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!(x_[i] >= 0.0 && x_[i] <= 1.0)) throw DomainError("breakpoints must lie in [0, 1]");
    if (i > 0 && !(x_[i] > x_[i - 1])) throw PreconditionError("breakpoints must be strictly increasing");
    if (!std::isfinite(y_[i])) throw DomainError("values must be finite");
  }
}

double PwlFunction::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin());
  const double t = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
  return y_[i - 1] + t * (y_[i] - y_[i - 1]);
}

double PwlFunction::sup_norm() const {
  double m = 0.0;
  for (double v : y_) m = std::max(m, std::fabs(v));
  return m;
}

PwlFunction PwlFunction::scaled(double a) const {
  std::vector<double> y = y_;
  for (double& v : y) v *= a;
  return PwlFunction(x_, std::move(y));
}

namespace {

std::vector<double> merged_nodes(const PwlFunction& f, const PwlFunction& g) {
  std::vector<double> nodes{0.0, 1.0};
  nodes.insert(nodes.end(), f.breakpoints().begin(), f.breakpoints().end());
  nodes.insert(nodes.end(), g.breakpoints().begin(), g.breakpoints().end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

}  // namespace

double l1_distance(const PwlFunction& f, const PwlFunction& g) {
  const std::vector<double> nodes = merged_nodes(f, g);
  double total = 0.0;
  double d0 = f(nodes[0]) - g(nodes[0]);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double d1 = f(nodes[i]) - g(nodes[i]);
    const double h = nodes[i] - nodes[i - 1];
    const double a0 = std::fabs(d0);
    const double a1 = std::fabs(d1);
    if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0))
      total += h * (a0 + a1) / 2.0;
    else
      total += h * (d0 * d0 + d1 * d1) / (2.0 * (a0 + a1));
    d0 = d1;
  }
  return total;
}

double sup_distance(const PwlFunction& f, const PwlFunction& g) {
  double m = 0.0;
  for (double x : merged_nodes(f, g)) m = std::max(m, std::fabs(f(x) - g(x)));
  return m;
}

double PwlPacking::separation() const {
  if (trivial) return 0.0;
  return E / (2.0 * static_cast<double>(M) * static_cast<double>(N));
}

double PwlPacking::certificate_log2() const { return packing_log_lower_bound(N, E, eps); }

PwlPacking build_packing(std::size_t N, double E, double eps, std::size_t cap) {
  if (N == 0) throw PreconditionError("packing needs N >= 1");
  if (!(E > 0.0) || !(eps > 0.0)) throw DomainError("packing needs E > 0 and eps > 0");
  PwlPacking p;
  p.N = N;
  p.E = E;
  p.eps = eps;
  if (eps >= E / (4.0 * static_cast<double>(N))) {
    p.trivial = true;
    return p;
  }
  p.M = static_cast<std::size_t>(ceil_snapped(E / (4.0 * eps * static_cast<double>(N))));
  std::size_t count = 1;
  for (std::size_t i = 0; i < N; ++i) {
    if (count > cap / (p.M + 1)) {
      const BigCount total = boost::multiprecision::pow(BigCount(p.M + 1), static_cast<unsigned>(N));
      throw ResourceError("packing family exceeds cap", total.str());
    }
    count *= p.M + 1;
  }

  std::vector<double> xs(N + 1);
  for (std::size_t i = 0; i <= N; ++i) xs[i] = static_cast<double>(i) / static_cast<double>(N);
  std::vector<std::size_t> levels(N, 0);
  p.functions.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<double> ys(N + 1, 0.0);
    for (std::size_t i = 0; i < N; ++i)
      ys[i + 1] = static_cast<double>(levels[i]) * E / static_cast<double>(p.M);
    p.functions.emplace_back(xs, std::move(ys));
    for (std::size_t i = N; i-- > 0;) {
      if (++levels[i] <= p.M) break;
      levels[i] = 0;
    }
  }
  return p;
}

double packing_log_lower_bound(std::size_t N, double E, double eps) {
  if (N == 0) throw PreconditionError("packing needs N >= 1");
  if (!(E > 0.0) || !(eps > 0.0)) throw DomainError("packing needs E > 0 and eps > 0");
  const double levels = ceil_snapped(E / (4.0 * eps * static_cast<double>(N)));
  return levels <= 1.0 ? 0.0 : static_cast<double>(N) * std::log2(levels);
}

void write_packing_csv(std::ostream& os, const PwlPacking& packing) {
  os << "index";
  for (std::size_t i = 0; i <= packing.N; ++i) os << ",node_" << i;
  os << "\n";
  const auto old = os.precision(17);
  for (std::size_t k = 0; k < packing.functions.size(); ++k) {
    os << k;
    for (double v : packing.functions[k].values()) os << "," << v;
    os << "\n";
  }
  os.precision(old);
}

}  // namespace netent
