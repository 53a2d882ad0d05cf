#include "netent/weight_domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "netent/errors.hpp"

namespace netent {

namespace {

bool on_dyadic_lattice(double x, int b) {
  const double scaled = std::ldexp(x, b);
  return std::isfinite(scaled) && scaled == std::trunc(scaled);
}

}  // namespace

WeightDomain WeightDomain::interval(double B) {
  if (!(B >= 0.0)) throw DomainError("interval bound must be nonnegative");
  WeightDomain w;
  w.kind_ = Kind::Interval;
  w.B_ = B;
  return w;
}

WeightDomain WeightDomain::dyadic_grid(double B, int b) {
  if (!(B >= 0.0) || !std::isfinite(B)) throw DomainError("dyadic grid needs a finite bound");
  if (b < 0) throw DomainError("precision must be nonnegative");
  WeightDomain w;
  w.kind_ = Kind::DyadicGrid;
  w.B_ = B;
  w.b_ = b;
  return w;
}

WeightDomain WeightDomain::base2_grid(int a, int b) {
  if (a < 0 || b < 0) throw DomainError("base-2 grid needs a, b >= 0");
  WeightDomain w;
  w.kind_ = Kind::Base2Grid;
  w.a_ = a;
  w.b_ = b;
  w.B_ = std::ldexp(1.0, a + 1) - std::ldexp(1.0, -b);
  return w;
}

WeightDomain WeightDomain::finite_set(std::vector<double> values) {
  if (values.empty()) throw PreconditionError("finite weight set must be nonempty");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("finite weight set has a non-finite value");
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  WeightDomain w;
  w.kind_ = Kind::FiniteSet;
  w.B_ = std::max(std::fabs(values.front()), std::fabs(values.back()));
  w.set_ = std::move(values);
  return w;
}

bool WeightDomain::contains(double x) const {
  switch (kind_) {
    case Kind::Interval:
      return std::fabs(x) <= B_;
    case Kind::DyadicGrid:
      return std::fabs(x) <= B_ && on_dyadic_lattice(x, b_);
    case Kind::Base2Grid:
      return std::fabs(x) < std::ldexp(1.0, a_ + 1) && on_dyadic_lattice(x, b_);
    case Kind::FiniteSet:
      return std::binary_search(set_.begin(), set_.end(), x);
  }
  return false;
}

double WeightDomain::bound() const { return B_; }

BigCount WeightDomain::cardinality() const {
  switch (kind_) {
    case Kind::Interval:
      throw PreconditionError("an interval domain has no finite cardinality");
    case Kind::DyadicGrid: {
      // 2 floor(2^b B) + 1; floor(2^b B) is exact for every double.
      const double k = std::floor(std::ldexp(B_, b_));
      const BigCount kk(k);
      return 2 * kk + 1;
    }
    case Kind::Base2Grid: {
      BigCount one = 1;
      return (one << (a_ + b_ + 2)) - 1;
    }
    case Kind::FiniteSet:
      return BigCount(set_.size());
  }
  return 0;
}

std::vector<double> WeightDomain::values(std::size_t cap) const {
  if (kind_ == Kind::FiniteSet) {
    if (set_.size() > cap) throw ResourceError("weight set exceeds cap", std::to_string(set_.size()));
    return set_;
  }
  const BigCount n = cardinality();
  if (n > cap) throw ResourceError("weight grid exceeds cap", n.str());
  const auto count = n.convert_to<std::size_t>();
  const auto half = static_cast<std::int64_t>((count - 1) / 2);
  std::vector<double> out;
  out.reserve(count);
  for (std::int64_t k = -half; k <= half; ++k) out.push_back(std::ldexp(static_cast<double>(k), -b_));
  return out;
}

std::string WeightDomain::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Interval:
      os << "interval(B=" << B_ << ")";
      break;
    case Kind::DyadicGrid:
      os << "dyadic(B=" << B_ << ",b=" << b_ << ")";
      break;
    case Kind::Base2Grid:
      os << "base2(a=" << a_ << ",b=" << b_ << ")";
      break;
    case Kind::FiniteSet: {
      os << "set(";
      for (std::size_t i = 0; i < set_.size(); ++i) os << (i ? "," : "") << set_[i];
      os << ")";
      break;
    }
  }
  return os.str();
}

}  // namespace netent
