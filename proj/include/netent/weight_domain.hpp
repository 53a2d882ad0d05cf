#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

namespace netent {

using BigCount = boost::multiprecision::cpp_int;

// Admissible weight values. Grid kinds test membership exactly: a double is
// on 2^{-b}Z iff scaling by 2^b (exact in binary floating point) gives an
// integer.
class WeightDomain {
 public:
  enum class Kind { Interval, DyadicGrid, Base2Grid, FiniteSet };

  static WeightDomain interval(double B);
  static WeightDomain dyadic_grid(double B, int b);
  static WeightDomain base2_grid(int a, int b);
  static WeightDomain finite_set(std::vector<double> values);

  Kind kind() const { return kind_; }
  bool contains(double x) const;
  bool is_finite() const { return kind_ != Kind::Interval; }
  // Supremum of |x| over the domain.
  double bound() const;
  int a() const { return a_; }
  int b() const { return b_; }

  // Exact number of values; throws PreconditionError for intervals.
  BigCount cardinality() const;
  // Sorted values; throws ResourceError above `cap` entries.
  std::vector<double> values(std::size_t cap = 1u << 20) const;
  std::string describe() const;

 private:
  WeightDomain() = default;
  Kind kind_ = Kind::Interval;
  double B_ = 0.0;
  int a_ = 0;
  int b_ = 0;
  std::vector<double> set_;
};

}  // namespace netent
