#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace netent {

/// Continuous piecewise-linear function on [0, 1], linear between the
/// stored nodes and constant outside them.
class PwlFunction {
 public:
  PwlFunction(std::vector<double> breakpoints, std::vector<double> values);

  double operator()(double x) const;
  const std::vector<double>& breakpoints() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  double sup_norm() const;
  PwlFunction scaled(double a) const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

/// Exact integral of |f - g| over [0, 1]. Each segment of the merged node
/// set contributes h(|d0| + |d1|)/2 when the difference keeps its sign and
/// h(d0^2 + d1^2) / (2(|d0| + |d1|)) when it crosses zero.
double l1_distance(const PwlFunction& f, const PwlFunction& g);
/// Exact max of |f - g| over [0, 1].
double sup_distance(const PwlFunction& f, const PwlFunction& g);

struct PwlPacking {
  std::size_t N = 0;
  double E = 0.0;
  double eps = 0.0;
  std::size_t M = 0;
  /// Set when eps >= E/(4N); `functions` is then empty.
  bool trivial = false;
  std::vector<PwlFunction> functions;

  /// Guaranteed pairwise L1 separation E/(2MN).
  double separation() const;
  /// log2 of the certified count ceil(E/(4 eps N))^N.
  double certificate_log2() const;
};

/// All f_y with f_y(0) = 0 and f_y(i/N) = l_i E / M, l_i in {0..M},
/// M = ceil(E/(4 eps N)), ordered lexicographically in (l_1, ..., l_N).
/// Throws ResourceError when (M+1)^N exceeds `cap`.
PwlPacking build_packing(std::size_t N, double E, double eps, std::size_t cap = 1000000);

/// N log2 ceil(E/(4 eps N)), or 0 when the ceiling is 1.
double packing_log_lower_bound(std::size_t N, double E, double eps);

/// Header `index,node_0,...,node_N`, one row per function.
void write_packing_csv(std::ostream& os, const PwlPacking& packing);

}  // namespace netent
