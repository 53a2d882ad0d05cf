#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "netent/weight_domain.hpp"

namespace netent {

/// One affine map x -> A x + b. `weights` is row-major, rows x cols.
struct Layer {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  Layer() = default;
  Layer(std::size_t r, std::size_t c);
  Layer(std::size_t r, std::size_t c, std::vector<double> w, std::vector<double> b);

  double& at(std::size_t i, std::size_t j) { return weights[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return weights[i * cols + j]; }
};

/// A finite sequence of affine layers with ReLU between consecutive layers.
///
/// Immutable after construction. The constructor checks that layer shapes
/// chain and throws DimensionError naming the first offending layer
/// (1-based).
class NetworkConfig {
 public:
  NetworkConfig(std::size_t input_dim, std::vector<Layer> layers);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return layers_.back().rows; }
  std::size_t depth() const { return layers_.size(); }
  /// max over N_0, ..., N_L.
  std::size_t width() const;
  /// max |entry| over all weights and biases.
  double magnitude() const;
  /// Number of nonzero weights and biases.
  std::size_t connectivity() const;
  /// Number of weights and biases.
  std::size_t parameter_count() const;
  /// (N_0, N_1, ..., N_L).
  std::vector<std::size_t> architecture() const;

  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& layer(std::size_t l) const { return layers_[l]; }

  /// Realization at x (first output coordinate). Throws DimensionError if
  /// x has the wrong length.
  double evaluate(std::span<const double> x) const;
  double evaluate(double x) const { return evaluate(std::span<const double>(&x, 1)); }
  /// All output coordinates.
  std::vector<double> evaluate_all(std::span<const double> x) const;

 private:
  std::size_t input_dim_;
  std::vector<Layer> layers_;
};

inline constexpr std::uint64_t kUnboundedConnectivity = std::numeric_limits<std::uint64_t>::max();

/// N_A(d, W, L, B, s). B may be +infinity; s may be kUnboundedConnectivity.
struct FamilySpec {
  std::size_t d = 1;
  std::size_t W = 1;
  std::size_t L = 1;
  double B = std::numeric_limits<double>::infinity();
  std::uint64_t s = kUnboundedConnectivity;
  WeightDomain domain = WeightDomain::interval(std::numeric_limits<double>::infinity());

  /// Throws PreconditionError unless W >= d >= 1 and L >= 1.
  void validate() const;
  bool contains(const NetworkConfig& cfg) const;
};

/// Values of a function on the grid {0, 1/(m-1), ..., 1}^d, first axis
/// slowest.
struct GridFunction {
  std::size_t d = 1;
  std::size_t m = 2;
  std::vector<double> values;
};

/// Default points per axis: 1025, 65, 17 for d = 1, 2, 3, else 9.
std::size_t default_grid_points(std::size_t d);
/// Coordinates of grid point `index`.
std::vector<double> grid_point(std::size_t d, std::size_t m, std::size_t index);

/// Discrete p-mean of |f - g| over the shared grid; p = infinity gives the
/// max. Throws DimensionError on mismatched grids.
double lp_distance(const GridFunction& f, const GridFunction& g, double p);

inline constexpr std::size_t kDefaultGridBudget = std::size_t{1} << 24;

/// Evaluates cfg at all m^d grid points. Throws ResourceError if m^d
/// exceeds `budget`.
GridFunction sample_grid(const NetworkConfig& cfg, std::size_t m,
                         std::size_t budget = kDefaultGridBudget);

/// Same depth L realization, built by splitting the last affine map into
/// (A; -A), passing both halves through identity layers and recombining
/// with (1, -1). Requires the domain to contain -1, 0 and 1.
NetworkConfig augment_to_depth(const NetworkConfig& cfg, std::size_t L,
                               const WeightDomain& domain =
                                   WeightDomain::interval(std::numeric_limits<double>::infinity()));

/// Realizes clamp(R(cfg), -E, E). Depth grows by 2.
NetworkConfig truncate_as_network(const NetworkConfig& cfg, double E);

/// Realizes g(x_1, ..., x_d) = f(x_1) for a 1-input cfg.
NetworkConfig lift_to_dim(const NetworkConfig& cfg, std::size_t d);

struct Amplified {
  NetworkConfig config;
  double factor;
};

/// Realizes factor * R(cfg) with depth L1 + L2 and width <= W1, where
/// factor = B2^(L1+L2) floor(W1/2)^L2 / B1^L1.
///
/// Existing layer l has weights scaled by r = B2/B1 and bias by r^l, which
/// keeps the realization exact. The magnitude stays <= B2 whenever
/// |b_l| r^l <= B2 for every layer, in particular when r <= 1 or when only
/// the first layer carries biases.
Amplified amplify(const NetworkConfig& cfg, std::size_t L2, double B2);

/// Random config with the given hidden widths and one output; entries
/// i.i.d. uniform on [-B, B].
NetworkConfig random_network(std::uint64_t seed, std::size_t d,
                             const std::vector<std::size_t>& hidden, double B);

/// Random member of N(d, W, L, B): depth uniform on {1..L}, hidden widths
/// uniform on {1..W}.
NetworkConfig random_member(std::uint64_t seed, std::size_t d, std::size_t W, std::size_t L,
                            double B);

/// Mixes a base seed with a stream index (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace netent
