#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "netent/network.hpp"
#include "netent/pwl.hpp"

namespace netent {

/// A finite set of functions with a pairwise distance. Grid members use
/// the discrete L^p mean; PWL members use exact L1 or sup distances.
class FunctionCloud {
 public:
  static FunctionCloud from_grid(std::vector<GridFunction> members);
  static FunctionCloud from_pwl(std::vector<PwlFunction> members);

  std::size_t size() const { return exact_ ? pwl_.size() : grid_.size(); }
  bool exact() const { return exact_; }
  double distance(std::size_t i, std::size_t j, double p) const;
  FunctionCloud subset(const std::vector<std::size_t>& indices) const;

  const std::vector<GridFunction>& grid_members() const { return grid_; }
  const std::vector<PwlFunction>& pwl_members() const { return pwl_; }

 private:
  bool exact_ = false;
  std::vector<GridFunction> grid_;
  std::vector<PwlFunction> pwl_;
};

/// Samples every config on the shared m^d grid (m = 0 picks the default).
FunctionCloud grid_cloud(const std::vector<NetworkConfig>& configs, std::size_t m = 0);

/// Exact number of members of the finite-domain family, including the
/// connectivity restriction.
BigCount count_configs(const FamilySpec& spec);

/// Calls visit once per member, ordered by depth, then hidden widths, then
/// parameters (layer by layer, weights row-major before biases, each
/// parameter ranging over the sorted domain). Throws ResourceError with the
/// exact count when it exceeds cap.
void for_each_config(const FamilySpec& spec, const std::function<void(const NetworkConfig&)>& visit,
                     std::size_t cap = 1000000);

std::vector<NetworkConfig> enumerate_configs(const FamilySpec& spec, std::size_t cap = 1000000);

/// Keeps the first member of every class of sup distance <= tol.
FunctionCloud dedup_realizations(const FunctionCloud& cloud, double tol = 1e-12);

/// First-fit maximal packing: member i joins when its distance to every
/// selected member exceeds eps.
std::vector<std::size_t> greedy_packing(const FunctionCloud& cloud, double eps, double p);

/// Repeatedly selects the member covering the most uncovered members
/// within eps, lowest index on ties.
std::vector<std::size_t> greedy_covering(const FunctionCloud& cloud, double eps, double p);

struct Sandwich {
  std::size_t lowerN = 0;
  std::size_t upperN = 0;
};

/// (|packing at 2 eps|, |packing at eps|), which bracket the covering number
/// at eps.
Sandwich entropy_sandwich(const FunctionCloud& cloud, double eps, double p);

}  // namespace netent
