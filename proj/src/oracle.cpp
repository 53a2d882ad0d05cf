#include "netent/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netent/errors.hpp"

namespace netent {

FunctionCloud FunctionCloud::from_grid(std::vector<GridFunction> members) {
  for (std::size_t i = 1; i < members.size(); ++i)
    if (members[i].d != members[0].d || members[i].m != members[0].m)
      throw DimensionError(0, "cloud members live on different grids");
  FunctionCloud c;
  c.grid_ = std::move(members);
  return c;
}

FunctionCloud FunctionCloud::from_pwl(std::vector<PwlFunction> members) {
  FunctionCloud c;
  c.exact_ = true;
  c.pwl_ = std::move(members);
  return c;
}

double FunctionCloud::distance(std::size_t i, std::size_t j, double p) const {
  if (i == j) return 0.0;
  if (!exact_) return lp_distance(grid_[i], grid_[j], p);
  if (p == 1.0) return l1_distance(pwl_[i], pwl_[j]);
  if (std::isinf(p)) return sup_distance(pwl_[i], pwl_[j]);
  throw PreconditionError("exact distances are available for p = 1 and p = infinity only");
}

FunctionCloud FunctionCloud::subset(const std::vector<std::size_t>& indices) const {
  FunctionCloud c;
  c.exact_ = exact_;
  for (std::size_t i : indices) {
    if (exact_)
      c.pwl_.push_back(pwl_.at(i));
    else
      c.grid_.push_back(grid_.at(i));
  }
  return c;
}

FunctionCloud grid_cloud(const std::vector<NetworkConfig>& configs, std::size_t m) {
  std::vector<GridFunction> members;
  members.reserve(configs.size());
  for (const NetworkConfig& cfg : configs)
    members.push_back(sample_grid(cfg, m ? m : default_grid_points(cfg.input_dim())));
  return FunctionCloud::from_grid(std::move(members));
}

namespace {

struct Architecture {
  std::vector<std::size_t> dims;  // N_0, ..., N_L
  std::size_t params = 0;
};

std::vector<Architecture> architectures(const FamilySpec& spec) {
  std::vector<Architecture> out;
  for (std::size_t depth = 1; depth <= spec.L; ++depth) {
    std::vector<std::size_t> hidden(depth - 1, 1);
    while (true) {
      Architecture a;
      a.dims.push_back(spec.d);
      a.dims.insert(a.dims.end(), hidden.begin(), hidden.end());
      a.dims.push_back(1);
      for (std::size_t l = 1; l < a.dims.size(); ++l) a.params += a.dims[l] * (a.dims[l - 1] + 1);
      out.push_back(std::move(a));
      std::size_t k = hidden.size();
      while (k > 0 && hidden[k - 1] == spec.W) hidden[--k] = 1;
      if (k == 0) break;
      ++hidden[k - 1];
    }
  }
  return out;
}

std::vector<double> admissible_values(const FamilySpec& spec) {
  if (!spec.domain.is_finite()) throw PreconditionError("enumeration needs a finite weight domain");
  std::vector<double> values;
  for (double v : spec.domain.values())
    if (std::fabs(v) <= spec.B) values.push_back(v);
  return values;
}

BigCount binomial(std::size_t n, std::size_t k) {
  BigCount r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

BigCount count_architecture(std::size_t params, std::size_t nonzero, bool has_zero, std::uint64_t s) {
  const std::size_t kmax = s == kUnboundedConnectivity ? params : static_cast<std::size_t>(std::min<std::uint64_t>(s, params));
  if (!has_zero) {
    if (kmax < params) return 0;
    return boost::multiprecision::pow(BigCount(nonzero), static_cast<unsigned>(params));
  }
  BigCount total = 0;
  for (std::size_t k = 0; k <= kmax; ++k)
    total += binomial(params, k) * boost::multiprecision::pow(BigCount(nonzero), static_cast<unsigned>(k));
  return total;
}

}  // namespace

BigCount count_configs(const FamilySpec& spec) {
  spec.validate();
  const std::vector<double> values = admissible_values(spec);
  const bool has_zero = std::find(values.begin(), values.end(), 0.0) != values.end();
  const std::size_t nonzero = values.size() - (has_zero ? 1 : 0);
  BigCount total = 0;
  for (const Architecture& a : architectures(spec)) total += count_architecture(a.params, nonzero, has_zero, spec.s);
  return total;
}

void for_each_config(const FamilySpec& spec, const std::function<void(const NetworkConfig&)>& visit, std::size_t cap) {
  const BigCount total = count_configs(spec);
  if (total > cap) throw ResourceError("family enumeration exceeds cap of " + std::to_string(cap), total.str());
  const std::vector<double> values = admissible_values(spec);
  if (values.empty()) return;
  const std::size_t q = values.size();

  for (const Architecture& a : architectures(spec)) {
    std::vector<std::size_t> digits(a.params, 0);
    std::vector<Layer> layers;
    for (std::size_t l = 1; l < a.dims.size(); ++l) layers.emplace_back(a.dims[l], a.dims[l - 1]);
    while (true) {
      std::size_t idx = 0;
      std::size_t nnz = 0;
      for (Layer& layer : layers) {
        for (double& w : layer.weights) {
          w = values[digits[idx++]];
          nnz += w != 0.0;
        }
        for (double& b : layer.bias) {
          b = values[digits[idx++]];
          nnz += b != 0.0;
        }
      }
      if (spec.s == kUnboundedConnectivity || nnz <= spec.s) visit(NetworkConfig(spec.d, layers));
      std::size_t k = a.params;
      while (k > 0 && digits[k - 1] == q - 1) digits[--k] = 0;
      if (k == 0) break;
      ++digits[k - 1];
    }
  }
}

std::vector<NetworkConfig> enumerate_configs(const FamilySpec& spec, std::size_t cap) {
  std::vector<NetworkConfig> out;
  for_each_config(spec, [&](const NetworkConfig& cfg) { out.push_back(cfg); }, cap);
  return out;
}

FunctionCloud dedup_realizations(const FunctionCloud& cloud, double tol) {
  if (!(tol >= 0.0)) throw DomainError("tolerance must be nonnegative");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    bool fresh = true;
    for (std::size_t j : keep) {
      if (cloud.distance(i, j, inf) <= tol) {
        fresh = false;
        break;
      }
    }
    if (fresh) keep.push_back(i);
  }
  return cloud.subset(keep);
}

std::vector<std::size_t> greedy_packing(const FunctionCloud& cloud, double eps, double p) {
  if (!(eps >= 0.0)) throw DomainError("radius must be nonnegative");
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    bool separated = true;
    for (std::size_t j : selected) {
      if (!(cloud.distance(i, j, p) > eps)) {
        separated = false;
        break;
      }
    }
    if (separated) selected.push_back(i);
  }
  return selected;
}

std::vector<std::size_t> greedy_covering(const FunctionCloud& cloud, double eps, double p) {
  if (!(eps >= 0.0)) throw DomainError("radius must be nonnegative");
  const std::size_t n = cloud.size();
  std::vector<std::vector<std::size_t>> ball(n);
  for (std::size_t i = 0; i < n; ++i) {
    ball[i].push_back(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (cloud.distance(i, j, p) <= eps) {
        ball[i].push_back(j);
        ball[j].push_back(i);
      }
    }
  }
  std::vector<bool> covered(n, false);
  std::size_t remaining = n;
  std::vector<std::size_t> centers;
  while (remaining > 0) {
    std::size_t best = 0;
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t gain = 0;
      for (std::size_t j : ball[i]) gain += !covered[j];
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    centers.push_back(best);
    for (std::size_t j : ball[best]) {
      if (!covered[j]) {
        covered[j] = true;
        --remaining;
      }
    }
  }
  return centers;
}

Sandwich entropy_sandwich(const FunctionCloud& cloud, double eps, double p) {
  if (!(eps > 0.0)) throw DomainError("radius must be positive");
  return {greedy_packing(cloud, 2.0 * eps, p).size(), greedy_packing(cloud, eps, p).size()};
}

}  // namespace netent
