#include "netent/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "netent/errors.hpp"

namespace netent {

Layer::Layer(std::size_t r, std::size_t c) : rows(r), cols(c), weights(r * c, 0.0), bias(r, 0.0) {}

Layer::Layer(std::size_t r, std::size_t c, std::vector<double> w, std::vector<double> b)
    : rows(r), cols(c), weights(std::move(w)), bias(std::move(b)) {}

NetworkConfig::NetworkConfig(std::size_t input_dim, std::vector<Layer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
  if (input_dim_ == 0) throw DimensionError(1, "input dimension must be positive");
  if (layers_.empty()) throw DimensionError(0, "a configuration needs at least one layer");
  std::size_t expected = input_dim_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    if (layer.rows == 0) throw DimensionError(l + 1, "zero output neurons");
    if (layer.cols != expected)
      throw DimensionError(l + 1, "expects " + std::to_string(layer.cols) + " inputs, previous layer gives " +
                                      std::to_string(expected));
    if (layer.weights.size() != layer.rows * layer.cols)
      throw DimensionError(l + 1, "weight storage does not match shape");
    if (layer.bias.size() != layer.rows) throw DimensionError(l + 1, "bias length does not match rows");
    expected = layer.rows;
  }
}

std::size_t NetworkConfig::width() const {
  std::size_t w = input_dim_;
  for (const Layer& layer : layers_) w = std::max(w, layer.rows);
  return w;
}

double NetworkConfig::magnitude() const {
  double m = 0.0;
  for (const Layer& layer : layers_) {
    for (double v : layer.weights) m = std::max(m, std::fabs(v));
    for (double v : layer.bias) m = std::max(m, std::fabs(v));
  }
  return m;
}

std::size_t NetworkConfig::connectivity() const {
  std::size_t n = 0;
  for (const Layer& layer : layers_) {
    n += static_cast<std::size_t>(std::count_if(layer.weights.begin(), layer.weights.end(),
                                                [](double v) { return v != 0.0; }));
    n += static_cast<std::size_t>(
        std::count_if(layer.bias.begin(), layer.bias.end(), [](double v) { return v != 0.0; }));
  }
  return n;
}

std::size_t NetworkConfig::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& layer : layers_) n += layer.weights.size() + layer.bias.size();
  return n;
}

std::vector<std::size_t> NetworkConfig::architecture() const {
  std::vector<std::size_t> arch{input_dim_};
  for (const Layer& layer : layers_) arch.push_back(layer.rows);
  return arch;
}

std::vector<double> NetworkConfig::evaluate_all(std::span<const double> x) const {
  if (x.size() != input_dim_)
    throw DimensionError(1, "input has length " + std::to_string(x.size()) + ", expected " +
                                std::to_string(input_dim_));
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    next.assign(layer.bias.begin(), layer.bias.end());
    for (std::size_t i = 0; i < layer.rows; ++i) {
      const double* row = layer.weights.data() + i * layer.cols;
      double acc = next[i];
      for (std::size_t j = 0; j < layer.cols; ++j) acc += row[j] * cur[j];
      next[i] = acc;
    }
    if (l + 1 < layers_.size())
      for (double& v : next) v = std::max(v, 0.0);
    cur.swap(next);
  }
  return cur;
}

double NetworkConfig::evaluate(std::span<const double> x) const { return evaluate_all(x)[0]; }

void FamilySpec::validate() const {
  if (d == 0) throw PreconditionError("family input dimension must be positive");
  if (L == 0) throw PreconditionError("family depth must be positive");
  if (W < d) throw PreconditionError("family width must be at least the input dimension");
}

bool FamilySpec::contains(const NetworkConfig& cfg) const {
  if (cfg.input_dim() != d || cfg.output_dim() != 1) return false;
  if (cfg.depth() > L || cfg.width() > W) return false;
  if (cfg.magnitude() > B) return false;
  if (s != kUnboundedConnectivity && cfg.connectivity() > s) return false;
  for (const Layer& layer : cfg.layers()) {
    for (double v : layer.weights)
      if (!domain.contains(v)) return false;
    for (double v : layer.bias)
      if (!domain.contains(v)) return false;
  }
  return true;
}

std::size_t default_grid_points(std::size_t d) {
  switch (d) {
    case 1:
      return 1025;
    case 2:
      return 65;
    case 3:
      return 17;
    default:
      return 9;
  }
}

std::vector<double> grid_point(std::size_t d, std::size_t m, std::size_t index) {
  std::vector<double> x(d);
  const double step = 1.0 / static_cast<double>(m - 1);
  for (std::size_t k = d; k-- > 0;) {
    x[k] = static_cast<double>(index % m) * step;
    index /= m;
  }
  return x;
}

double lp_distance(const GridFunction& f, const GridFunction& g, double p) {
  if (f.d != g.d || f.m != g.m || f.values.size() != g.values.size())
    throw DimensionError(0, "grid functions live on different grids");
  if (!(p >= 1.0)) throw DomainError("norm order must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) m = std::max(m, std::fabs(f.values[i] - g.values[i]));
    return m;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double diff = std::fabs(f.values[i] - g.values[i]);
    acc += p == 1.0 ? diff : std::pow(diff, p);
  }
  acc /= static_cast<double>(f.values.size());
  return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

GridFunction sample_grid(const NetworkConfig& cfg, std::size_t m, std::size_t budget) {
  if (m < 2) throw PreconditionError("grid needs at least 2 points per axis");
  const std::size_t d = cfg.input_dim();
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (total > budget / m)
      throw ResourceError("grid exceeds budget", std::to_string(m) + "^" + std::to_string(d) + " points");
    total *= m;
  }
  GridFunction out{d, m, std::vector<double>(total)};
  for (std::size_t i = 0; i < total; ++i) out.values[i] = cfg.evaluate(grid_point(d, m, i));
  return out;
}

NetworkConfig augment_to_depth(const NetworkConfig& cfg, std::size_t L, const WeightDomain& domain) {
  if (L < cfg.depth()) throw PreconditionError("target depth is below the current depth");
  if (!domain.contains(-1.0) || !domain.contains(0.0) || !domain.contains(1.0))
    throw DomainError("augmentation needs -1, 0 and 1 in the weight domain");
  if (cfg.output_dim() != 1) throw PreconditionError("augmentation needs a single output");
  if (L == cfg.depth()) return cfg;

  std::vector<Layer> layers(cfg.layers().begin(), cfg.layers().end() - 1);
  const Layer& last = cfg.layers().back();
  Layer split(2, last.cols);
  for (std::size_t j = 0; j < last.cols; ++j) {
    split.at(0, j) = last.at(0, j);
    split.at(1, j) = -last.at(0, j);
  }
  split.bias = {last.bias[0], -last.bias[0]};
  layers.push_back(std::move(split));
  for (std::size_t l = cfg.depth() + 1; l < L; ++l) layers.emplace_back(2, 2, std::vector<double>{1, 0, 0, 1},
                                                                        std::vector<double>{0, 0});
  layers.emplace_back(1, 2, std::vector<double>{1, -1}, std::vector<double>{0});
  return NetworkConfig(cfg.input_dim(), std::move(layers));
}

NetworkConfig truncate_as_network(const NetworkConfig& cfg, double E) {
  if (!(E > 0.0)) throw DomainError("truncation level must be positive");
  if (cfg.output_dim() != 1) throw PreconditionError("truncation needs a single output");
  // y = rho(y) - rho(-y), then T_E(y) = -E + rho(y + E) - rho(y - E).
  std::vector<Layer> layers(cfg.layers().begin(), cfg.layers().end() - 1);
  const Layer& last = cfg.layers().back();
  Layer split(2, last.cols);
  for (std::size_t j = 0; j < last.cols; ++j) {
    split.at(0, j) = last.at(0, j);
    split.at(1, j) = -last.at(0, j);
  }
  split.bias = {last.bias[0], -last.bias[0]};
  layers.push_back(std::move(split));
  layers.emplace_back(2, 2, std::vector<double>{1, -1, 1, -1}, std::vector<double>{E, -E});
  layers.emplace_back(1, 2, std::vector<double>{1, -1}, std::vector<double>{-E});
  return NetworkConfig(cfg.input_dim(), std::move(layers));
}

NetworkConfig lift_to_dim(const NetworkConfig& cfg, std::size_t d) {
  if (cfg.input_dim() != 1) throw PreconditionError("lifting needs a 1-input configuration");
  if (d == 0) throw PreconditionError("target dimension must be positive");
  std::vector<Layer> layers = cfg.layers();
  const Layer& first = cfg.layers().front();
  Layer padded(first.rows, d);
  for (std::size_t i = 0; i < first.rows; ++i) padded.at(i, 0) = first.at(i, 0);
  padded.bias = first.bias;
  layers.front() = std::move(padded);
  return NetworkConfig(d, std::move(layers));
}

Amplified amplify(const NetworkConfig& cfg, std::size_t L2, double B2) {
  const std::size_t W1 = cfg.width();
  const double B1 = cfg.magnitude();
  if (W1 < 2) throw PreconditionError("amplification needs width at least 2");
  if (!(B1 >= 1.0)) throw PreconditionError("amplification needs magnitude at least 1");
  if (!(B2 >= 1.0)) throw PreconditionError("target magnitude must be at least 1");
  if (cfg.output_dim() != 1) throw PreconditionError("amplification needs a single output");

  const std::size_t L1 = cfg.depth();
  const double r = B2 / B1;
  std::vector<Layer> layers = cfg.layers();
  double bias_scale = 1.0;
  for (Layer& layer : layers) {
    bias_scale *= r;
    for (double& v : layer.weights) v *= r;
    for (double& v : layer.bias) v *= bias_scale;
  }

  const std::size_t k = W1 / 2;
  if (L2 > 0) {
    // k copies of y and k copies of -y; each appended layer sums a block
    // with weight B2, the last one recombines the blocks.
    const Layer last = layers.back();
    Layer split(2 * k, last.cols);
    for (std::size_t i = 0; i < 2 * k; ++i) {
      const double sign = i < k ? 1.0 : -1.0;
      for (std::size_t j = 0; j < last.cols; ++j) split.at(i, j) = sign * last.at(0, j);
      split.bias[i] = sign * last.bias[0];
    }
    layers.back() = std::move(split);
    for (std::size_t l = 1; l < L2; ++l) {
      Layer sum(2 * k, 2 * k);
      for (std::size_t i = 0; i < 2 * k; ++i)
        for (std::size_t j = 0; j < 2 * k; ++j)
          if ((i < k) == (j < k)) sum.at(i, j) = B2;
      layers.push_back(std::move(sum));
    }
    Layer out(1, 2 * k);
    for (std::size_t j = 0; j < 2 * k; ++j) out.at(0, j) = j < k ? B2 : -B2;
    layers.push_back(std::move(out));
  }

  const double factor = std::pow(B2, static_cast<double>(L1 + L2)) *
                        std::pow(static_cast<double>(k), static_cast<double>(L2)) /
                        std::pow(B1, static_cast<double>(L1));
  return {NetworkConfig(cfg.input_dim(), std::move(layers)), factor};
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

NetworkConfig random_network(std::uint64_t seed, std::size_t d, const std::vector<std::size_t>& hidden, double B) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-B, B);
  std::vector<Layer> layers;
  std::size_t in = d;
  auto fill = [&](std::size_t rows) {
    Layer layer(rows, in);
    for (double& v : layer.weights) v = unif(rng);
    for (double& v : layer.bias) v = unif(rng);
    layers.push_back(std::move(layer));
    in = rows;
  };
  for (std::size_t w : hidden) fill(w);
  fill(1);
  return NetworkConfig(d, std::move(layers));
}

NetworkConfig random_member(std::uint64_t seed, std::size_t d, std::size_t W, std::size_t L, double B) {
  std::mt19937_64 rng(derive_seed(seed, 0));
  std::uniform_int_distribution<std::size_t> depth(1, L);
  std::uniform_int_distribution<std::size_t> width(1, W);
  std::vector<std::size_t> hidden(depth(rng) - 1);
  for (auto& w : hidden) w = width(rng);
  return random_network(derive_seed(seed, 1), d, hidden, B);
}

}  // namespace netent
