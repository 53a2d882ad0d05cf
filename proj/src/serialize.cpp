#include "netent/serialize.hpp"

#include "netent/errors.hpp"

namespace netent {

nlohmann::ordered_json to_json(const NetworkConfig& cfg) {
  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (const Layer& layer : cfg.layers()) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < layer.rows; ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (std::size_t j = 0; j < layer.cols; ++j) row.push_back(layer.at(i, j));
      rows.push_back(std::move(row));
    }
    layers.push_back({{"weights", std::move(rows)}, {"bias", layer.bias}});
  }
  return {{"input_dim", cfg.input_dim()}, {"layers", std::move(layers)}};
}

NetworkConfig network_from_json(const nlohmann::ordered_json& j) {
  const auto d = j.at("input_dim").get<std::size_t>();
  std::vector<Layer> layers;
  std::size_t in = d;
  for (const auto& jl : j.at("layers")) {
    const auto& rows = jl.at("weights");
    Layer layer(rows.size(), rows.empty() ? in : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != layer.cols) throw DimensionError(layers.size() + 1, "ragged weight matrix");
      for (std::size_t jj = 0; jj < layer.cols; ++jj) layer.at(i, jj) = rows[i][jj].get<double>();
    }
    layer.bias = jl.at("bias").get<std::vector<double>>();
    in = layer.rows;
    layers.push_back(std::move(layer));
  }
  return NetworkConfig(d, std::move(layers));
}

}  // namespace netent
