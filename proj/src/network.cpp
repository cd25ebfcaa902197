#include "semground/network.hpp"

#include <algorithm>

#include "semground/error.hpp"
#include "semground/json_io.hpp"

namespace semground {

Network::Network(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw Error(ErrorCode::InvalidArgument, "network has no layers");
  input_dim_ = layers_.front().in;
  max_width_ = input_dim_;
  std::size_t prev = input_dim_;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    if (l.in == 0 || l.out == 0) {
      throw Error(ErrorCode::InvalidArgument, "layer " + std::to_string(k) + " has a zero dimension");
    }
    if (l.in != prev) {
      throw Error(ErrorCode::DimensionMismatch,
                  "layer " + std::to_string(k) + " expects " + std::to_string(l.in) +
                      " inputs but previous layer produces " + std::to_string(prev));
    }
    if (l.weights.size() != l.in * l.out || l.bias.size() != l.out) {
      throw Error(ErrorCode::DimensionMismatch, "layer " + std::to_string(k) + " has inconsistent sizes");
    }
    prev = l.out;
    max_width_ = std::max(max_width_, l.out);
  }
  if (layers_.back().activation != Activation::None) {
    throw Error(ErrorCode::InvalidArgument, "last layer must have no activation");
  }
  output_dim_ = prev;
}

std::vector<double> Network::forward(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw Error(ErrorCode::DimensionMismatch, "forward: input has " + std::to_string(x.size()) +
                                                  " values, network expects " + std::to_string(input_dim_));
  }
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (const auto& l : layers_) {
    next.assign(l.out, 0.0);
    for (std::size_t r = 0; r < l.out; ++r) {
      const double* row = l.weights.data() + r * l.in;
      double acc = l.bias[r];
      for (std::size_t c = 0; c < l.in; ++c) acc += row[c] * cur[c];
      next[r] = (l.activation == Activation::Relu && acc < 0.0) ? 0.0 : acc;
    }
    cur.swap(next);
  }
  return cur;
}

namespace {

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "none") return Activation::None;
  throw Error(ErrorCode::MalformedFile, "unknown activation '" + s + "'");
}

}  // namespace

Network network_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedFile, std::string("network file: ") + e.what());
  }
  try {
    const auto input_dim = j.at("input_dim").get<std::size_t>();
    std::vector<DenseLayer> layers;
    std::size_t prev = input_dim;
    for (const auto& jl : j.at("layers")) {
      DenseLayer l;
      const auto rows = jl.at("weights").get<std::vector<std::vector<double>>>();
      l.out = rows.size();
      l.in = rows.empty() ? 0 : rows.front().size();
      if (l.in != prev) {
        throw Error(ErrorCode::DimensionMismatch, "network file: layer width chain broken");
      }
      l.weights.reserve(l.in * l.out);
      for (const auto& row : rows) {
        if (row.size() != l.in) throw Error(ErrorCode::MalformedFile, "network file: ragged weights");
        l.weights.insert(l.weights.end(), row.begin(), row.end());
      }
      l.bias = jl.at("bias").get<std::vector<double>>();
      l.activation = activation_from_string(jl.at("activation").get<std::string>());
      prev = l.out;
      layers.push_back(std::move(l));
    }
    return Network(std::move(layers));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedFile, std::string("network file: ") + e.what());
  }
}

std::string network_to_json_text(const Network& net) {
  json j;
  j["input_dim"] = net.input_dim();
  j["layers"] = json::array();
  for (const auto& l : net.layers()) {
    json rows = json::array();
    for (std::size_t r = 0; r < l.out; ++r) {
      rows.push_back(std::vector<double>(l.weights.begin() + r * l.in, l.weights.begin() + (r + 1) * l.in));
    }
    j["layers"].push_back({{"weights", rows},
                           {"bias", l.bias},
                           {"activation", l.activation == Activation::Relu ? "relu" : "none"}});
  }
  return j.dump() + "\n";
}

Network load_network(const std::filesystem::path& path) {
  return network_from_json_text(read_text_file(path));
}

void save_network(const Network& net, const std::filesystem::path& path) {
  write_text_file_atomic(path, network_to_json_text(net));
}

}  // namespace semground
