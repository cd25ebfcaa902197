#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace semground {

enum class Activation { Relu, None };

/// Fully connected layer. Weights are row-major [out x in].
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  Activation activation = Activation::None;

  double w(std::size_t row, std::size_t col) const { return weights[row * in + col]; }
  bool operator==(const DenseLayer&) const = default;
};

class Network {
 public:
  Network() = default;
  /// Validates that layer dimensions chain and the last layer is linear.
  explicit Network(std::vector<DenseLayer> layers);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return output_dim_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::size_t max_width() const noexcept { return max_width_; }

  std::vector<double> forward(std::span<const double> x) const;

  bool operator==(const Network& o) const { return layers_ == o.layers_; }

 private:
  std::vector<DenseLayer> layers_;
  std::size_t input_dim_ = 0;
  std::size_t output_dim_ = 0;
  std::size_t max_width_ = 0;
};

/// Network file: {"input_dim": n, "layers": [{"weights": [[...]], "bias": [...],
/// "activation": "relu"|"none"}, ...]}
Network network_from_json_text(const std::string& text);
std::string network_to_json_text(const Network& net);
Network load_network(const std::filesystem::path& path);
void save_network(const Network& net, const std::filesystem::path& path);

}  // namespace semground
