#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"

namespace erc {

enum class Activation : std::uint8_t { tanh = 0, relu = 1 };
enum class OutputActivation : std::uint8_t { linear = 0, sigmoid = 1 };

struct MlpSpec {
  int input_dim = 1;
  std::vector<int> hidden_dims{100, 100};
  int output_dim = 1;
  Activation hidden_activation = Activation::tanh;
  OutputActivation output_activation = OutputActivation::linear;
};

// Index ranges of one dense layer inside the flat parameter vector.
// Weights are stored in x out (row = input unit), bias follows.
struct LayerShape {
  std::size_t w_off = 0;
  std::size_t b_off = 0;
  int in = 0;
  int out = 0;
  bool operator==(const LayerShape&) const = default;
};

struct ParameterSet {
  std::vector<double> values;
  std::vector<LayerShape> layout;

  std::size_t size() const { return values.size(); }
  bool same_layout(const ParameterSet& other) const {
    return layout == other.layout;
  }
};

// Post-activation of every layer, kept so the backward pass can be run
// against the exact forward it came from.
struct MlpCache {
  std::vector<Matrix> acts;  // acts[0] = input, acts.back() = output
  std::size_t batch = 0;
};

class Mlp {
 public:
  explicit Mlp(MlpSpec spec);

  const MlpSpec& spec() const { return spec_; }
  const std::vector<LayerShape>& layout() const { return layers_; }
  std::size_t param_count() const { return n_params_; }

  // Uniform weights scaled by 1/sqrt(fan_in), zero biases.
  ParameterSet init(std::uint64_t seed) const;

  // x: batch x input_dim. Output lands in cache.acts.back().
  const Matrix& forward(const ParameterSet& params, const Matrix& x,
                        MlpCache& cache) const;

  // Reverse-mode gradients of <output, dout>. Accumulates into
  // param_grads (callers zero it first); writes input grads if asked.
  void backward(const ParameterSet& params, const MlpCache& cache,
                const Matrix& dout, std::vector<double>* param_grads,
                Matrix* input_grad = nullptr) const;

 private:
  MlpSpec spec_;
  std::vector<LayerShape> layers_;
  std::size_t n_params_ = 0;
};

// target' = (1 - tau) * target + tau * online, layouts must match.
void soft_update(ParameterSet& target, const ParameterSet& online, double tau);

// Versioned little-endian blob: magic, spec header, raw 64-bit values.
void save_parameter_blob(std::ostream& os, const MlpSpec& spec,
                         const ParameterSet& params);
std::pair<MlpSpec, ParameterSet> load_parameter_blob(std::istream& is);

}  // namespace erc
