#include "mlp.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "fastops.hpp"

namespace erc {

Mlp::Mlp(MlpSpec spec) : spec_(std::move(spec)) {
  if (spec_.input_dim < 1 || spec_.output_dim < 1)
    throw std::invalid_argument("mlp: dims must be >= 1");
  for (int h : spec_.hidden_dims)
    if (h < 1) throw std::invalid_argument("mlp: hidden dims must be >= 1");

  std::size_t off = 0;
  int in = spec_.input_dim;
  auto add_layer = [&](int out) {
    LayerShape l;
    l.in = in;
    l.out = out;
    l.w_off = off;
    off += static_cast<std::size_t>(in) * out;
    l.b_off = off;
    off += out;
    layers_.push_back(l);
    in = out;
  };
  for (int h : spec_.hidden_dims) add_layer(h);
  add_layer(spec_.output_dim);
  n_params_ = off;
}

ParameterSet Mlp::init(std::uint64_t seed) const {
  ParameterSet p;
  p.values.assign(n_params_, 0.0);
  p.layout = layers_;
  Rng rng(seed, 0);
  for (const auto& l : layers_) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(l.in));
    double* w = p.values.data() + l.w_off;
    const std::size_t nw = static_cast<std::size_t>(l.in) * l.out;
    for (std::size_t i = 0; i < nw; ++i) w[i] = rng.uniform(-scale, scale);
    // biases stay zero
  }
  return p;
}

const Matrix& Mlp::forward(const ParameterSet& params, const Matrix& x,
                           MlpCache& cache) const {
  if (params.size() != n_params_)
    throw std::invalid_argument("mlp forward: parameter size mismatch");
  if (x.cols != static_cast<std::size_t>(spec_.input_dim))
    throw std::invalid_argument("mlp forward: input width mismatch");
  if (!all_finite(x.data.data(), x.data.size()))
    throw std::invalid_argument("mlp forward: non-finite input");

  const std::size_t n = x.rows;
  cache.batch = n;
  cache.acts.resize(layers_.size() + 1);
  cache.acts[0] = x;

  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const LayerShape& l = layers_[li];
    const Matrix& in = cache.acts[li];
    Matrix& out = cache.acts[li + 1];
    out.resize(n, static_cast<std::size_t>(l.out));
    gemm_nn(in.data.data(), n, l.in, params.values.data() + l.w_off, l.out,
            out.data.data());
    const double* b = params.values.data() + l.b_off;
    for (std::size_t i = 0; i < n; ++i) {
      double* row = out.row(i);
      for (int j = 0; j < l.out; ++j) row[j] += b[j];
    }
    const bool last = (li + 1 == layers_.size());
    if (!last) {
      if (spec_.hidden_activation == Activation::tanh)
        tanh_inplace(out.data.data(), out.data.size());
      else
        relu_inplace(out.data.data(), out.data.size());
    } else if (spec_.output_activation == OutputActivation::sigmoid) {
      sigmoid_inplace(out.data.data(), out.data.size());
    }
  }
  return cache.acts.back();
}

void Mlp::backward(const ParameterSet& params, const MlpCache& cache,
                   const Matrix& dout, std::vector<double>* param_grads,
                   Matrix* input_grad) const {
  if (cache.acts.size() != layers_.size() + 1)
    throw std::invalid_argument("mlp backward: cache does not match network");
  if (dout.rows != cache.batch ||
      dout.cols != static_cast<std::size_t>(spec_.output_dim))
    throw std::invalid_argument("mlp backward: output grad shape mismatch");
  if (param_grads && param_grads->size() != n_params_)
    throw std::invalid_argument("mlp backward: grad buffer size mismatch");

  const std::size_t n = cache.batch;
  Matrix dz = dout;

  // Output activation.
  if (spec_.output_activation == OutputActivation::sigmoid) {
    const Matrix& y = cache.acts.back();
    for (std::size_t i = 0; i < dz.data.size(); ++i)
      dz.data[i] *= y.data[i] * (1.0 - y.data[i]);
  }

  Matrix dx;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const LayerShape& l = layers_[li];
    const Matrix& in = cache.acts[li];
    if (param_grads) {
      gemm_tn_acc(in.data.data(), n, l.in, dz.data.data(), l.out,
                  param_grads->data() + l.w_off);
      double* db = param_grads->data() + l.b_off;
      for (std::size_t i = 0; i < n; ++i) {
        const double* row = dz.row(i);
        for (int j = 0; j < l.out; ++j) db[j] += row[j];
      }
    }
    const bool need_dx = li > 0 || input_grad != nullptr;
    if (!need_dx) break;
    dx.resize(n, static_cast<std::size_t>(l.in));
    gemm_nt(dz.data.data(), n, l.out, params.values.data() + l.w_off, l.in,
            dx.data.data());
    if (li > 0) {
      // Undo the hidden activation of the layer below.
      const Matrix& h = cache.acts[li];
      if (spec_.hidden_activation == Activation::tanh) {
        for (std::size_t i = 0; i < dx.data.size(); ++i)
          dx.data[i] *= 1.0 - h.data[i] * h.data[i];
      } else {
        for (std::size_t i = 0; i < dx.data.size(); ++i)
          if (h.data[i] <= 0.0) dx.data[i] = 0.0;
      }
    }
    std::swap(dz, dx);
  }
  if (input_grad) *input_grad = std::move(dz);
}

void soft_update(ParameterSet& target, const ParameterSet& online,
                 double tau) {
  if (!target.same_layout(online) || target.size() != online.size())
    throw std::invalid_argument("soft_update: layout mismatch");
  if (tau < 0.0 || tau > 1.0)
    throw std::invalid_argument("soft_update: tau outside [0, 1]");
  const double keep = 1.0 - tau;
  for (std::size_t i = 0; i < target.values.size(); ++i)
    target.values[i] = keep * target.values[i] + tau * online.values[i];
}

// --- serialization ------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'E', 'R', 'C', 'P', 'A', 'R', 'M', '1'};
constexpr std::uint32_t kBlobVersion = 1;

void put_bytes(std::ostream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}
void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(os, b, 4);
}
void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(os, b, 8);
}
void put_f64(std::ostream& os, double d) {
  put_u64(os, std::bit_cast<std::uint64_t>(d));
}
std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}
std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void save_parameter_blob(std::ostream& os, const MlpSpec& spec,
                         const ParameterSet& params) {
  put_bytes(os, kMagic, sizeof(kMagic));
  put_u32(os, kBlobVersion);
  put_u32(os, static_cast<std::uint32_t>(spec.hidden_dims.size()) + 2);
  put_u32(os, static_cast<std::uint32_t>(spec.input_dim));
  for (int h : spec.hidden_dims) put_u32(os, static_cast<std::uint32_t>(h));
  put_u32(os, static_cast<std::uint32_t>(spec.output_dim));
  put_u32(os, static_cast<std::uint32_t>(spec.hidden_activation));
  put_u32(os, static_cast<std::uint32_t>(spec.output_activation));
  put_u64(os, params.values.size());
  for (double v : params.values) put_f64(os, v);
  if (!os) throw std::runtime_error("parameter blob: write failed");
}

std::pair<MlpSpec, ParameterSet> load_parameter_blob(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("parameter blob: bad magic");
  const std::uint32_t version = get_u32(is);
  if (version != kBlobVersion)
    throw std::runtime_error("parameter blob: unsupported version");
  const std::uint32_t ndims = get_u32(is);
  if (ndims < 2 || ndims > 64)
    throw std::runtime_error("parameter blob: corrupt dim count");
  std::vector<int> dims(ndims);
  for (auto& d : dims) d = static_cast<int>(get_u32(is));
  MlpSpec spec;
  spec.input_dim = dims.front();
  spec.output_dim = dims.back();
  spec.hidden_dims.assign(dims.begin() + 1, dims.end() - 1);
  spec.hidden_activation = static_cast<Activation>(get_u32(is));
  spec.output_activation = static_cast<OutputActivation>(get_u32(is));
  const std::uint64_t n = get_u64(is);
  Mlp net(spec);
  if (n != net.param_count())
    throw std::runtime_error("parameter blob: value count mismatch");
  ParameterSet p;
  p.layout = net.layout();
  p.values.resize(n);
  for (auto& v : p.values) v = std::bit_cast<double>(get_u64(is));
  if (!is) throw std::runtime_error("parameter blob: truncated");
  return {spec, std::move(p)};
}

}  // namespace erc
