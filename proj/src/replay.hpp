#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"

namespace erc {

// One environment step. done is true only on a genuine terminal state,
// never on a time-limit truncation, so bootstrapped targets stay valid
// at horizon cuts. log_b is the behavior log-likelihood recorded at
// action time.
struct Transition {
  std::vector<double> s;
  std::vector<double> a;
  std::vector<double> s_next;
  double r = 0.0;
  bool done = false;
  double log_b = 0.0;
};

// Column-major view of a sampled minibatch.
struct Batch {
  Matrix s;
  Matrix a;
  Matrix s_next;
  std::vector<double> r;
  std::vector<double> log_b;
  std::vector<std::uint8_t> done;
  std::size_t size() const { return s.rows; }
};

// FIFO ring of fixed capacity with uniform with-replacement sampling.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t obs_dim, std::size_t act_dim);

  void push(std::span<const double> s, std::span<const double> a,
            std::span<const double> s_next, double r, bool done, double log_b);
  void push(const Transition& t);

  std::size_t size() const { return count_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t obs_dim() const { return obs_dim_; }
  std::size_t act_dim() const { return act_dim_; }

  void sample_uniform(std::size_t n, Rng& rng, Batch& out) const;

  // i-th stored transition in insertion order of the retained window.
  Transition transition(std::size_t i) const;

  // Debug dump, versioned little-endian.
  void dump(const std::string& path) const;

 private:
  std::size_t slot(std::size_t ordered_index) const;

  std::size_t capacity_;
  std::size_t obs_dim_;
  std::size_t act_dim_;
  std::size_t head_ = 0;  // next write position
  std::size_t count_ = 0;
  std::vector<double> s_;
  std::vector<double> a_;
  std::vector<double> sn_;
  std::vector<double> r_;
  std::vector<double> logb_;
  std::vector<std::uint8_t> done_;
};

// Number of minibatches replayed at an episode end: half the stored
// data, in batches of batch_size, with a warmup gate below one batch.
std::size_t replay_schedule(std::size_t count, std::size_t batch_size = 256);

}  // namespace erc
