#include "replay.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace erc {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t obs_dim,
                           std::size_t act_dim)
    : capacity_(capacity), obs_dim_(obs_dim), act_dim_(act_dim) {
  if (capacity_ == 0 || obs_dim_ == 0 || act_dim_ == 0)
    throw std::invalid_argument("replay: zero capacity or dims");
  s_.resize(capacity_ * obs_dim_);
  a_.resize(capacity_ * act_dim_);
  sn_.resize(capacity_ * obs_dim_);
  r_.resize(capacity_);
  logb_.resize(capacity_);
  done_.resize(capacity_);
}

void ReplayBuffer::push(std::span<const double> s, std::span<const double> a,
                        std::span<const double> s_next, double r, bool done,
                        double log_b) {
  if (s.size() != obs_dim_ || s_next.size() != obs_dim_ ||
      a.size() != act_dim_)
    throw std::invalid_argument("replay push: dim mismatch");
  if (!all_finite(s.data(), s.size()) || !all_finite(a.data(), a.size()) ||
      !all_finite(s_next.data(), s_next.size()) || !std::isfinite(r) ||
      !std::isfinite(log_b))
    throw std::invalid_argument("replay push: non-finite transition");

  std::memcpy(&s_[head_ * obs_dim_], s.data(), obs_dim_ * sizeof(double));
  std::memcpy(&a_[head_ * act_dim_], a.data(), act_dim_ * sizeof(double));
  std::memcpy(&sn_[head_ * obs_dim_], s_next.data(),
              obs_dim_ * sizeof(double));
  r_[head_] = r;
  logb_[head_] = log_b;
  done_[head_] = done ? 1 : 0;
  head_ = (head_ + 1) % capacity_;
  if (count_ < capacity_) ++count_;
}

void ReplayBuffer::push(const Transition& t) {
  push(t.s, t.a, t.s_next, t.r, t.done, t.log_b);
}

std::size_t ReplayBuffer::slot(std::size_t ordered_index) const {
  // Oldest retained element sits at head_ when full, else at 0.
  const std::size_t base = (count_ == capacity_) ? head_ : 0;
  return (base + ordered_index) % capacity_;
}

void ReplayBuffer::sample_uniform(std::size_t n, Rng& rng, Batch& out) const {
  if (count_ == 0)
    throw std::invalid_argument("replay sample: buffer is empty");
  out.s.resize(n, obs_dim_);
  out.a.resize(n, act_dim_);
  out.s_next.resize(n, obs_dim_);
  out.r.resize(n);
  out.log_b.resize(n);
  out.done.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = slot(rng.uniform_index(count_));
    std::memcpy(out.s.row(i), &s_[k * obs_dim_], obs_dim_ * sizeof(double));
    std::memcpy(out.a.row(i), &a_[k * act_dim_], act_dim_ * sizeof(double));
    std::memcpy(out.s_next.row(i), &sn_[k * obs_dim_],
                obs_dim_ * sizeof(double));
    out.r[i] = r_[k];
    out.log_b[i] = logb_[k];
    out.done[i] = done_[k];
  }
}

Transition ReplayBuffer::transition(std::size_t i) const {
  if (i >= count_) throw std::out_of_range("replay: transition index");
  const std::size_t k = slot(i);
  Transition t;
  t.s.assign(&s_[k * obs_dim_], &s_[k * obs_dim_] + obs_dim_);
  t.a.assign(&a_[k * act_dim_], &a_[k * act_dim_] + act_dim_);
  t.s_next.assign(&sn_[k * obs_dim_], &sn_[k * obs_dim_] + obs_dim_);
  t.r = r_[k];
  t.done = done_[k] != 0;
  t.log_b = logb_[k];
  return t;
}

void ReplayBuffer::dump(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("replay dump: cannot open " + path);
  const char magic[8] = {'E', 'R', 'C', 'B', 'U', 'F', 'F', '1'};
  os.write(magic, 8);
  auto put_u64 = [&os](std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
  };
  put_u64(1);  // version
  put_u64(obs_dim_);
  put_u64(act_dim_);
  put_u64(count_);
  auto put_f64 = [&](double d) {
    std::uint64_t u;
    std::memcpy(&u, &d, 8);
    put_u64(u);
  };
  for (std::size_t i = 0; i < count_; ++i) {
    const Transition t = transition(i);
    for (double v : t.s) put_f64(v);
    for (double v : t.a) put_f64(v);
    for (double v : t.s_next) put_f64(v);
    put_f64(t.r);
    put_u64(t.done ? 1 : 0);
    put_f64(t.log_b);
  }
  if (!os) throw std::runtime_error("replay dump: write failed");
}

std::size_t replay_schedule(std::size_t count, std::size_t batch_size) {
  if (count < batch_size) return 0;
  const double minibatches =
      static_cast<double>(count) / 2.0 / static_cast<double>(batch_size);
  const auto rounded = static_cast<std::size_t>(std::llround(minibatches));
  return rounded < 1 ? 1 : rounded;
}

}  // namespace erc
