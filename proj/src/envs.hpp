#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace erc {

enum class EnvId { pendulum, double_pendulum, reacher2d };

struct EnvSpec {
  EnvId id = EnvId::pendulum;
  std::string name;
  int obs_dim = 0;
  int act_dim = 0;
  std::vector<double> act_low;
  std::vector<double> act_high;
  int max_steps = 0;
  double dt = 0.0;
};

struct StepResult {
  double reward = 0.0;
  bool terminal = false;   // genuine terminal state
  bool truncated = false;  // step limit reached
  bool fault = false;      // non-finite state, episode aborted
};

class Env {
 public:
  virtual ~Env() = default;
  const EnvSpec& spec() const { return spec_; }
  int steps_taken() const { return step_count_; }

  // Deterministic in seed; writes the initial observation.
  virtual void reset(std::uint64_t seed, std::vector<double>& obs) = 0;
  // Clips the action to the documented bounds, integrates, writes obs.
  virtual StepResult step(std::span<const double> action,
                          std::vector<double>& obs) = 0;
  // Physical state vector, exposed for tests and diagnostics.
  virtual std::vector<double> physical_state() const = 0;
  virtual void set_physical_state(std::span<const double> state) = 0;
  // Human-readable spec plus the physics constants.
  virtual std::string describe() const = 0;

 protected:
  EnvSpec spec_;
  int step_count_ = 0;
};

std::unique_ptr<Env> make_env(const std::string& name);
std::unique_ptr<Env> make_env(EnvId id);
const std::vector<std::string>& env_names();
EnvId env_id_from_name(const std::string& name);

// Raw acceleration models, exposed so tests can integrate them with an
// independent scheme and check energy bookkeeping.
// q = [x, th1, th2], qd likewise; returns qdd.
void double_pendulum_accel(const double* q, const double* qd, double force,
                           bool with_damping, double* qdd);
// q = [th1, th2] absolute link angles.
void reacher_accel(const double* q, const double* qd, const double* torque,
                   bool with_damping, double* qdd);

}  // namespace erc
