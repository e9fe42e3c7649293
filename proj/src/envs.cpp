#include "envs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "linalg.hpp"
#include "physics.hpp"
#include "rng.hpp"

namespace erc {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double th) {
  th = std::fmod(th + kPi, 2.0 * kPi);
  if (th < 0) th += 2.0 * kPi;
  return th - kPi;
}

double clip(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// q_dd = M^{-1} rhs for a symmetric 2x2 system.
void solve2(double m11, double m12, double m22, const double* rhs,
            double* out) {
  const double det = m11 * m22 - m12 * m12;
  out[0] = (m22 * rhs[0] - m12 * rhs[1]) / det;
  out[1] = (m11 * rhs[1] - m12 * rhs[0]) / det;
}

// Symmetric 3x3 solve via cofactors.
void solve3(const double m[3][3], const double* rhs, double* out) {
  const double a = m[0][0], b = m[0][1], c = m[0][2];
  const double d = m[1][1], e = m[1][2], f = m[2][2];
  const double A = d * f - e * e;
  const double B = c * e - b * f;
  const double C = b * e - c * d;
  const double det = a * A + b * B + c * C;
  const double D = a * f - c * c;
  const double E = b * c - a * e;
  const double F = a * d - b * b;
  out[0] = (A * rhs[0] + B * rhs[1] + C * rhs[2]) / det;
  out[1] = (B * rhs[0] + D * rhs[1] + E * rhs[2]) / det;
  out[2] = (C * rhs[0] + E * rhs[1] + F * rhs[2]) / det;
}

void check_action(std::span<const double> action, int act_dim) {
  if (static_cast<int>(action.size()) != act_dim)
    throw std::invalid_argument("env step: action dim mismatch");
  if (!all_finite(action.data(), action.size()))
    throw std::invalid_argument("env step: non-finite action");
}

}  // namespace

void double_pendulum_accel(const double* q, const double* qd, double force,
                           bool with_damping, double* qdd) {
  namespace P = physics::double_pendulum;
  const double m0 = P::cart_mass, m1 = P::link_mass_1, m2 = P::link_mass_2;
  const double l1 = P::link_len_1, l2 = P::link_len_2, g = P::gravity;
  const double th1 = q[1], th2 = q[2];
  const double xd = qd[0], w1 = qd[1], w2 = qd[2];
  const double s1 = std::sin(th1), c1 = std::cos(th1);
  const double s2 = std::sin(th2), c2 = std::cos(th2);
  const double s12 = std::sin(th1 - th2), c12 = std::cos(th1 - th2);

  double m[3][3];
  m[0][0] = m0 + m1 + m2;
  m[0][1] = m[1][0] = (m1 + m2) * l1 * c1;
  m[0][2] = m[2][0] = m2 * l2 * c2;
  m[1][1] = (m1 + m2) * l1 * l1;
  m[1][2] = m[2][1] = m2 * l1 * l2 * c12;
  m[2][2] = m2 * l2 * l2;

  double rhs[3];
  rhs[0] = force + (m1 + m2) * l1 * s1 * w1 * w1 + m2 * l2 * s2 * w2 * w2;
  rhs[1] = -m2 * l1 * l2 * s12 * w2 * w2 + g * (m1 + m2) * l1 * s1;
  rhs[2] = m2 * l1 * l2 * s12 * w1 * w1 + g * m2 * l2 * s2;
  if (with_damping) {
    rhs[0] -= P::cart_damping * xd;
    rhs[1] -= P::joint_damping * w1;
    rhs[2] -= P::joint_damping * w2;
  }
  solve3(m, rhs, qdd);
}

void reacher_accel(const double* q, const double* qd, const double* torque,
                   bool with_damping, double* qdd) {
  namespace P = physics::reacher;
  const double m1 = P::link_mass_1, m2 = P::link_mass_2;
  const double l1 = P::link_len_1, l2 = P::link_len_2;
  const double w1 = qd[0], w2 = qd[1];
  const double s12 = std::sin(q[0] - q[1]), c12 = std::cos(q[0] - q[1]);

  const double m11 = (m1 + m2) * l1 * l1;
  const double m12 = m2 * l1 * l2 * c12;
  const double m22 = m2 * l2 * l2;
  double rhs[2];
  rhs[0] = -m2 * l1 * l2 * s12 * w2 * w2 + torque[0];
  rhs[1] = m2 * l1 * l2 * s12 * w1 * w1 + torque[1];
  if (with_damping) {
    rhs[0] -= P::joint_damping * w1;
    rhs[1] -= P::joint_damping * w2;
  }
  solve2(m11, m12, m22, rhs, qdd);
}

namespace {

// --- pendulum -------------------------------------------------------

class PendulumEnv final : public Env {
 public:
  PendulumEnv() {
    namespace P = physics::pendulum;
    spec_.id = EnvId::pendulum;
    spec_.name = "pendulum";
    spec_.obs_dim = 3;
    spec_.act_dim = 1;
    spec_.act_low = {-P::max_torque};
    spec_.act_high = {P::max_torque};
    spec_.max_steps = P::max_steps;
    spec_.dt = P::dt;
  }

  void reset(std::uint64_t seed, std::vector<double>& obs) override {
    namespace P = physics::pendulum;
    Rng rng(seed, 0);
    theta_ = wrap_angle(kPi + rng.uniform(-P::reset_theta_noise,
                                          P::reset_theta_noise));
    theta_dot_ = rng.uniform(-P::reset_speed_noise, P::reset_speed_noise);
    step_count_ = 0;
    write_obs(obs);
  }

  StepResult step(std::span<const double> action,
                  std::vector<double>& obs) override {
    namespace P = physics::pendulum;
    check_action(action, 1);
    const double u = clip(action[0], -P::max_torque, P::max_torque);

    StepResult res;
    const double th = wrap_angle(theta_);
    res.reward = -(th * th + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u);

    const double accel = 1.5 * P::gravity / P::length * std::sin(theta_) +
                         3.0 / (P::mass * P::length * P::length) * u;
    theta_dot_ = clip(theta_dot_ + P::dt * accel, -P::max_speed, P::max_speed);
    theta_ = wrap_angle(theta_ + P::dt * theta_dot_);

    ++step_count_;
    if (!std::isfinite(theta_) || !std::isfinite(theta_dot_)) {
      res.fault = true;
      return res;
    }
    res.truncated = step_count_ >= spec_.max_steps;
    write_obs(obs);
    return res;
  }

  std::vector<double> physical_state() const override {
    return {theta_, theta_dot_};
  }

  void set_physical_state(std::span<const double> st) override {
    theta_ = st[0];
    theta_dot_ = st[1];
  }

  std::string describe() const override;

 private:
  void write_obs(std::vector<double>& obs) const {
    obs.assign({std::cos(theta_), std::sin(theta_), theta_dot_});
  }
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
};

std::string PendulumEnv::describe() const {
  namespace P = physics::pendulum;
  std::ostringstream os;
  os << "pendulum: torque swing-up of a single rod (theta = 0 upright)\n"
     << "  obs  = [cos(theta), sin(theta), theta_dot]  (dim 3)\n"
     << "  act  = torque in [" << -P::max_torque << ", " << P::max_torque
     << "]  (dim 1)\n"
     << "  reward = -(theta^2 + 0.1 theta_dot^2 + 0.001 u^2)\n"
     << "  max_steps = " << P::max_steps << ", no terminal state\n"
     << "  dt = " << P::dt << " (substeps " << P::substeps << ")\n"
     << "  gravity = " << P::gravity << ", mass = " << P::mass
     << ", length = " << P::length << "\n"
     << "  speed clamp |theta_dot| <= " << P::max_speed << "\n"
     << "  reset: theta = pi + U(-pi, pi) wrapped, theta_dot = U(-"
     << P::reset_speed_noise << ", " << P::reset_speed_noise << ")\n";
  return os.str();
}

// --- double pendulum on a cart ---------------------------------------

class DoublePendulumEnv final : public Env {
 public:
  DoublePendulumEnv() {
    namespace P = physics::double_pendulum;
    spec_.id = EnvId::double_pendulum;
    spec_.name = "double-pendulum";
    spec_.obs_dim = 8;
    spec_.act_dim = 1;
    spec_.act_low = {-1.0};
    spec_.act_high = {1.0};
    spec_.max_steps = P::max_steps;
    spec_.dt = P::dt;
  }

  void reset(std::uint64_t seed, std::vector<double>& obs) override {
    namespace P = physics::double_pendulum;
    Rng rng(seed, 0);
    q_[0] = rng.uniform(-P::reset_cart_noise, P::reset_cart_noise);
    q_[1] = rng.uniform(-P::reset_tilt_noise, P::reset_tilt_noise);
    q_[2] = rng.uniform(-P::reset_tilt_noise, P::reset_tilt_noise);
    for (int i = 0; i < 3; ++i)
      qd_[i] = rng.uniform(-P::reset_speed_noise, P::reset_speed_noise);
    step_count_ = 0;
    write_obs(obs);
  }

  StepResult step(std::span<const double> action,
                  std::vector<double>& obs) override {
    namespace P = physics::double_pendulum;
    check_action(action, 1);
    const double a = clip(action[0], -1.0, 1.0);
    const double force = a * P::force_scale;

    StepResult res;
    res.reward = 1.0 - P::action_cost * a * a;

    const double h = P::dt / P::substeps;
    double qdd[3];
    for (int s = 0; s < P::substeps; ++s) {
      double_pendulum_accel(q_, qd_, force, true, qdd);
      for (int i = 0; i < 3; ++i) qd_[i] += h * qdd[i];
      qd_[0] = clip(qd_[0], -P::max_cart_speed, P::max_cart_speed);
      qd_[1] = clip(qd_[1], -P::max_joint_speed, P::max_joint_speed);
      qd_[2] = clip(qd_[2], -P::max_joint_speed, P::max_joint_speed);
      for (int i = 0; i < 3; ++i) q_[i] += h * qd_[i];
    }

    ++step_count_;
    if (!all_finite(q_, 3) || !all_finite(qd_, 3)) {
      res.fault = true;
      return res;
    }
    res.terminal = std::fabs(q_[1]) > P::tilt_limit ||
                   std::fabs(q_[2]) > P::tilt_limit ||
                   std::fabs(q_[0]) > P::cart_limit;
    res.truncated = !res.terminal && step_count_ >= spec_.max_steps;
    write_obs(obs);
    return res;
  }

  std::vector<double> physical_state() const override {
    return {q_[0], q_[1], q_[2], qd_[0], qd_[1], qd_[2]};
  }

  void set_physical_state(std::span<const double> st) override {
    for (int i = 0; i < 3; ++i) q_[i] = st[i];
    for (int i = 0; i < 3; ++i) qd_[i] = st[3 + i];
  }

  std::string describe() const override;

 private:
  void write_obs(std::vector<double>& obs) const {
    obs.assign({q_[0], qd_[0], std::sin(q_[1]), std::cos(q_[1]), qd_[1],
                std::sin(q_[2]), std::cos(q_[2]), qd_[2]});
  }
  double q_[3] = {0, 0, 0};   // x, th1, th2 (theta from vertical up)
  double qd_[3] = {0, 0, 0};
};

std::string DoublePendulumEnv::describe() const {
  namespace P = physics::double_pendulum;
  std::ostringstream os;
  os << "double-pendulum: cart with two passive links, balance upright\n"
     << "  obs  = [x, x_dot, sin(th1), cos(th1), th1_dot, sin(th2), cos(th2), "
        "th2_dot]  (dim 8)\n"
     << "  act  = base force in [-1, 1], scaled by " << P::force_scale
     << " N  (dim 1)\n"
     << "  reward = 1 - " << P::action_cost << " a^2 per step alive\n"
     << "  terminal: |th1| or |th2| > " << P::tilt_limit << " rad, or |x| > "
     << P::cart_limit << "\n"
     << "  max_steps = " << P::max_steps << ", dt = " << P::dt
     << " (substeps " << P::substeps << ")\n"
     << "  cart mass = " << P::cart_mass << ", link masses = "
     << P::link_mass_1 << "/" << P::link_mass_2 << " (point masses at tips)\n"
     << "  link lengths = " << P::link_len_1 << "/" << P::link_len_2
     << ", gravity = " << P::gravity << "\n"
     << "  damping: cart " << P::cart_damping << ", joints "
     << P::joint_damping << "\n"
     << "  speed clamps: |x_dot| <= " << P::max_cart_speed
     << ", |th_dot| <= " << P::max_joint_speed << "\n"
     << "  reset: x ~ U(+-" << P::reset_cart_noise << "), tilts ~ U(+-"
     << P::reset_tilt_noise << "), velocities ~ U(+-"
     << P::reset_speed_noise << ")\n";
  return os.str();
}

// --- reacher2d --------------------------------------------------------

class ReacherEnv final : public Env {
 public:
  ReacherEnv() {
    namespace P = physics::reacher;
    spec_.id = EnvId::reacher2d;
    spec_.name = "reacher2d";
    spec_.obs_dim = 10;
    spec_.act_dim = 2;
    spec_.act_low = {-1.0, -1.0};
    spec_.act_high = {1.0, 1.0};
    spec_.max_steps = P::max_steps;
    spec_.dt = P::dt;
  }

  void reset(std::uint64_t seed, std::vector<double>& obs) override {
    namespace P = physics::reacher;
    Rng rng(seed, 0);
    q_[0] = rng.uniform(-kPi, kPi);
    q_[1] = rng.uniform(-kPi, kPi);
    qd_[0] = rng.uniform(-P::reset_speed_noise, P::reset_speed_noise);
    qd_[1] = rng.uniform(-P::reset_speed_noise, P::reset_speed_noise);
    const double ang = rng.uniform(-kPi, kPi);
    const double rad = rng.uniform(P::target_radius_min, P::target_radius_max);
    target_[0] = rad * std::cos(ang);
    target_[1] = rad * std::sin(ang);
    step_count_ = 0;
    write_obs(obs);
  }

  StepResult step(std::span<const double> action,
                  std::vector<double>& obs) override {
    namespace P = physics::reacher;
    check_action(action, 2);
    double a[2] = {clip(action[0], -1, 1), clip(action[1], -1, 1)};
    double torque[2] = {a[0] * P::torque_scale, a[1] * P::torque_scale};

    StepResult res;
    double fx, fy;
    fingertip(fx, fy);
    const double dx = fx - target_[0], dy = fy - target_[1];
    res.reward = -std::sqrt(dx * dx + dy * dy) -
                 P::action_cost * (a[0] * a[0] + a[1] * a[1]);

    const double h = P::dt / P::substeps;
    double qdd[2];
    for (int s = 0; s < P::substeps; ++s) {
      reacher_accel(q_, qd_, torque, true, qdd);
      qd_[0] = clip(qd_[0] + h * qdd[0], -P::max_joint_speed, P::max_joint_speed);
      qd_[1] = clip(qd_[1] + h * qdd[1], -P::max_joint_speed, P::max_joint_speed);
      q_[0] = wrap_angle(q_[0] + h * qd_[0]);
      q_[1] = wrap_angle(q_[1] + h * qd_[1]);
    }

    ++step_count_;
    if (!all_finite(q_, 2) || !all_finite(qd_, 2)) {
      res.fault = true;
      return res;
    }
    res.truncated = step_count_ >= spec_.max_steps;
    write_obs(obs);
    return res;
  }

  std::vector<double> physical_state() const override {
    return {q_[0], q_[1], qd_[0], qd_[1], target_[0], target_[1]};
  }

  void set_physical_state(std::span<const double> st) override {
    q_[0] = st[0];
    q_[1] = st[1];
    qd_[0] = st[2];
    qd_[1] = st[3];
    target_[0] = st[4];
    target_[1] = st[5];
  }

  std::string describe() const override;

 private:
  void fingertip(double& fx, double& fy) const {
    namespace P = physics::reacher;
    fx = P::link_len_1 * std::cos(q_[0]) + P::link_len_2 * std::cos(q_[1]);
    fy = P::link_len_1 * std::sin(q_[0]) + P::link_len_2 * std::sin(q_[1]);
  }
  void write_obs(std::vector<double>& obs) const {
    double fx, fy;
    fingertip(fx, fy);
    obs.assign({std::sin(q_[0]), std::cos(q_[0]), std::sin(q_[1]),
                std::cos(q_[1]), qd_[0], qd_[1], target_[0], target_[1],
                fx - target_[0], fy - target_[1]});
  }
  double q_[2] = {0, 0};   // absolute link angles
  double qd_[2] = {0, 0};
  double target_[2] = {0, 0};
};

std::string ReacherEnv::describe() const {
  namespace P = physics::reacher;
  std::ostringstream os;
  os << "reacher2d: planar two-link arm reaching a random target\n"
     << "  obs  = [sin/cos th1, sin/cos th2, th1_dot, th2_dot, target xy, "
        "fingertip-minus-target xy]  (dim 10)\n"
     << "  act  = joint torques in [-1, 1]^2, scaled by " << P::torque_scale
     << " N*m\n"
     << "  reward = -|fingertip - target| - " << P::action_cost << " |a|^2\n"
     << "  max_steps = " << P::max_steps << ", no terminal state\n"
     << "  dt = " << P::dt << " (substeps " << P::substeps << ")\n"
     << "  link masses = " << P::link_mass_1 << "/" << P::link_mass_2
     << " (point masses), lengths = " << P::link_len_1 << "/"
     << P::link_len_2 << ", no gravity\n"
     << "  joint damping = " << P::joint_damping << ", speed clamp |th_dot| <= "
     << P::max_joint_speed << "\n"
     << "  reset: angles U(-pi, pi), speeds U(-" << P::reset_speed_noise
     << ", " << P::reset_speed_noise << "); target radius U("
     << P::target_radius_min << ", " << P::target_radius_max << ")\n";
  return os.str();
}

}  // namespace

const std::vector<std::string>& env_names() {
  static const std::vector<std::string> names{"pendulum", "double-pendulum",
                                              "reacher2d"};
  return names;
}

EnvId env_id_from_name(const std::string& name) {
  if (name == "pendulum") return EnvId::pendulum;
  if (name == "double-pendulum") return EnvId::double_pendulum;
  if (name == "reacher2d") return EnvId::reacher2d;
  throw std::invalid_argument("unknown environment: " + name);
}

std::unique_ptr<Env> make_env(EnvId id) {
  switch (id) {
    case EnvId::pendulum:
      return std::make_unique<PendulumEnv>();
    case EnvId::double_pendulum:
      return std::make_unique<DoublePendulumEnv>();
    case EnvId::reacher2d:
      return std::make_unique<ReacherEnv>();
  }
  throw std::invalid_argument("unknown environment id");
}

std::unique_ptr<Env> make_env(const std::string& name) {
  return make_env(env_id_from_name(name));
}

}  // namespace erc
