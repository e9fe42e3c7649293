#pragma once

// Every physical constant used by the native environments lives here,
// so `envs describe` and the docs always agree with the dynamics.

namespace erc::physics {

// --- pendulum: torque swing-up of a single rod, theta = 0 upright ----
namespace pendulum {
inline constexpr double gravity = 10.0;
inline constexpr double mass = 1.0;      // rod mass, inertia m*l^2/3
inline constexpr double length = 1.0;
inline constexpr double dt = 0.05;
inline constexpr int substeps = 1;
inline constexpr double max_torque = 2.0;
inline constexpr double max_speed = 8.0;  // state clamp on theta_dot
inline constexpr int max_steps = 200;
// reset: theta = pi + U(-pi, pi) wrapped, theta_dot = U(-1, 1)
inline constexpr double reset_theta_noise = 3.14159265358979323846;
inline constexpr double reset_speed_noise = 1.0;
}  // namespace pendulum

// --- double-pendulum: cart with two passive links, balance upright ---
// Links are massless rods with point masses at the tips; theta is
// measured from vertical up; the action is a horizontal base force.
namespace double_pendulum {
inline constexpr double gravity = 9.81;
inline constexpr double cart_mass = 1.0;
// short uneven links: the second one flutters fast, so surviving the
// full horizon needs a genuinely shaped controller
inline constexpr double link_mass_1 = 0.08;
inline constexpr double link_mass_2 = 0.05;
inline constexpr double link_len_1 = 0.4;
inline constexpr double link_len_2 = 0.25;
inline constexpr double force_scale = 8.0;  // newtons per unit action
inline constexpr double cart_damping = 0.05;
inline constexpr double joint_damping = 0.002;
inline constexpr double dt = 0.02;
inline constexpr int substeps = 2;
inline constexpr double tilt_limit = 0.4;  // rad, either link, terminal
inline constexpr double cart_limit = 2.4;  // |x| beyond this is terminal
inline constexpr double max_cart_speed = 10.0;
inline constexpr double max_joint_speed = 20.0;
inline constexpr int max_steps = 500;
inline constexpr double action_cost = 0.01;  // reward = 1 - cost * a^2
// reset: off-center cart plus a modest lean, so staying alive requires
// recovering, not just holding still at the fixed point
inline constexpr double reset_cart_noise = 0.25;   // x ~ U(-, +)
inline constexpr double reset_tilt_noise = 0.08;   // th1, th2
inline constexpr double reset_speed_noise = 0.1;   // all velocities
}  // namespace double_pendulum

// --- reacher2d: planar two-link arm, torque control, no gravity ------
namespace reacher {
inline constexpr double link_mass_1 = 0.05;  // point mass at link tip
inline constexpr double link_mass_2 = 0.05;
inline constexpr double link_len_1 = 0.1;
inline constexpr double link_len_2 = 0.1;
inline constexpr double torque_scale = 0.01;  // N*m per unit action
inline constexpr double joint_damping = 0.001;
inline constexpr double dt = 0.05;
inline constexpr int substeps = 2;
inline constexpr double max_joint_speed = 10.0;
inline constexpr int max_steps = 100;
inline constexpr double action_cost = 0.01;
// reset: angles U(-pi, pi), speeds U(-0.1, 0.1);
// target radius U(r_min, r_max), angle U(-pi, pi)
inline constexpr double reset_speed_noise = 0.1;
inline constexpr double target_radius_min = 0.05;
inline constexpr double target_radius_max = 0.18;
}  // namespace reacher

}  // namespace erc::physics
