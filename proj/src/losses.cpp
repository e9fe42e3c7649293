#include "losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tricks.hpp"

namespace erc {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;
constexpr double kLogRatioCap = 30.0;  // exp overflow guard for rho

double squash_nudge(double t) {
  if (t >= 1.0) return std::nextafter(1.0, 0.0);
  if (t <= -1.0) return std::nextafter(-1.0, 0.0);
  return t;
}
}  // namespace

double td_error(double r, bool done, double v_s, double vbar_next,
                double gamma) {
  return r + gamma * (done ? 0.0 : 1.0) * vbar_next - v_s;
}

double ppo_clip_loss_term(double log_pi, double log_b, double adv, double eps,
                          double* dlogpi) {
  const double lr = std::clamp(log_pi - log_b, -kLogRatioCap, kLogRatioCap);
  const double rho = std::exp(lr);
  const double clipped = std::clamp(rho, 1.0 - eps, 1.0 + eps);
  const double raw_val = rho * adv;
  const double clip_val = clipped * adv;
  if (raw_val <= clip_val) {
    if (dlogpi) *dlogpi = -rho * adv;
    return -raw_val;
  }
  if (dlogpi) *dlogpi = 0.0;  // clipped branch: constant in log_pi
  return -clip_val;
}

void policy_eval(const Mlp& pi_mlp, int act_dim, const ParameterSet& params,
                 const Matrix& states, const Matrix& actions,
                 PolicyBatchEval& out) {
  const std::size_t n = states.rows;
  if (actions.rows != n || actions.cols != static_cast<std::size_t>(act_dim))
    throw std::invalid_argument("policy_eval: action shape mismatch");
  const Matrix& head = pi_mlp.forward(params, states, out.cache);
  if (head.cols != static_cast<std::size_t>(2 * act_dim))
    throw std::invalid_argument("policy_eval: head width != 2 * act_dim");

  out.z.resize(n, act_dim);
  out.log_std.resize(n, act_dim);
  out.sigma.resize(n, act_dim);
  out.log_pi.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* h = head.row(i);
    const double* a = actions.row(i);
    double lp = 0.0;
    for (int j = 0; j < act_dim; ++j) {
      const double ls = std::clamp(h[act_dim + j], kLogStdMin, kLogStdMax);
      const double sg = std::exp(ls);
      const double z = (a[j] - h[j]) / sg;
      out.log_std.at(i, j) = ls;
      out.sigma.at(i, j) = sg;
      out.z.at(i, j) = z;
      lp += -0.5 * kLogTwoPi - ls - 0.5 * z * z;
    }
    out.log_pi[i] = lp;
  }
}

void policy_backprop(const Mlp& pi_mlp, int act_dim,
                     const ParameterSet& params, const PolicyBatchEval& eval,
                     std::span<const double> dlogpi,
                     std::vector<double>& grads) {
  const std::size_t n = eval.z.rows;
  const Matrix& head = eval.cache.acts.back();
  Matrix dhead(n, static_cast<std::size_t>(2 * act_dim));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = dlogpi[i];
    if (g == 0.0) continue;
    double* dh = dhead.row(i);
    const double* h = head.row(i);
    for (int j = 0; j < act_dim; ++j) {
      const double z = eval.z.at(i, j);
      dh[j] = g * z / eval.sigma.at(i, j);
      dh[act_dim + j] = g * (z * z - 1.0) * log_std_gate(h[act_dim + j]);
    }
  }
  pi_mlp.backward(params, eval.cache, dhead, &grads);
}

ValueLossResult a2c_value_loss_batch(const Mlp& v_mlp, const ParameterSet& v,
                                     const ParameterSet& vbar,
                                     const Batch& batch, double gamma,
                                     std::span<const std::uint8_t> mask,
                                     std::vector<double>* v_grads,
                                     std::vector<double>* deltas_out) {
  const std::size_t n = batch.size();
  MlpCache vc, vbc;
  const Matrix& vs = v_mlp.forward(v, batch.s, vc);
  const Matrix& vn = v_mlp.forward(vbar, batch.s_next, vbc);

  int used = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (mask.empty() || mask[i]) ++used;

  ValueLossResult res;
  res.used = used;
  if (deltas_out) deltas_out->assign(n, 0.0);
  Matrix dv(n, 1);
  // Excluded rows contribute zero to the batch expectation; the
  // denominator stays the batch size, so scarce surviving data shrinks
  // the step instead of concentrating full weight on a few samples.
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double delta = td_error(batch.r[i], batch.done[i] != 0, vs.at(i, 0),
                                  vn.at(i, 0), gamma);
    if (deltas_out) (*deltas_out)[i] = delta;
    const bool keep = mask.empty() || mask[i];
    if (!keep) continue;
    res.loss += 0.5 * delta * delta * inv;
    dv.at(i, 0) = -delta * inv;  // d(0.5 delta^2)/d v(s)
  }
  if (v_grads && used > 0) v_mlp.backward(v, vc, dv, v_grads);
  return res;
}

PolicyLossResult a2c_policy_loss_batch(
    const Mlp& pi_mlp, int act_dim, const ParameterSet& pi_params,
    const Batch& batch, const PolicyBatchEval& eval,
    std::span<const double> deltas_hat, std::span<const std::uint8_t> mask,
    std::span<const double> omega, std::span<const double> disc_vals,
    bool ppo_clip, double clip_eps, std::vector<double>* pi_grads) {
  const std::size_t n = batch.size();
  PolicyLossResult res;
  for (std::size_t i = 0; i < n; ++i)
    if (mask.empty() || mask[i]) ++res.kept;

  std::vector<double> dlogpi(n, 0.0);
  // Mined-out rows contribute zero while the denominator stays the
  // batch size: the policy-gradient term fades as survivors get scarce
  // and the counteraction keeps its full weight.
  const double invk = 1.0 / static_cast<double>(n);
  const double invn = 1.0 / static_cast<double>(n);
  const bool counter = !omega.empty() && !disc_vals.empty();

  for (std::size_t i = 0; i < n; ++i) {
    // entropy diagnostic over the whole batch
    for (int j = 0; j < act_dim; ++j)
      res.entropy += (0.5 * (1.0 + kLogTwoPi) + eval.log_std.at(i, j)) * invn;

    const bool keep = mask.empty() || mask[i];
    if (keep && res.kept > 0) {
      if (ppo_clip) {
        double g = 0.0;
        const double term = ppo_clip_loss_term(eval.log_pi[i], batch.log_b[i],
                                               deltas_hat[i], clip_eps, &g);
        res.pg += term * invk;
        dlogpi[i] += g * invk;
      } else {
        res.pg += -deltas_hat[i] * eval.log_pi[i] * invk;
        dlogpi[i] += -deltas_hat[i] * invk;
      }
    }
    if (counter && omega[i] > 0.0) {
      const double d = density_ratio(eval.log_pi[i], batch.log_b[i]);
      const double dd = clamp_disc(disc_vals[i]);
      const double logit = std::log(dd) - std::log(1.0 - dd);
      res.counteraction += omega[i] * d * logit * invn;
      dlogpi[i] += omega[i] * logit *
                   density_ratio_grad(eval.log_pi[i], batch.log_b[i]) * invn;
    }
  }
  res.total = res.pg + res.counteraction;
  if (pi_grads)
    policy_backprop(pi_mlp, act_dim, pi_params, eval, dlogpi, *pi_grads);
  return res;
}

void disc_forward(const Mlp& d_mlp, const ParameterSet& d_params,
                  const Matrix& states, std::vector<double>& values_out) {
  MlpCache c;
  const Matrix& out = d_mlp.forward(d_params, states, c);
  values_out.resize(states.rows);
  for (std::size_t i = 0; i < states.rows; ++i)
    values_out[i] = clamp_disc(out.at(i, 0));
}

double disc_loss_batch(const Mlp& d_mlp, const ParameterSet& d_params,
                       const Matrix& states, std::span<const double> d_hat,
                       std::vector<double>* d_grads) {
  const std::size_t n = states.rows;
  MlpCache c;
  const Matrix& out = d_mlp.forward(d_params, states, c);
  double loss = 0.0;
  Matrix dz(n, 1);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double raw = out.at(i, 0);
    const double D = clamp_disc(raw);
    loss += discriminator_loss(D, d_hat[i]) * inv;
    // zero slope where the output clamp is active
    const double gate = (raw > kDiscClamp && raw < 1.0 - kDiscClamp) ? 1.0 : 0.0;
    dz.at(i, 0) = gate * (-d_hat[i] / D + (1.0 - d_hat[i]) / (1.0 - D)) * inv;
  }
  if (d_grads) d_mlp.backward(d_params, c, dz, d_grads);
  return loss;
}

namespace {

// Squashed resample at given states: fills actions (tanh), log_pi, and
// optionally the policy eval pieces needed for backprop.
struct SquashedSample {
  MlpCache cache;
  Matrix u;        // pre-squash
  Matrix t;        // tanh(u), nudged strictly inside (-1, 1)
  Matrix sigma;    // exp(clamped log_std)
  std::vector<double> log_pi;
};

void squashed_resample(const Mlp& pi_mlp, int act_dim,
                       const ParameterSet& pi_params, const Matrix& states,
                       const Matrix& z, SquashedSample& out) {
  const std::size_t n = states.rows;
  const Matrix& head = pi_mlp.forward(pi_params, states, out.cache);
  out.u.resize(n, act_dim);
  out.t.resize(n, act_dim);
  out.sigma.resize(n, act_dim);
  out.log_pi.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* h = head.row(i);
    double lp = 0.0;
    for (int j = 0; j < act_dim; ++j) {
      const double ls = std::clamp(h[act_dim + j], kLogStdMin, kLogStdMax);
      const double sg = std::exp(ls);
      const double u = h[j] + sg * z.at(i, j);
      const double t = squash_nudge(std::tanh(u));
      out.u.at(i, j) = u;
      out.t.at(i, j) = t;
      out.sigma.at(i, j) = sg;
      lp += -0.5 * kLogTwoPi - ls - 0.5 * z.at(i, j) * z.at(i, j);
      lp -= std::log(1.0 - t * t + kSquashEps);
    }
    out.log_pi[i] = lp;
  }
}

Matrix concat_sa(const Matrix& s, const Matrix& a) {
  Matrix out(s.rows, s.cols + a.cols);
  for (std::size_t i = 0; i < s.rows; ++i) {
    double* row = out.row(i);
    const double* sr = s.row(i);
    const double* ar = a.row(i);
    for (std::size_t j = 0; j < s.cols; ++j) row[j] = sr[j];
    for (std::size_t j = 0; j < a.cols; ++j) row[s.cols + j] = ar[j];
  }
  return out;
}

}  // namespace

SacCriticResult sac_critic_loss_batch(
    const Mlp& pi_mlp, int act_dim, const ParameterSet& pi_params,
    const Mlp& q_mlp, const ParameterSet& q1, const ParameterSet& q2,
    const ParameterSet& qbar1, const ParameterSet& qbar2, const Batch& batch,
    const Matrix& z_next, double alpha, double gamma,
    std::vector<double>* q1_grads, std::vector<double>* q2_grads) {
  const std::size_t n = batch.size();
  SacCriticResult res;

  SquashedSample next;
  squashed_resample(pi_mlp, act_dim, pi_params, batch.s_next, z_next, next);
  const Matrix qin_next = concat_sa(batch.s_next, next.t);

  MlpCache cb1, cb2;
  const Matrix& qb1 = q_mlp.forward(qbar1, qin_next, cb1);
  const Matrix& qb2 = q_mlp.forward(qbar2, qin_next, cb2);

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double qmin = std::min(qb1.at(i, 0), qb2.at(i, 0));
    const double soft = qmin - alpha * next.log_pi[i];
    y[i] = batch.r[i] + gamma * (batch.done[i] ? 0.0 : 1.0) * soft;
    res.mean_log_pi_next += next.log_pi[i] / static_cast<double>(n);
  }

  const Matrix qin = concat_sa(batch.s, batch.a);
  MlpCache c1, c2;
  const Matrix& o1 = q_mlp.forward(q1, qin, c1);
  const Matrix& o2 = q_mlp.forward(q2, qin, c2);
  Matrix d1(n, 1), d2(n, 1);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e1 = o1.at(i, 0) - y[i];
    const double e2 = o2.at(i, 0) - y[i];
    res.loss += 0.5 * (e1 * e1 + e2 * e2) * inv;
    d1.at(i, 0) = e1 * inv;
    d2.at(i, 0) = e2 * inv;
  }
  if (q1_grads) q_mlp.backward(q1, c1, d1, q1_grads);
  if (q2_grads) q_mlp.backward(q2, c2, d2, q2_grads);
  return res;
}

SacActorResult sac_actor_loss_batch(const Mlp& pi_mlp, int act_dim,
                                    const ParameterSet& pi_params,
                                    const Mlp& q_mlp, const ParameterSet& q1,
                                    const ParameterSet& q2,
                                    const Matrix& states, const Matrix& z,
                                    double alpha,
                                    std::vector<double>* pi_grads) {
  const std::size_t n = states.rows;
  SacActorResult res;

  SquashedSample cur;
  squashed_resample(pi_mlp, act_dim, pi_params, states, z, cur);
  const Matrix qin = concat_sa(states, cur.t);

  MlpCache c1, c2;
  const Matrix& o1 = q_mlp.forward(q1, qin, c1);
  const Matrix& o2 = q_mlp.forward(q2, qin, c2);

  const double inv = 1.0 / static_cast<double>(n);
  Matrix d1(n, 1), d2(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double qmin = std::min(o1.at(i, 0), o2.at(i, 0));
    res.loss += (alpha * cur.log_pi[i] - qmin) * inv;
    res.mean_log_pi += cur.log_pi[i] * inv;
    if (o1.at(i, 0) <= o2.at(i, 0))
      d1.at(i, 0) = -inv;
    else
      d2.at(i, 0) = -inv;
  }
  if (!pi_grads) return res;

  // Pull -mean(qmin) back to the sampled action through the critics.
  Matrix din1, din2;
  q_mlp.backward(q1, c1, d1, nullptr, &din1);
  q_mlp.backward(q2, c2, d2, nullptr, &din2);
  const std::size_t obs = states.cols;

  const Matrix& head = cur.cache.acts.back();
  Matrix dhead(n, static_cast<std::size_t>(2 * act_dim));
  for (std::size_t i = 0; i < n; ++i) {
    double* dh = dhead.row(i);
    const double* h = head.row(i);
    for (int j = 0; j < act_dim; ++j) {
      const double t = cur.t.at(i, j);
      const double one_m_t2 = 1.0 - t * t;
      const double da = din1.at(i, obs + j) + din2.at(i, obs + j);
      // d log pi / d u through the squash correction
      const double dlp_du = 2.0 * t * one_m_t2 / (one_m_t2 + kSquashEps);
      const double du = alpha * inv * dlp_du + da * one_m_t2;
      dh[j] = du;
      const double gate = log_std_gate(h[act_dim + j]);
      dh[act_dim + j] =
          (du * cur.sigma.at(i, j) * z.at(i, j) - alpha * inv) * gate;
    }
  }
  pi_mlp.backward(pi_params, cur.cache, dhead, pi_grads);
  return res;
}

}  // namespace erc
