// SPDX-License-Identifier: Apache-2.0
#include "aaris/env.hpp"

#include <stdexcept>

namespace aaris {

namespace {

constexpr double kTol = 1e-12;

double clamp_unit(double u) { return std::min(1.0, std::max(-1.0, u)); }

/// Phase decode: affine (u+1)*pi, wrapped into [0, 2pi]. An in-range input
/// maps without wrapping, so u = 1 yields exactly 2pi.
double decode_phase(double u) {
  double x = (u + 1.0) * kPi;
  if (x >= 0.0 && x <= 2.0 * kPi) return x;
  x = std::fmod(x, 2.0 * kPi);
  if (x < 0.0) x += 2.0 * kPi;
  return x;
}

Vector2d clamp_rect(const Vector2d& p, const Vector2d& lo, const Vector2d& hi) {
  return {std::min(hi.x(), std::max(lo.x(), p.x())),
          std::min(hi.y(), std::max(lo.y(), p.y()))};
}

}  // namespace

const char* to_string(RisVariant v) {
  switch (v) {
    case RisVariant::aerial_active: return "aerial_active";
    case RisVariant::aerial_passive: return "aerial_passive";
    case RisVariant::fixed_active: return "fixed_active";
  }
  return "unknown";
}

int EnvConfig::cont_action_dim() const {
  const int m = channel.m();
  int d = 2 * channel.n_bs * (k_users + 1) + m + k_users;  // beams + phases + c_alloc
  if (variant != RisVariant::fixed_active) d += 2;         // velocity
  if (variant != RisVariant::aerial_passive) d += m;       // amplitudes
  return d;
}

int EnvConfig::state_dim() const {
  const int m = channel.m();
  const int n = channel.n_bs;
  return 3 * k_users + 1 + 6 + 2 * k_users + 1 + 2 * m * n + 2 * m * k_users + m +
         cont_action_dim() + 1;
}

void EnvConfig::finalize() {
  if (qos.size() == 0) qos = VectorXd::Constant(k_users, 2.0);
  scales.channel = std::sqrt(channel.c0);
  scales.velocity = v_max;
  scales.power = bs_power.p_max;
  scales.accel = a_max_uav;
  const double extent = (q_max - q_min).cwiseAbs().maxCoeff();
  scales.position = std::max(extent, 1.0);
  validate();
}

void EnvConfig::validate() const {
  channel.validate();
  uav_power.validate();
  ris_power.validate();
  bs_power.validate();
  if (k_users < 1) throw std::invalid_argument("EnvConfig: k_users must be >= 1");
  if (horizon_slots < 1) throw std::invalid_argument("EnvConfig: horizon_slots must be >= 1");
  if (slot_dt <= 0.0) throw std::invalid_argument("EnvConfig: slot_dt must be positive");
  if (v_max <= 0.0 || a_max_uav <= 0.0)
    throw std::invalid_argument("EnvConfig: v_max and a_max_uav must be positive");
  if (a_max_ris < 0.0) throw std::invalid_argument("EnvConfig: a_max_ris must be >= 0");
  if (c_max <= 0.0) throw std::invalid_argument("EnvConfig: c_max must be positive");
  if (sigma_k2 <= 0.0) throw std::invalid_argument("EnvConfig: sigma_k2 must be positive");
  if (qos.size() != k_users) throw std::invalid_argument("EnvConfig: qos size must equal k_users");
  const Vector3d init = (variant == RisVariant::fixed_active) ? fixed_ris_pos : uav_init;
  for (int i = 0; i < 3; ++i) {
    if (init(i) < q_min(i) - kTol || init(i) > q_max(i) + kTol)
      throw std::invalid_argument("EnvConfig: initial UAV position outside [q_min, q_max]");
  }
}

JointAction JointAction::zeros(const EnvConfig& cfg) {
  JointAction a;
  a.sel_mask.assign(static_cast<std::size_t>(cfg.mask_dim()), 0);
  a.raw_cont = VectorXd::Zero(cfg.cont_action_dim());
  return a;
}

ActionLayout action_layout(const EnvConfig& cfg) {
  const int m = cfg.channel.m();
  const int n = cfg.channel.n_bs;
  ActionLayout lay;
  lay.w_common = 0;
  lay.w_private = 2 * n;
  int off = 2 * n * (cfg.k_users + 1);
  if (cfg.variant != RisVariant::fixed_active) {
    lay.velocity = off;
    off += 2;
  }
  if (cfg.variant != RisVariant::aerial_passive) {
    lay.amp = off;
    off += m;
  }
  lay.phase = off;
  off += m;
  lay.c_alloc = off;
  off += cfg.k_users;
  lay.total = off;
  return lay;
}

int ConstraintFlags::violations() const {
  int n = 0;
  for (bool s : sat) n += !s;
  return n;
}

double reward_from(double ee, const ConstraintFlags& flags) {
  return ee * (1.0 - static_cast<double>(flags.violations()));
}

TaskSpec random_task(int id, const EnvConfig& cfg, RngStream& rng) {
  TaskSpec task;
  task.id = id;
  task.mobility_seed = rng.next_u64();
  task.user_init.reserve(static_cast<std::size_t>(cfg.k_users));
  for (int k = 0; k < cfg.k_users; ++k) {
    task.user_init.emplace_back(rng.uniform(cfg.q_min.x(), cfg.q_max.x()),
                                rng.uniform(cfg.q_min.y(), cfg.q_max.y()));
  }
  return task;
}

std::vector<Vector3d> user_mobility_step(const std::vector<Vector3d>& positions,
                                         const Vector2d& lo, const Vector2d& hi,
                                         double step_std_dt, RngStream& rng) {
  std::vector<Vector3d> out;
  out.reserve(positions.size());
  for (const auto& p : positions) {
    double x = p.x() + step_std_dt * rng.gaussian();
    double y = p.y() + step_std_dt * rng.gaussian();
    // reflect at the rectangle until inside
    for (int guard = 0; guard < 64; ++guard) {
      bool moved = false;
      if (x < lo.x()) { x = 2.0 * lo.x() - x; moved = true; }
      if (x > hi.x()) { x = 2.0 * hi.x() - x; moved = true; }
      if (y < lo.y()) { y = 2.0 * lo.y() - y; moved = true; }
      if (y > hi.y()) { y = 2.0 * hi.y() - y; moved = true; }
      if (!moved) break;
    }
    x = std::min(hi.x(), std::max(lo.x(), x));
    y = std::min(hi.y(), std::max(lo.y(), y));
    out.emplace_back(x, y, 0.0);
  }
  return out;
}

Environment::Environment(EnvConfig cfg) : cfg_(std::move(cfg)), rng_(0) {
  cfg_.finalize();
  prev_action_ = JointAction::zeros(cfg_);
  last_rates_.sinr_common = VectorXd::Zero(cfg_.k_users);
  last_rates_.sinr_private = VectorXd::Zero(cfg_.k_users);
  last_rates_.r_common = VectorXd::Zero(cfg_.k_users);
  last_rates_.r_private = VectorXd::Zero(cfg_.k_users);
  last_rates_.c_alloc = VectorXd::Zero(cfg_.k_users);
}

VectorXd Environment::reset() {
  RngStream task_rng = RngStream(cfg_.seed).derive(0xD0C5);
  return reset(random_task(0, cfg_, task_rng));
}

VectorXd Environment::reset(const TaskSpec& task) {
  if (static_cast<int>(task.user_init.size()) != cfg_.k_users)
    throw std::invalid_argument("reset: task user count does not match config");
  for (const auto& u : task.user_init) {
    if (u.x() < cfg_.q_min.x() - kTol || u.x() > cfg_.q_max.x() + kTol ||
        u.y() < cfg_.q_min.y() - kTol || u.y() > cfg_.q_max.y() + kTol)
      throw std::invalid_argument("reset: task user position outside the arena");
  }
  task_ = task;
  rng_ = RngStream(cfg_.seed).derive(task.mobility_seed).derive(static_cast<std::uint64_t>(task.id));

  geom_.bs_pos = cfg_.bs_pos;
  geom_.uav_pos = (cfg_.variant == RisVariant::fixed_active) ? cfg_.fixed_ris_pos : cfg_.uav_init;
  geom_.uav_vel = Vector3d::Zero();
  geom_.user_pos.clear();
  for (const auto& u : task.user_init) {
    geom_.user_pos.emplace_back(u.x(), u.y(), 0.0);
  }
  chan_ = draw_channels(geom_, cfg_.channel, rng_);

  slot_ = 0;
  done_ = false;
  prev_action_ = JointAction::zeros(cfg_);
  prev_reward_ = 0.0;
  prev_cmd_velocity_ = Vector2d::Zero();
  last_rates_.sinr_common.setZero(cfg_.k_users);
  last_rates_.sinr_private.setZero(cfg_.k_users);
  last_rates_.r_common.setZero(cfg_.k_users);
  last_rates_.r_private.setZero(cfg_.k_users);
  last_rates_.c_alloc.setZero(cfg_.k_users);
  last_rates_.r_total = 0.0;
  return assemble_state();
}

PhysicalAction Environment::decode_action(const JointAction& action) const {
  const ActionLayout lay = action_layout(cfg_);
  if (action.raw_cont.size() != lay.total)
    throw std::invalid_argument("decode_action: continuous action has wrong dimension");
  if (static_cast<int>(action.sel_mask.size()) != cfg_.mask_dim())
    throw std::invalid_argument("decode_action: selection mask has wrong dimension");
  for (Eigen::Index i = 0; i < action.raw_cont.size(); ++i) {
    if (action.raw_cont(i) < -1.0 - kTol || action.raw_cont(i) > 1.0 + kTol) {
      warn_once("decode_out_of_range", "raw action outside [-1, 1]; clamping for execution");
      break;
    }
  }

  const int n = cfg_.channel.n_bs;
  const int m = cfg_.channel.m();
  const double beam_scale = std::sqrt(cfg_.bs_power.pa_eff * cfg_.bs_power.p_max);
  const double vel_scale = cfg_.v_max / std::sqrt(2.0);

  auto decode_beam = [&](int off, bool clamped) {
    VectorXcd w(n);
    for (int i = 0; i < n; ++i) {
      double re = action.raw_cont(off + 2 * i);
      double im = action.raw_cont(off + 2 * i + 1);
      if (clamped) {
        re = clamp_unit(re);
        im = clamp_unit(im);
      }
      w(i) = std::complex<double>(re * beam_scale, im * beam_scale);
    }
    return w;
  };

  PhysicalAction phys;
  phys.beams.w_common = decode_beam(lay.w_common, true);
  phys.proposed_beams.w_common = decode_beam(lay.w_common, false);
  for (int k = 0; k < cfg_.k_users; ++k) {
    phys.beams.w_private.push_back(decode_beam(lay.w_private + 2 * n * k, true));
    phys.proposed_beams.w_private.push_back(decode_beam(lay.w_private + 2 * n * k, false));
  }

  if (lay.velocity >= 0) {
    const double ux = action.raw_cont(lay.velocity);
    const double uy = action.raw_cont(lay.velocity + 1);
    phys.velocity = {clamp_unit(ux) * vel_scale, clamp_unit(uy) * vel_scale};
    phys.proposed_velocity = {ux * vel_scale, uy * vel_scale};
  }

  phys.ris.amp.resize(m);
  phys.proposed_amp.resize(m);
  if (lay.amp >= 0) {
    for (int i = 0; i < m; ++i) {
      const double u = action.raw_cont(lay.amp + i);
      phys.ris.amp(i) = (clamp_unit(u) + 1.0) / 2.0 * cfg_.a_max_ris;
      phys.proposed_amp(i) = (u + 1.0) / 2.0 * cfg_.a_max_ris;
    }
  } else {
    phys.ris.amp.setOnes();
    phys.proposed_amp.setOnes();
  }

  phys.ris.phase.resize(m);
  for (int i = 0; i < m; ++i) {
    phys.ris.phase(i) = decode_phase(action.raw_cont(lay.phase + i));
  }
  phys.ris.sel = action.sel_mask;

  phys.c_alloc.resize(cfg_.k_users);
  phys.proposed_c_alloc.resize(cfg_.k_users);
  for (int k = 0; k < cfg_.k_users; ++k) {
    const double u = action.raw_cont(lay.c_alloc + k);
    phys.c_alloc(k) = (clamp_unit(u) + 1.0) / 2.0 * cfg_.c_max;
    phys.proposed_c_alloc(k) = (u + 1.0) / 2.0 * cfg_.c_max;
  }
  return phys;
}

ConstraintFlags Environment::evaluate_constraints(const PhysicalAction& phys,
                                                  const RateReport& rates, double p_out,
                                                  const Vector3d& proposed_pos,
                                                  const Vector2d& prev_cmd_velocity) const {
  ConstraintFlags f;
  f.sat[0] = common_rate_ok(rates.c_alloc, rates.r_common);  // C1
  bool qos_ok = true;                                        // C2
  for (int k = 0; k < cfg_.k_users; ++k) {
    qos_ok = qos_ok && (rates.c_alloc(k) + rates.r_private(k) >= cfg_.qos(k) - kTol);
  }
  f.sat[1] = qos_ok;
  f.sat[2] = phys.beams.transmit_power() / cfg_.bs_power.pa_eff <=
             cfg_.bs_power.p_max + kTol;  // C3
  f.sat[3] = p_out <= cfg_.ris_power.amp_eff * cfg_.ris_power.p_amp_budget + kTol;  // C4
  bool amp_ok = true;                                        // C5
  for (Eigen::Index i = 0; i < phys.proposed_amp.size(); ++i) {
    amp_ok = amp_ok &&
             (phys.proposed_amp(i) >= -kTol && phys.proposed_amp(i) <= cfg_.a_max_ris + kTol);
  }
  f.sat[4] = amp_ok;
  bool phase_ok = true;                                      // C6: wrapped, in range
  for (Eigen::Index i = 0; i < phys.ris.phase.size(); ++i) {
    phase_ok = phase_ok && phys.ris.phase(i) >= 0.0 && phys.ris.phase(i) <= 2.0 * kPi;
  }
  f.sat[5] = phase_ok;
  bool pos_ok = true;                                        // C7, pre-clamp proposal
  for (int i = 0; i < 3; ++i) {
    pos_ok = pos_ok &&
             (proposed_pos(i) >= cfg_.q_min(i) - kTol && proposed_pos(i) <= cfg_.q_max(i) + kTol);
  }
  f.sat[6] = pos_ok;
  f.sat[7] = true;  // C8: position recursion holds by construction
  f.sat[8] = true;  // C9: initial position enforced at reset
  f.sat[9] = phys.proposed_velocity.norm() <= cfg_.v_max + kTol;  // C10
  f.sat[10] = (phys.proposed_velocity - prev_cmd_velocity).norm() <=
              cfg_.a_max_uav * cfg_.slot_dt + kTol;  // C11
  f.sat[11] = true;  // C12: mask length is M by construction
  f.sat[12] = true;  // C13: bits by construction
  return f;
}

RisConfig Environment::make_ris_config(const JointAction& action,
                                       const PhysicalAction& phys) const {
  RisConfig ris = phys.ris;
  ris.sel = action.sel_mask;
  return ris;
}

StepResult Environment::step(const JointAction& action) {
  if (done_) throw std::logic_error("step: episode finished; call reset()");
  const PhysicalAction phys = decode_action(action);

  // (i) UAV kinematics; the pre-clamp proposal feeds C7.
  Vector3d proposed_pos = geom_.uav_pos;
  if (cfg_.variant != RisVariant::fixed_active) {
    proposed_pos.x() += phys.velocity.x() * cfg_.slot_dt;
    proposed_pos.y() += phys.velocity.y() * cfg_.slot_dt;
    geom_.uav_pos = proposed_pos.cwiseMax(cfg_.q_min).cwiseMin(cfg_.q_max);
    geom_.uav_vel = Vector3d(phys.velocity.x(), phys.velocity.y(), 0.0);
  } else {
    geom_.uav_vel = Vector3d::Zero();
  }

  // (ii) user mobility
  geom_.user_pos = user_mobility_step(
      geom_.user_pos, {cfg_.q_min.x(), cfg_.q_min.y()}, {cfg_.q_max.x(), cfg_.q_max.y()},
      cfg_.user_step_std * cfg_.slot_dt, rng_);

  // (iii) fresh block-fading channels
  chan_ = draw_channels(geom_, cfg_.channel, rng_);

  // (iv) rates, powers, EE
  const bool passive = (cfg_.variant == RisVariant::aerial_passive);
  const double sigma_z2 = passive ? 0.0 : cfg_.sigma_z2;
  const RisConfig ris = make_ris_config(action, phys);
  SlotMetrics metrics;
  metrics.rates = compute_rate_report(phys.beams, chan_, ris, phys.c_alloc, sigma_z2,
                                      cfg_.sigma_k2, cfg_.rsma);
  metrics.r_total = metrics.rates.r_total;
  const VectorXcd f_prime = effective_ris_diagonal(ris);
  metrics.p_out = ris_output_power(f_prime, chan_.g, phys.beams, sigma_z2);
  metrics.p_ris = ris_power(ris, passive ? 0.0 : metrics.p_out, cfg_.ris_power,
                            cfg_.ris_static_power_counts_all);
  metrics.p_uav = propulsion_power(geom_.uav_vel.norm(), cfg_.uav_power);
  metrics.p_total =
      total_power(phys.beams, cfg_.bs_power, metrics.p_uav, metrics.p_ris, cfg_.k_users);
  metrics.ee = metrics.r_total / metrics.p_total;

  // (v)-(vi) feasibility flags and the penalty reward
  metrics.flags = evaluate_constraints(phys, metrics.rates, metrics.p_out, proposed_pos,
                                       prev_cmd_velocity_);
  metrics.reward = reward_from(metrics.ee, metrics.flags);

  // (vii) bookkeeping
  slot_ += 1;
  done_ = (slot_ >= cfg_.horizon_slots);
  prev_cmd_velocity_ = phys.proposed_velocity;
  prev_reward_ = metrics.reward;
  last_rates_ = metrics.rates;
  prev_action_.sel_mask = action.sel_mask;
  prev_action_.raw_cont = action.raw_cont.cwiseMax(-1.0).cwiseMin(1.0);

  StepResult out;
  out.state = assemble_state();
  out.reward = metrics.reward;
  out.done = done_;
  out.metrics = std::move(metrics);
  return out;
}

VectorXd Environment::assemble_state() const {
  const int m = cfg_.channel.m();
  const int n = cfg_.channel.n_bs;
  const int k_users = cfg_.k_users;
  const StateScales& sc = cfg_.scales;
  VectorXd s(cfg_.state_dim());
  Eigen::Index at = 0;

  for (int k = 0; k < k_users; ++k) {
    s(at++) = last_rates_.r_common(k) / sc.rate;
    s(at++) = last_rates_.r_private(k) / sc.rate;
    s(at++) = cfg_.qos(k) / sc.rate;
  }
  s(at++) = cfg_.bs_power.p_max / sc.power;
  for (int i = 0; i < 3; ++i) s(at++) = geom_.uav_pos(i) / sc.position;
  for (int i = 0; i < 3; ++i) s(at++) = geom_.uav_vel(i) / sc.velocity;
  for (int k = 0; k < k_users; ++k) {
    s(at++) = geom_.user_pos[static_cast<std::size_t>(k)].x() / sc.position;
    s(at++) = geom_.user_pos[static_cast<std::size_t>(k)].y() / sc.position;
  }
  s(at++) = cfg_.a_max_uav / sc.accel;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) s(at++) = chan_.g(i, j).real() / sc.channel;
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) s(at++) = chan_.g(i, j).imag() / sc.channel;
  }
  for (int k = 0; k < k_users; ++k) {
    const auto& h = chan_.h_r[static_cast<std::size_t>(k)];
    for (int i = 0; i < m; ++i) s(at++) = h(i).real() / sc.channel;
  }
  for (int k = 0; k < k_users; ++k) {
    const auto& h = chan_.h_r[static_cast<std::size_t>(k)];
    for (int i = 0; i < m; ++i) s(at++) = h(i).imag() / sc.channel;
  }
  for (int i = 0; i < m; ++i)
    s(at++) = static_cast<double>(prev_action_.sel_mask[static_cast<std::size_t>(i)]);
  for (Eigen::Index i = 0; i < prev_action_.raw_cont.size(); ++i) s(at++) = prev_action_.raw_cont(i);
  s(at++) = prev_reward_ / sc.reward;

  if (at != s.size()) throw std::logic_error("assemble_state: dimension bookkeeping error");
  return s;
}

}  // namespace aaris
