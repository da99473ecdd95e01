// SPDX-License-Identifier: Apache-2.0
#include "aaris/env.hpp"

#include <doctest.h>

using namespace aaris;

namespace {

EnvConfig desk_config() {
  EnvConfig cfg;
  cfg.k_users = 2;
  cfg.channel.mx = 2;
  cfg.channel.my = 2;
  cfg.channel.n_bs = 2;
  cfg.horizon_slots = 10;
  cfg.qos = VectorXd();
  cfg.seed = 11;
  cfg.finalize();
  return cfg;
}

TaskSpec center_task(const EnvConfig& cfg) {
  TaskSpec task;
  task.id = 1;
  task.mobility_seed = 5;
  for (int k = 0; k < cfg.k_users; ++k) {
    task.user_init.emplace_back(40.0 + 20.0 * k, 60.0);
  }
  return task;
}

JointAction random_action(const EnvConfig& cfg, RngStream& rng) {
  JointAction a = JointAction::zeros(cfg);
  for (auto& bit : a.sel_mask) bit = rng.uniform() < 0.5 ? 1 : 0;
  for (Eigen::Index i = 0; i < a.raw_cont.size(); ++i) a.raw_cont(i) = rng.uniform(-1, 1);
  return a;
}

}  // namespace

TEST_CASE("state dimension closed form at full scale") {
  EnvConfig cfg;  // K=3, M=16, N_BS=5
  cfg.finalize();
  const int d = 2 * 5 * 4 + 2 + 2 * 16 + 3;
  CHECK(d == 77);
  CHECK(cfg.cont_action_dim() == d);
  CHECK(cfg.state_dim() == 373);

  Environment env(cfg);
  TaskSpec task;
  task.user_init = {{10, 10}, {20, 20}, {30, 30}};
  const VectorXd s = env.reset(task);
  CHECK(s.size() == 373);
}

TEST_CASE("variant action dims") {
  EnvConfig cfg = desk_config();
  const int base = cfg.cont_action_dim();
  EnvConfig passive = cfg;
  passive.variant = RisVariant::aerial_passive;
  CHECK(passive.cont_action_dim() == base - cfg.channel.m());
  EnvConfig fixed = cfg;
  fixed.variant = RisVariant::fixed_active;
  CHECK(fixed.cont_action_dim() == base - 2);
}

TEST_CASE("reset determinism and initial state") {
  EnvConfig cfg = desk_config();
  Environment env(cfg);
  const TaskSpec task = center_task(cfg);
  const VectorXd s1 = env.reset(task);
  const VectorXd s2 = env.reset(task);
  CHECK(s1 == s2);

  // UAV position block sits after 3K rate entries and the power entry
  const int at = 3 * cfg.k_users + 1;
  CHECK(s1(at + 0) * cfg.scales.position == doctest::Approx(cfg.uav_init.x()));
  CHECK(s1(at + 1) * cfg.scales.position == doctest::Approx(cfg.uav_init.y()));
  CHECK(s1(at + 2) * cfg.scales.position == doctest::Approx(cfg.uav_init.z()));

  TaskSpec bad = task;
  bad.user_init[0] = {1e6, 0.0};
  CHECK_THROWS_AS(env.reset(bad), std::invalid_argument);
}

TEST_CASE("decode affine midpoints and bounds") {
  EnvConfig cfg = desk_config();
  Environment env(cfg);
  const ActionLayout lay = action_layout(cfg);

  JointAction zero = JointAction::zeros(cfg);
  const PhysicalAction mid = env.decode_action(zero);
  for (Eigen::Index i = 0; i < mid.ris.amp.size(); ++i) {
    CHECK(mid.ris.amp(i) == doctest::Approx(cfg.a_max_ris / 2.0));
    CHECK(mid.ris.phase(i) == doctest::Approx(kPi));
  }
  CHECK(mid.velocity.norm() == doctest::Approx(0.0));
  for (Eigen::Index i = 0; i < mid.c_alloc.size(); ++i) {
    CHECK(mid.c_alloc(i) == doctest::Approx(cfg.c_max / 2.0));
  }
  CHECK(mid.beams.w_common.norm() == doctest::Approx(0.0));

  JointAction low = JointAction::zeros(cfg);
  low.raw_cont.setConstant(-1.0);
  const PhysicalAction lo = env.decode_action(low);
  for (Eigen::Index i = 0; i < lo.ris.amp.size(); ++i) {
    CHECK(lo.ris.amp(i) == doctest::Approx(0.0));
    CHECK(lo.ris.phase(i) == doctest::Approx(0.0));
  }
  for (Eigen::Index i = 0; i < lo.c_alloc.size(); ++i) {
    CHECK(lo.c_alloc(i) == doctest::Approx(0.0));
  }
  const double beam_bound = std::sqrt(cfg.bs_power.pa_eff * cfg.bs_power.p_max);
  CHECK(lo.beams.w_common(0).real() == doctest::Approx(-beam_bound));

  JointAction hi = JointAction::zeros(cfg);
  hi.raw_cont(lay.phase) = 1.0;  // raw phase coordinate 1 -> exactly 2*pi
  const PhysicalAction top = env.decode_action(hi);
  CHECK(top.ris.phase(0) == doctest::Approx(2.0 * kPi));

  JointAction wrapped = JointAction::zeros(cfg);
  wrapped.raw_cont(lay.phase) = 1.5;  // 2.5*pi wraps to 0.5*pi
  CHECK(env.decode_action(wrapped).ris.phase(0) == doctest::Approx(0.5 * kPi));
}

TEST_CASE("step: stationary action satisfies the kinematic checks") {
  EnvConfig cfg = desk_config();
  Environment env(cfg);
  env.reset(center_task(cfg));
  JointAction a = JointAction::zeros(cfg);
  const StepResult res = env.step(a);
  CHECK(res.metrics.flags.sat[6]);   // C7
  CHECK(res.metrics.flags.sat[9]);   // C10
  CHECK(res.metrics.flags.sat[10]);  // C11
  CHECK_FALSE(res.done);
  CHECK(res.metrics.p_total > 0.0);
  CHECK(res.metrics.r_total >= 0.0);
}

TEST_CASE("step: oversized velocity proposal trips C10 and scales the reward") {
  EnvConfig cfg = desk_config();
  Environment env(cfg);
  env.reset(center_task(cfg));
  const ActionLayout lay = action_layout(cfg);

  JointAction a = JointAction::zeros(cfg);
  // raw coordinate u maps to u*V_max/sqrt(2); u = 2 on both axes makes the
  // proposed speed exactly 2*V_max
  const double u = 2.0;
  a.raw_cont(lay.velocity) = u;
  a.raw_cont(lay.velocity + 1) = u;
  const PhysicalAction phys = env.decode_action(a);
  CHECK(phys.proposed_velocity.norm() == doctest::Approx(2.0 * cfg.v_max));
  CHECK(phys.velocity.norm() == doctest::Approx(cfg.v_max));  // executed is clamped

  const StepResult res = env.step(a);
  CHECK_FALSE(res.metrics.flags.sat[9]);  // C10 on the pre-clamp proposal
  CHECK(res.reward ==
        doctest::Approx(res.metrics.ee * (1.0 - res.metrics.flags.violations())));
}

TEST_CASE("episode length and step-after-done") {
  EnvConfig cfg = desk_config();
  Environment env(cfg);
  env.reset(center_task(cfg));
  JointAction a = JointAction::zeros(cfg);
  StepResult res;
  for (int l = 0; l < cfg.horizon_slots; ++l) {
    CHECK_FALSE(env.done());
    res = env.step(a);
  }
  CHECK(res.done);
  CHECK(env.done());
  CHECK_THROWS_AS(env.step(a), std::logic_error);
}

TEST_CASE("dynamics-enforced flags never read false across random episodes") {
  EnvConfig cfg = desk_config();
  Environment env(cfg);
  RngStream rng(3);
  env.reset(center_task(cfg));
  for (int l = 0; l < cfg.horizon_slots; ++l) {
    const StepResult res = env.step(random_action(cfg, rng));
    CHECK(res.metrics.flags.sat[7]);   // C8
    CHECK(res.metrics.flags.sat[8]);   // C9
    CHECK(res.metrics.flags.sat[11]);  // C12
    CHECK(res.metrics.flags.sat[12]);  // C13
    CHECK(res.metrics.flags.sat[5]);   // C6 after wrap
    CHECK(res.state.size() == cfg.state_dim());
    const auto& q = env.geometry().uav_pos;
    for (int i = 0; i < 3; ++i) {
      CHECK(q(i) >= cfg.q_min(i) - 1e-12);
      CHECK(q(i) <= cfg.q_max(i) + 1e-12);
    }
    CHECK(res.metrics.p_total > 0.0);
    CHECK(res.metrics.r_total >= 0.0);
  }
}

TEST_CASE("fixed trajectory is bit-identical across runs") {
  EnvConfig cfg = desk_config();
  const TaskSpec task = center_task(cfg);
  std::vector<JointAction> actions;
  RngStream arng(17);
  for (int l = 0; l < cfg.horizon_slots; ++l) actions.push_back(random_action(cfg, arng));

  auto run = [&]() {
    Environment env(cfg);
    std::vector<double> rewards;
    VectorXd last = env.reset(task);
    for (const auto& a : actions) {
      const StepResult res = env.step(a);
      rewards.push_back(res.reward);
      last = res.state;
    }
    return std::make_pair(rewards, last);
  };
  const auto [r1, s1] = run();
  const auto [r2, s2] = run();
  CHECK(r1 == r2);
  CHECK(s1 == s2);
}

TEST_CASE("zero transmit power fails QoS") {
  EnvConfig cfg = desk_config();
  Environment env(cfg);
  env.reset(center_task(cfg));
  JointAction a = JointAction::zeros(cfg);
  const ActionLayout lay = action_layout(cfg);
  for (int k = 0; k < cfg.k_users; ++k) a.raw_cont(lay.c_alloc + k) = -1.0;
  const StepResult res = env.step(a);
  CHECK_FALSE(res.metrics.flags.sat[1]);  // C2 with Pi_k > 0
  CHECK(res.metrics.r_total == doctest::Approx(0.0));
}

TEST_CASE("reward law") {
  ConstraintFlags flags;
  flags.sat.fill(true);
  CHECK(reward_from(2.0, flags) == doctest::Approx(2.0));
  flags.sat[0] = flags.sat[3] = flags.sat[9] = false;
  CHECK(reward_from(2.0, flags) == doctest::Approx(-4.0));
  flags.sat.fill(false);
  CHECK(reward_from(2.0, flags) == doctest::Approx(-24.0));

  RngStream rng(29);
  for (int i = 0; i < 1000; ++i) {
    ConstraintFlags f;
    int n_viol = 0;
    for (auto& s : f.sat) {
      s = rng.uniform() < 0.5;
      n_viol += s ? 0 : 1;
    }
    const double ee = rng.uniform(-5, 5);
    CHECK(reward_from(ee, f) == ee * (1.0 - n_viol));
  }
}

TEST_CASE("reward equals EE whenever every check passes") {
  EnvConfig cfg = desk_config();
  Environment env(cfg);
  RngStream rng(41);
  env.reset(center_task(cfg));
  for (int l = 0; l < cfg.horizon_slots; ++l) {
    const StepResult res = env.step(random_action(cfg, rng));
    if (res.metrics.flags.all_satisfied()) {
      CHECK(res.reward == doctest::Approx(res.metrics.ee));
    } else {
      CHECK(res.reward ==
            doctest::Approx(res.metrics.ee * (1.0 - res.metrics.flags.violations())));
    }
  }
}

TEST_CASE("user mobility") {
  const Vector2d lo{0.0, 0.0}, hi{150.0, 150.0};
  std::vector<Vector3d> pos{{10.0, 10.0, 0.0}, {100.0, 140.0, 0.0}};
  RngStream rng(7);

  const auto frozen = user_mobility_step(pos, lo, hi, 0.0, rng);
  CHECK(frozen[0] == pos[0]);
  CHECK(frozen[1] == pos[1]);

  std::vector<Vector3d> edge{{0.05, 0.05, 0.0}};
  for (int i = 0; i < 2000; ++i) {
    edge = user_mobility_step(edge, lo, hi, 0.5, rng);
    CHECK(edge[0].x() >= 0.0);
    CHECK(edge[0].y() >= 0.0);
    CHECK(edge[0].x() <= 150.0);
    CHECK(edge[0].y() <= 150.0);
    CHECK(edge[0].z() == 0.0);
  }

  const double step = 0.2;
  std::vector<Vector3d> center{{75.0, 75.0, 0.0}};
  double acc2 = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto next = user_mobility_step(center, lo, hi, step, rng);
    const double dx = next[0].x() - center[0].x();
    acc2 += dx * dx;
  }
  CHECK(std::sqrt(acc2 / n) == doctest::Approx(step).epsilon(0.05));
}

TEST_CASE("constraint decisions against an independent scalar re-check") {
  EnvConfig cfg = desk_config();
  Environment env(cfg);
  RngStream rng(53);
  env.reset(center_task(cfg));
  for (int trial = 0; trial < 20; ++trial) {
    if (env.done()) env.reset(center_task(cfg));
    const JointAction a = random_action(cfg, rng);
    const PhysicalAction phys = env.decode_action(a);
    const Vector3d before = env.geometry().uav_pos;
    const StepResult res = env.step(a);

    double csum = 0.0;
    double rc_min = 1e300;
    for (int k = 0; k < cfg.k_users; ++k) {
      csum += res.metrics.rates.c_alloc(k);
      rc_min = std::min(rc_min, res.metrics.rates.r_common(k));
    }
    CHECK(res.metrics.flags.sat[0] == (csum <= rc_min + 1e-12));

    bool qos = true;
    for (int k = 0; k < cfg.k_users; ++k) {
      qos = qos && (res.metrics.rates.c_alloc(k) + res.metrics.rates.r_private(k) >=
                    cfg.qos(k) - 1e-12);
    }
    CHECK(res.metrics.flags.sat[1] == qos);

    double tx = 0.0;
    for (int i = 0; i < cfg.channel.n_bs; ++i) tx += std::norm(phys.beams.w_common(i));
    for (const auto& w : phys.beams.w_private) {
      for (int i = 0; i < cfg.channel.n_bs; ++i) tx += std::norm(w(i));
    }
    CHECK(res.metrics.flags.sat[2] ==
          (tx / cfg.bs_power.pa_eff <= cfg.bs_power.p_max + 1e-12));

    CHECK(res.metrics.flags.sat[3] ==
          (res.metrics.p_out <=
           cfg.ris_power.amp_eff * cfg.ris_power.p_amp_budget + 1e-12));

    const Vector3d proposal =
        before + Vector3d(phys.velocity.x(), phys.velocity.y(), 0.0) * cfg.slot_dt;
    bool pos_ok = true;
    for (int i = 0; i < 3; ++i) {
      pos_ok = pos_ok && proposal(i) >= cfg.q_min(i) - 1e-12 &&
               proposal(i) <= cfg.q_max(i) + 1e-12;
    }
    CHECK(res.metrics.flags.sat[6] == pos_ok);
  }
}

TEST_CASE("C4 boundary is inclusive") {
  EnvConfig cfg = desk_config();
  Environment env(cfg);
  env.reset(center_task(cfg));
  PhysicalAction phys = env.decode_action(JointAction::zeros(cfg));
  RateReport rates;
  rates.c_alloc = VectorXd::Zero(cfg.k_users);
  rates.r_common = VectorXd::Ones(cfg.k_users);
  rates.r_private = VectorXd::Constant(cfg.k_users, 10.0);
  const double budget = cfg.ris_power.amp_eff * cfg.ris_power.p_amp_budget;
  const auto flags =
      env.evaluate_constraints(phys, rates, budget, cfg.uav_init, Vector2d::Zero());
  CHECK(flags.sat[3]);
  const auto over =
      env.evaluate_constraints(phys, rates, budget * 1.001, cfg.uav_init, Vector2d::Zero());
  CHECK_FALSE(over.sat[3]);
}

TEST_CASE("passive variant drops amplifier power and dynamic noise") {
  EnvConfig active = desk_config();
  EnvConfig passive = desk_config();
  passive.variant = RisVariant::aerial_passive;
  passive.finalize();

  Environment env_a(active);
  Environment env_p(passive);
  TaskSpec task = center_task(active);
  env_a.reset(task);
  env_p.reset(task);

  JointAction ap = JointAction::zeros(passive);
  ap.sel_mask.assign(ap.sel_mask.size(), 1);
  const StepResult res_p = env_p.step(ap);
  const double expect = static_cast<double>(passive.channel.m()) *
                        (passive.ris_power.p_c + passive.ris_power.p_dc);
  CHECK(res_p.metrics.p_ris == doctest::Approx(expect).epsilon(1e-12));

  JointAction aa = JointAction::zeros(active);
  aa.sel_mask.assign(aa.sel_mask.size(), 1);
  const StepResult res_a = env_a.step(aa);
  CHECK(res_a.metrics.p_ris > expect);  // amplifier output counted
}

TEST_CASE("fixed variant hovers at the pinned position") {
  EnvConfig cfg = desk_config();
  cfg.variant = RisVariant::fixed_active;
  cfg.finalize();
  Environment env(cfg);
  env.reset(center_task(cfg));
  const StepResult res = env.step(JointAction::zeros(cfg));
  CHECK(res.metrics.p_uav == doctest::Approx(168.48).epsilon(1e-9));
  CHECK(env.geometry().uav_pos == cfg.fixed_ris_pos);
  CHECK(env.geometry().uav_vel.norm() == 0.0);
}
