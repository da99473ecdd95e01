// SPDX-License-Identifier: Apache-2.0
//
// Episodic MDP around the physics: state assembly, action decoding, UAV
// and user dynamics, the thirteen feasibility checks and the penalty
// reward. One instance is single-threaded; run one per worker.

#ifndef AARIS_ENV_HPP
#define AARIS_ENV_HPP

#include <array>
#include <optional>

#include "aaris/power.hpp"

namespace aaris {

/// RIS deployment variant. The passive variant pins every amplification
/// factor to one, drops the RIS dynamic-noise terms and the amplifier
/// output power, and removes the amplitude block from the action. The
/// fixed variant pins the platform at a fixed position with zero velocity
/// and removes the velocity block from the action.
enum class RisVariant { aerial_active, aerial_passive, fixed_active };

const char* to_string(RisVariant v);

/// Per-block normalization applied to the state vector before it reaches
/// the networks. Values are plain constants, derived from the config.
struct StateScales {
  double position = 150.0;
  double velocity = 10.0;
  double channel = 0.0316227766016838;  // sqrt(c0)
  double rate = 10.0;
  double power = 0.316227766016838;
  double accel = 6.0;
  double reward = 10.0;
};

struct EnvConfig {
  int k_users = 3;
  ChannelParams channel;  // carries mx, my, n_bs
  int horizon_slots = 400;
  double slot_dt = 0.1;
  Vector3d q_min{0.0, 0.0, 100.0};
  Vector3d q_max{150.0, 150.0, 100.0};
  double v_max = 10.0;
  double a_max_uav = 6.0;
  Vector3d uav_init{75.0, 75.0, 100.0};
  Vector3d bs_pos{0.0, 0.0, 10.0};
  Vector3d fixed_ris_pos{75.0, 75.0, 100.0};
  VectorXd qos;                  // bps/Hz per user; filled to k_users on validate
  double a_max_ris = 10.0;       // amplitude bound (20 dB)
  double c_max = 5.0;            // common-allocation upper bound, bps/Hz
  double sigma_z2 = 1e-11;       // RIS dynamic noise power, W
  double sigma_k2 = 1e-11;       // user AWGN power, W
  UavPowerParams uav_power;
  RisPowerParams ris_power;
  BsPowerParams bs_power;
  double user_step_std = 1.0;    // random-walk std, m/s
  RisVariant variant = RisVariant::aerial_active;
  RsmaOptions rsma;
  bool ris_static_power_counts_all = false;
  std::uint64_t seed = 1;
  StateScales scales;

  int mask_dim() const { return channel.m(); }
  /// Continuous action width: 2*N_BS*(K+1) beamformer reals, 2 velocity
  /// components (absent for the fixed variant), M amplitudes (absent for
  /// the passive variant), M phases and K common-rate splits.
  int cont_action_dim() const;
  int state_dim() const;
  /// Recomputes the derived normalization scales and checks invariants.
  void finalize();
  void validate() const;
};

struct JointAction {
  std::vector<std::uint8_t> sel_mask;
  VectorXd raw_cont;  // nominally in [-1, 1]^d

  static JointAction zeros(const EnvConfig& cfg);
};

/// Offsets of the blocks inside the continuous action vector; -1 marks a
/// block that the variant removes.
struct ActionLayout {
  int w_common = 0;
  int w_private = 0;
  int velocity = -1;
  int amp = -1;
  int phase = 0;
  int c_alloc = 0;
  int total = 0;
};

ActionLayout action_layout(const EnvConfig& cfg);

/// Decoded action. The `executed` quantities are what the physics runs on
/// (raw inputs clamped into their boxes, phases wrapped); the `proposed`
/// quantities keep the unclamped affine decode for constraint evaluation.
struct PhysicalAction {
  BeamformingSet beams;
  Vector2d velocity{0.0, 0.0};
  RisConfig ris;
  VectorXd c_alloc;

  BeamformingSet proposed_beams;
  Vector2d proposed_velocity{0.0, 0.0};
  VectorXd proposed_amp;
  VectorXd proposed_c_alloc;
};

struct ConstraintFlags {
  std::array<bool, 13> sat{};

  int violations() const;
  bool all_satisfied() const { return violations() == 0; }
};

/// r = ee * (1 - #violations); each violated check contributes -ee.
double reward_from(double ee, const ConstraintFlags& flags);

struct SlotMetrics {
  RateReport rates;
  double r_total = 0.0;
  double p_uav = 0.0;
  double p_ris = 0.0;
  double p_out = 0.0;
  double p_total = 0.0;
  double ee = 0.0;
  double reward = 0.0;
  ConstraintFlags flags;
};

struct StepResult {
  VectorXd state;
  double reward = 0.0;
  bool done = false;
  SlotMetrics metrics;
};

/// A task is a user placement (plus its own mobility seed).
struct TaskSpec {
  int id = 0;
  std::vector<Vector2d> user_init;
  std::uint64_t mobility_seed = 0;
};

/// Draws a task with users uniform in the arena rectangle.
TaskSpec random_task(int id, const EnvConfig& cfg, RngStream& rng);

/// Gaussian random walk, reflected at the arena rectangle.
std::vector<Vector3d> user_mobility_step(const std::vector<Vector3d>& positions,
                                         const Vector2d& lo, const Vector2d& hi,
                                         double step_std_dt, RngStream& rng);

class Environment {
 public:
  explicit Environment(EnvConfig cfg);

  VectorXd reset();  // default task derived from the config seed
  VectorXd reset(const TaskSpec& task);
  StepResult step(const JointAction& action);

  PhysicalAction decode_action(const JointAction& action) const;
  ConstraintFlags evaluate_constraints(const PhysicalAction& phys, const RateReport& rates,
                                       double p_out, const Vector3d& proposed_pos,
                                       const Vector2d& prev_cmd_velocity) const;

  const EnvConfig& config() const { return cfg_; }
  int state_dim() const { return cfg_.state_dim(); }
  int cont_action_dim() const { return cfg_.cont_action_dim(); }
  int mask_dim() const { return cfg_.mask_dim(); }
  int slot() const { return slot_; }
  bool done() const { return done_; }
  const NetworkGeometry& geometry() const { return geom_; }
  const ChannelRealization& channels() const { return chan_; }

 private:
  VectorXd assemble_state() const;
  RisConfig make_ris_config(const JointAction& action, const PhysicalAction& phys) const;

  EnvConfig cfg_;
  RngStream rng_;
  NetworkGeometry geom_;
  ChannelRealization chan_;
  TaskSpec task_;
  int slot_ = 0;
  bool done_ = true;
  JointAction prev_action_;
  double prev_reward_ = 0.0;
  Vector2d prev_cmd_velocity_{0.0, 0.0};
  RateReport last_rates_;
};

}  // namespace aaris

#endif  // AARIS_ENV_HPP
