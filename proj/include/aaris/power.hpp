// SPDX-License-Identifier: Apache-2.0
//
// Power bookkeeping: rotary-wing UAV propulsion, active-RIS consumption,
// BS power-amplifier and circuit terms, and the per-slot energy efficiency.

#ifndef AARIS_POWER_HPP
#define AARIS_POWER_HPP

#include <vector>

#include "aaris/rsma.hpp"

namespace aaris {

/// Rotary-wing propulsion constants. p_b/p_i are the hover blade-profile and
/// induced powers; the remaining fields feed the speed-dependent terms.
/// Note the source model's symbol collision: its air density shares the
/// letter zeta with the steering constant. They are separate fields here.
struct UavPowerParams {
  double p_b = 79.85;         // W, blade profile at hover
  double p_i = 88.63;         // W, induced at hover
  double omega = 300.0;       // rad/s, blade angular velocity
  double rotor_r = 0.4;       // m
  double d_ratio = 0.3;       // fuselage drag ratio
  double air_density = 1.225; // kg/m^3
  double solidity = 0.05;     // rotor solidity
  double disk_area = 0.503;   // m^2
  double v_induced = 4.03;    // m/s, mean rotor induced velocity
  double profile_drag = 0.02; // profile drag coefficient
  double corr = 0.1;          // induced-power correction factor
  double weight = 20.0;       // N

  void validate() const;
};

struct RisPowerParams {
  double p_c = 1e-4;          // W per element, switching/control (-10 dBm)
  double p_dc = 3.16227766016838e-4;  // W per element, biasing (-5 dBm)
  double amp_eff = 0.8;       // amplifier efficiency eta
  double nu = 1.25;           // 1/eta
  double p_amp_budget = 1e-2; // W, amplifier output budget P_I (10 dBm)

  void validate() const;
};

struct BsPowerParams {
  double pa_eff = 0.8;        // epsilon
  double p_cir_bs = 1.0;      // W, static BS circuitry (not in the source table)
  double p_cir_user = 5e-3;   // W per user
  double p_max = 0.316227766016838;  // W (25 dBm)

  void validate() const;
};

/// Blade-profile + parasite + induced terms at the given speed.
double propulsion_power(double speed, const UavPowerParams& p);

/// p_b + p_i; equals propulsion_power(0).
double hover_power(const UavPowerParams& p);

/// sum_k ||F' G w_k||^2 + ||F' G w_c||^2 + sigma_z^2 ||F'||_F^2.
double ris_output_power(const VectorXcd& f_prime, const MatrixXcd& g,
                        const BeamformingSet& bf, double sigma_z2);

/// N_on * (p_c + p_dc) + nu * p_out. Set count_all_elements to charge the
/// static per-element power for every element regardless of selection.
double ris_power(const RisConfig& ris, double p_out, const RisPowerParams& p,
                 bool count_all_elements = false);

/// (1/eps) * (sum ||w_k||^2 + ||w_c||^2) + P_BS^Cir + K * p_cir_user
/// + p_uav + p_ris.
double total_power(const BeamformingSet& bf, const BsPowerParams& p_bs, double p_uav,
                   double p_ris, int k_users);

/// Mean over slots of the per-slot ratio rate/power (not a ratio of means).
double energy_efficiency(const std::vector<double>& rates, const std::vector<double>& powers);

}  // namespace aaris

#endif  // AARIS_POWER_HPP
