// SPDX-License-Identifier: Apache-2.0
#include "aaris/power.hpp"

#include <cmath>
#include <stdexcept>

namespace aaris {

void UavPowerParams::validate() const {
  if (p_b <= 0 || p_i <= 0 || omega <= 0 || rotor_r <= 0 || air_density <= 0 ||
      solidity <= 0 || disk_area <= 0 || v_induced <= 0 || weight <= 0)
    throw std::invalid_argument("UavPowerParams: core constants must be positive");
  if (d_ratio < 0 || profile_drag < 0 || corr < 0)
    throw std::invalid_argument("UavPowerParams: drag/correction factors must be >= 0");
}

void RisPowerParams::validate() const {
  if (amp_eff <= 0.0 || amp_eff > 1.0)
    throw std::invalid_argument("RisPowerParams: amp_eff must be in (0, 1]");
  if (std::abs(nu * amp_eff - 1.0) > 1e-12)
    throw std::invalid_argument("RisPowerParams: nu must equal 1/amp_eff");
  if (p_amp_budget < 0.0)
    throw std::invalid_argument("RisPowerParams: p_amp_budget must be >= 0");
}

void BsPowerParams::validate() const {
  if (pa_eff <= 0.0 || pa_eff > 1.0)
    throw std::invalid_argument("BsPowerParams: pa_eff must be in (0, 1]");
  if (p_max <= 0.0) throw std::invalid_argument("BsPowerParams: p_max must be positive");
}

double propulsion_power(double speed, const UavPowerParams& p) {
  if (speed < 0.0) throw std::invalid_argument("propulsion_power: speed must be >= 0");
  const double v2 = speed * speed;
  const double blade = p.p_b * (1.0 + 3.0 * v2 / (p.omega * p.omega * p.rotor_r * p.rotor_r));
  const double parasite =
      0.5 * p.d_ratio * p.air_density * p.solidity * p.disk_area * v2 * speed;
  const double vi2 = p.v_induced * p.v_induced;
  const double inner = std::sqrt(1.0 + v2 * v2 / (4.0 * vi2 * vi2)) - v2 / (2.0 * vi2);
  const double induced = p.p_i * std::sqrt(inner);
  return blade + parasite + induced;
}

double hover_power(const UavPowerParams& p) { return p.p_b + p.p_i; }

double ris_output_power(const VectorXcd& f_prime, const MatrixXcd& g,
                        const BeamformingSet& bf, double sigma_z2) {
  if (g.rows() != f_prime.size())
    throw std::invalid_argument("ris_output_power: dimension mismatch");
  const auto fg = (f_prime.asDiagonal() * g).eval();
  double acc = (fg * bf.w_common).squaredNorm();
  for (const auto& w : bf.w_private) {
    acc += (fg * w).squaredNorm();
  }
  acc += sigma_z2 * f_prime.squaredNorm();
  return acc;
}

double ris_power(const RisConfig& ris, double p_out, const RisPowerParams& p,
                 bool count_all_elements) {
  if (p_out < 0.0) throw std::invalid_argument("ris_power: p_out must be >= 0");
  const int n = count_all_elements ? ris.size() : ris.num_on();
  return static_cast<double>(n) * (p.p_c + p.p_dc) + p.nu * p_out;
}

double total_power(const BeamformingSet& bf, const BsPowerParams& p_bs, double p_uav,
                   double p_ris, int k_users) {
  if (p_uav < 0.0 || p_ris < 0.0)
    throw std::invalid_argument("total_power: component powers must be >= 0");
  const double transmit = bf.transmit_power() / p_bs.pa_eff;
  const double circuits = p_bs.p_cir_bs + static_cast<double>(k_users) * p_bs.p_cir_user;
  return transmit + circuits + p_uav + p_ris;
}

double energy_efficiency(const std::vector<double>& rates, const std::vector<double>& powers) {
  if (rates.size() != powers.size() || rates.empty())
    throw std::invalid_argument("energy_efficiency: rate/power series must match and be non-empty");
  double acc = 0.0;
  for (std::size_t l = 0; l < rates.size(); ++l) {
    if (powers[l] <= 0.0)
      throw std::logic_error("energy_efficiency: total power must be positive in every slot");
    acc += rates[l] / powers[l];
  }
  return acc / static_cast<double>(rates.size());
}

}  // namespace aaris
