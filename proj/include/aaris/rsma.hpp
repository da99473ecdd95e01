// SPDX-License-Identifier: Apache-2.0
//
// Rate-splitting transmission through the element-selected active RIS:
// effective channels, common/private SINRs, Shannon rates and the total
// achievable rate. All quantities are linear (no dB anywhere).

#ifndef AARIS_RSMA_HPP
#define AARIS_RSMA_HPP

#include <cstdint>
#include <vector>

#include "aaris/channel.hpp"

namespace aaris {

/// Per-element amplification, phase shift and on/off selection.
struct RisConfig {
  VectorXd amp;                   // >= 0, amplitude gain
  VectorXd phase;                 // radians in [0, 2pi]
  std::vector<std::uint8_t> sel;  // {0, 1}

  int size() const { return static_cast<int>(sel.size()); }
  int num_on() const;
  static RisConfig all_on(int m, double amplitude = 1.0, double phase_rad = 0.0);
};

struct BeamformingSet {
  VectorXcd w_common;
  std::vector<VectorXcd> w_private;

  int num_users() const { return static_cast<int>(w_private.size()); }
  /// Sum ||w_k||^2 + ||w_c||^2 (before the 1/eps PA scaling).
  double transmit_power() const;
};

struct RateReport {
  VectorXd sinr_common;
  VectorXd sinr_private;
  VectorXd r_common;
  VectorXd r_private;
  VectorXd c_alloc;
  double r_total = 0.0;
};

struct RsmaOptions {
  bool common_sinr_excludes_self = false;  // alternative reading of the common SINR
};

/// Diagonal of the element-selected reflection matrix:
/// entry m = sel[m] * amp[m] * e^{j phase[m]}.
VectorXcd effective_ris_diagonal(const RisConfig& ris);

/// h_k with h_k^H = h_{r,k}^H diag(f_prime) G; returned as the column vector.
VectorXcd effective_user_channel(const VectorXcd& h_r_k, const VectorXcd& f_prime,
                                 const MatrixXcd& g);

/// Common-stream SINR at user k. The interference sum runs over all K
/// private beams unless opts.common_sinr_excludes_self is set.
double sinr_common(int k, const BeamformingSet& bf, const VectorXcd& h_k,
                   const VectorXcd& h_r_k, const VectorXcd& f_prime, double sigma_z2,
                   double sigma_k2, const RsmaOptions& opts = {});

/// Private-stream SINR at user k; interference excludes i = k.
double sinr_private(int k, const BeamformingSet& bf, const VectorXcd& h_k,
                    const VectorXcd& h_r_k, const VectorXcd& f_prime, double sigma_z2,
                    double sigma_k2);

/// log2(1 + sinr). Throws on negative input.
double rate(double sinr);

/// sum(c_alloc) <= min_k r_common[k], with 1e-12 slack.
bool common_rate_ok(const VectorXd& c_alloc, const VectorXd& r_common);

double total_rate(const RateReport& report);

/// Full per-slot rate computation from raw channels and the RIS/beam state.
RateReport compute_rate_report(const BeamformingSet& bf, const ChannelRealization& chan,
                               const RisConfig& ris, const VectorXd& c_alloc,
                               double sigma_z2, double sigma_k2,
                               const RsmaOptions& opts = {});

}  // namespace aaris

#endif  // AARIS_RSMA_HPP
