// SPDX-License-Identifier: Apache-2.0
//
// Rician channel synthesis between the multi-antenna BS, the UAV-mounted
// RIS and the single-antenna ground users. The geometry is 3-D Cartesian;
// the BS-to-RIS link uses a UPA arrival / ULA departure steering pair and
// the RIS-to-user link a UPA departure vector with the opposite phase sign.

#ifndef AARIS_CHANNEL_HPP
#define AARIS_CHANNEL_HPP

#include <Eigen/Dense>
#include <vector>

#include "aaris/common.hpp"

namespace aaris {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// BS/UAV/user placement for one time slot. UAV altitude is fixed;
/// users live in the z = 0 plane and the UAV velocity has no z-component.
struct NetworkGeometry {
  Vector3d bs_pos{0.0, 0.0, 10.0};
  Vector3d uav_pos{75.0, 75.0, 100.0};
  Vector3d uav_vel{0.0, 0.0, 0.0};
  std::vector<Vector3d> user_pos;

  int num_users() const { return static_cast<int>(user_pos.size()); }
};

struct ChannelParams {
  double c0 = 1e-3;          // path gain at the reference distance
  double d0 = 1.0;           // reference distance, meters
  double alpha_bs_u = 3.0;   // BS->RIS path-loss exponent
  double alpha_u_k = 3.0;    // RIS->user path-loss exponent
  double k_bs_u = 1.9952623149688795;  // Rician factor, linear (3 dB)
  double k_u_k = 1.9952623149688795;
  double zeta_phase = kPi;   // 2*pi*f_c*d_ris/c; pi for half-wavelength spacing
  int mx = 4;                // RIS elements along x
  int my = 4;                // RIS elements along y
  int n_bs = 5;              // BS antennas
  bool use_printed_cos_beta = false;  // literal-reproduction switch

  int m() const { return mx * my; }
  void validate() const;
};

/// One block-fading realization: g is M x N_BS, h_r[k] is M x 1.
struct ChannelRealization {
  MatrixXcd g;
  std::vector<VectorXcd> h_r;
};

struct AnglePair {
  double sin_vert = 0.0;
  double cos_horz = 1.0;
};

/// [1, e^{-j phase}, ..., e^{-j phase (n-1)}].
VectorXcd ula_steering(int n, double phase_arg);

/// Kronecker product of the mx- and my-length ULA vectors with the same
/// phase argument; entries all have unit modulus.
VectorXcd upa_steering(int mx, int my, double phase_arg);

/// sin(theta) = y_u / hypot(x_u, y_u), cos(eta) = x_u / hypot(x_u, y_u).
/// UAV at the horizontal origin degenerates to (0, 1) with a warning.
AnglePair bs_uav_angles(const NetworkGeometry& geom);

/// sin(alpha) = (y_k - y_u)/sqrt((z_k - z_u)^2 + (y_k - y_u)^2);
/// cos(beta) = (x_k - x_u)/sqrt((x_k - x_u)^2 + (y_k - y_u)^2) by default,
/// or the literal printed numerator (y_k - y_u) when requested.
AnglePair uav_user_angles(const NetworkGeometry& geom, int k,
                          bool use_printed_cos_beta = false);

/// c0 * (d/d0)^(-alpha). Throws for non-positive distance.
double path_gain(double distance, double alpha, const ChannelParams& params);

/// Rician M x N_BS channel; LoS part is the UPA/ULA steering outer product.
MatrixXcd draw_bs_uav_channel(const NetworkGeometry& geom, const ChannelParams& params,
                              RngStream& rng);

/// Rician M x 1 channel toward user k; LoS steering uses the positive
/// phase sign (conjugate of the arrival convention).
VectorXcd draw_uav_user_channel(const NetworkGeometry& geom, const ChannelParams& params,
                                int k, RngStream& rng);

ChannelRealization draw_channels(const NetworkGeometry& geom, const ChannelParams& params,
                                 RngStream& rng);

}  // namespace aaris

#endif  // AARIS_CHANNEL_HPP
