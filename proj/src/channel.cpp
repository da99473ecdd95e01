// SPDX-License-Identifier: Apache-2.0
#include "aaris/channel.hpp"

#include <complex>
#include <stdexcept>

namespace aaris {

namespace {

constexpr double kDegenerateTol = 1e-9;  // meters of horizontal separation

// Independent standard complex Gaussian entries, CN(0, 1): real and
// imaginary parts each N(0, 1/2).
std::complex<double> complex_gaussian(RngStream& rng) {
  const double scale = std::sqrt(0.5);
  const double re = scale * rng.gaussian();
  const double im = scale * rng.gaussian();
  return {re, im};
}

}  // namespace

void ChannelParams::validate() const {
  if (c0 <= 0.0) throw std::invalid_argument("ChannelParams: c0 must be positive");
  if (d0 <= 0.0) throw std::invalid_argument("ChannelParams: d0 must be positive");
  if (alpha_bs_u < 0.0 || alpha_u_k < 0.0)
    throw std::invalid_argument("ChannelParams: path-loss exponents must be >= 0");
  if (k_bs_u < 0.0 || k_u_k < 0.0)
    throw std::invalid_argument("ChannelParams: Rician factors must be >= 0");
  if (mx < 1 || my < 1) throw std::invalid_argument("ChannelParams: mx, my must be >= 1");
  if (n_bs < 1) throw std::invalid_argument("ChannelParams: n_bs must be >= 1");
}

VectorXcd ula_steering(int n, double phase_arg) {
  if (n < 1) throw std::invalid_argument("ula_steering: n must be >= 1");
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = std::polar(1.0, -phase_arg * static_cast<double>(i));
  }
  return v;
}

VectorXcd upa_steering(int mx, int my, double phase_arg) {
  if (mx < 1 || my < 1) throw std::invalid_argument("upa_steering: counts must be >= 1");
  const VectorXcd ax = ula_steering(mx, phase_arg);
  const VectorXcd ay = ula_steering(my, phase_arg);
  VectorXcd v(mx * my);
  for (int i = 0; i < mx; ++i) {
    for (int j = 0; j < my; ++j) {
      v(i * my + j) = ax(i) * ay(j);
    }
  }
  return v;
}

AnglePair bs_uav_angles(const NetworkGeometry& geom) {
  const double xu = geom.uav_pos.x();
  const double yu = geom.uav_pos.y();
  const double hyp = std::hypot(xu, yu);
  if (hyp < kDegenerateTol) {
    warn_once("bs_uav_angles_degenerate",
              "UAV at the horizontal origin; using angles (0, 1)");
    return {0.0, 1.0};
  }
  return {yu / hyp, xu / hyp};
}

AnglePair uav_user_angles(const NetworkGeometry& geom, int k, bool use_printed_cos_beta) {
  if (k < 0 || k >= geom.num_users())
    throw std::invalid_argument("uav_user_angles: user index out of range");
  const Vector3d& qk = geom.user_pos[static_cast<std::size_t>(k)];
  const double dx = qk.x() - geom.uav_pos.x();
  const double dy = qk.y() - geom.uav_pos.y();
  const double dz = qk.z() - geom.uav_pos.z();
  const double horiz = std::hypot(dx, dy);
  if (horiz < kDegenerateTol) {
    warn_once("uav_user_angles_degenerate",
              "user horizontally coincident with UAV; using angles (0, 1)");
    return {0.0, 1.0};
  }
  const double sin_alpha = dy / std::sqrt(dz * dz + dy * dy);
  const double cos_beta = (use_printed_cos_beta ? dy : dx) / horiz;
  return {sin_alpha, cos_beta};
}

double path_gain(double distance, double alpha, const ChannelParams& params) {
  if (distance <= 0.0) throw std::invalid_argument("path_gain: distance must be positive");
  return params.c0 * std::pow(distance / params.d0, -alpha);
}

MatrixXcd draw_bs_uav_channel(const NetworkGeometry& geom, const ChannelParams& params,
                              RngStream& rng) {
  const int m = params.m();
  const int n = params.n_bs;
  const double dist = (geom.bs_pos - geom.uav_pos).norm();
  const double gain = path_gain(dist, params.alpha_bs_u, params);
  const AnglePair ang = bs_uav_angles(geom);
  const double phase_arg = params.zeta_phase * ang.sin_vert * ang.cos_horz;

  const VectorXcd aoa = upa_steering(params.mx, params.my, phase_arg);
  const VectorXcd aod = ula_steering(n, phase_arg);
  const MatrixXcd los = aoa * aod.transpose();  // plain transpose, per the model

  MatrixXcd nlos(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      nlos(i, j) = complex_gaussian(rng);
    }
  }

  const double k = params.k_bs_u;
  const double w_los = std::sqrt(k / (k + 1.0));
  const double w_nlos = std::sqrt(1.0 / (k + 1.0));
  return std::sqrt(gain) * (w_los * los + w_nlos * nlos);
}

VectorXcd draw_uav_user_channel(const NetworkGeometry& geom, const ChannelParams& params,
                                int k, RngStream& rng) {
  const int m = params.m();
  const Vector3d& qk = geom.user_pos.at(static_cast<std::size_t>(k));
  const double dist = (geom.uav_pos - qk).norm();
  const double gain = path_gain(dist, params.alpha_u_k, params);
  const AnglePair ang = uav_user_angles(geom, k, params.use_printed_cos_beta);
  // Departure steering carries the positive phase sign, so negate the
  // argument of the shared arrival-convention helper.
  const double phase_arg = -params.zeta_phase * ang.sin_vert * ang.cos_horz;
  const VectorXcd los = upa_steering(params.mx, params.my, phase_arg);

  VectorXcd nlos(m);
  for (int i = 0; i < m; ++i) {
    nlos(i) = complex_gaussian(rng);
  }

  const double kf = params.k_u_k;
  const double w_los = std::sqrt(kf / (kf + 1.0));
  const double w_nlos = std::sqrt(1.0 / (kf + 1.0));
  return std::sqrt(gain) * (w_los * los + w_nlos * nlos);
}

ChannelRealization draw_channels(const NetworkGeometry& geom, const ChannelParams& params,
                                 RngStream& rng) {
  ChannelRealization out;
  out.g = draw_bs_uav_channel(geom, params, rng);
  out.h_r.reserve(static_cast<std::size_t>(geom.num_users()));
  for (int k = 0; k < geom.num_users(); ++k) {
    out.h_r.push_back(draw_uav_user_channel(geom, params, k, rng));
  }
  return out;
}

}  // namespace aaris
