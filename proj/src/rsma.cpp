// SPDX-License-Identifier: Apache-2.0
#include "aaris/rsma.hpp"

#include <complex>
#include <stdexcept>

namespace aaris {

namespace {

// Amplified-noise power reaching user k: sigma_z^2 * ||h_{r,k}^H diag(f')||^2.
double ris_noise_power(const VectorXcd& h_r_k, const VectorXcd& f_prime, double sigma_z2) {
  double acc = 0.0;
  for (int m = 0; m < h_r_k.size(); ++m) {
    acc += std::norm(std::conj(h_r_k(m)) * f_prime(m));
  }
  return sigma_z2 * acc;
}

double beam_power_at(const VectorXcd& h_k, const VectorXcd& w) {
  const std::complex<double> x = h_k.dot(w);  // h_k^H w
  return std::norm(x);
}

}  // namespace

int RisConfig::num_on() const {
  int n = 0;
  for (auto b : sel) n += (b != 0);
  return n;
}

RisConfig RisConfig::all_on(int m, double amplitude, double phase_rad) {
  RisConfig r;
  r.amp = VectorXd::Constant(m, amplitude);
  r.phase = VectorXd::Constant(m, phase_rad);
  r.sel.assign(static_cast<std::size_t>(m), 1);
  return r;
}

double BeamformingSet::transmit_power() const {
  double acc = w_common.squaredNorm();
  for (const auto& w : w_private) acc += w.squaredNorm();
  return acc;
}

VectorXcd effective_ris_diagonal(const RisConfig& ris) {
  const int m = ris.size();
  if (ris.amp.size() != m || ris.phase.size() != m)
    throw std::invalid_argument("RisConfig: amp/phase/sel sizes disagree");
  VectorXcd d(m);
  for (int i = 0; i < m; ++i) {
    d(i) = ris.sel[static_cast<std::size_t>(i)]
               ? std::polar(ris.amp(i), ris.phase(i))
               : std::complex<double>(0.0, 0.0);
  }
  return d;
}

VectorXcd effective_user_channel(const VectorXcd& h_r_k, const VectorXcd& f_prime,
                                 const MatrixXcd& g) {
  if (h_r_k.size() != f_prime.size() || g.rows() != h_r_k.size())
    throw std::invalid_argument("effective_user_channel: dimension mismatch");
  // h_k^H = h_r^H diag(f') G; return the column h_k = (h_k^H)^H.
  const Eigen::RowVectorXcd row =
      h_r_k.adjoint() * f_prime.asDiagonal() * g;
  return row.adjoint();
}

double sinr_common(int k, const BeamformingSet& bf, const VectorXcd& h_k,
                   const VectorXcd& h_r_k, const VectorXcd& f_prime, double sigma_z2,
                   double sigma_k2, const RsmaOptions& opts) {
  if (sigma_k2 <= 0.0) throw std::invalid_argument("sinr_common: sigma_k2 must be positive");
  const double signal = beam_power_at(h_k, bf.w_common);
  double interference = 0.0;
  for (int i = 0; i < bf.num_users(); ++i) {
    if (opts.common_sinr_excludes_self && i == k) continue;
    interference += beam_power_at(h_k, bf.w_private[static_cast<std::size_t>(i)]);
  }
  const double noise = ris_noise_power(h_r_k, f_prime, sigma_z2) + sigma_k2;
  return signal / (interference + noise);
}

double sinr_private(int k, const BeamformingSet& bf, const VectorXcd& h_k,
                    const VectorXcd& h_r_k, const VectorXcd& f_prime, double sigma_z2,
                    double sigma_k2) {
  if (sigma_k2 <= 0.0) throw std::invalid_argument("sinr_private: sigma_k2 must be positive");
  const double signal = beam_power_at(h_k, bf.w_private.at(static_cast<std::size_t>(k)));
  double interference = 0.0;
  for (int i = 0; i < bf.num_users(); ++i) {
    if (i == k) continue;
    interference += beam_power_at(h_k, bf.w_private[static_cast<std::size_t>(i)]);
  }
  const double noise = ris_noise_power(h_r_k, f_prime, sigma_z2) + sigma_k2;
  return signal / (interference + noise);
}

double rate(double sinr) {
  if (sinr < 0.0) throw std::invalid_argument("rate: sinr must be >= 0");
  return std::log2(1.0 + sinr);
}

bool common_rate_ok(const VectorXd& c_alloc, const VectorXd& r_common) {
  if (c_alloc.size() != r_common.size())
    throw std::invalid_argument("common_rate_ok: size mismatch");
  return c_alloc.sum() <= r_common.minCoeff() + 1e-12;
}

double total_rate(const RateReport& report) {
  return (report.c_alloc + report.r_private).sum();
}

RateReport compute_rate_report(const BeamformingSet& bf, const ChannelRealization& chan,
                               const RisConfig& ris, const VectorXd& c_alloc,
                               double sigma_z2, double sigma_k2, const RsmaOptions& opts) {
  const int k_users = static_cast<int>(chan.h_r.size());
  if (bf.num_users() != k_users || c_alloc.size() != k_users)
    throw std::invalid_argument("compute_rate_report: user-count mismatch");
  const VectorXcd f_prime = effective_ris_diagonal(ris);

  RateReport rep;
  rep.sinr_common.resize(k_users);
  rep.sinr_private.resize(k_users);
  rep.r_common.resize(k_users);
  rep.r_private.resize(k_users);
  rep.c_alloc = c_alloc;
  for (int k = 0; k < k_users; ++k) {
    const VectorXcd& h_r_k = chan.h_r[static_cast<std::size_t>(k)];
    const VectorXcd h_k = effective_user_channel(h_r_k, f_prime, chan.g);
    rep.sinr_common(k) = sinr_common(k, bf, h_k, h_r_k, f_prime, sigma_z2, sigma_k2, opts);
    rep.sinr_private(k) = sinr_private(k, bf, h_k, h_r_k, f_prime, sigma_z2, sigma_k2);
    rep.r_common(k) = rate(rep.sinr_common(k));
    rep.r_private(k) = rate(rep.sinr_private(k));
  }
  rep.r_total = total_rate(rep);
  return rep;
}

}  // namespace aaris
