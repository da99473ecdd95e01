// SPDX-License-Identifier: Apache-2.0
#include "aaris/rsma.hpp"

#include <doctest.h>

#include "aaris/common.hpp"

using namespace aaris;
using std::complex;

namespace {

// From-raw-matrices recomputation with plain scalar loops; the independent
// path the module results are checked against.
struct ScalarOracle {
  static std::vector<complex<double>> effective_row(const VectorXcd& h_r,
                                                    const RisConfig& ris, const MatrixXcd& g) {
    const int m = static_cast<int>(h_r.size());
    const int n = static_cast<int>(g.cols());
    std::vector<complex<double>> row(static_cast<std::size_t>(n), {0.0, 0.0});
    for (int j = 0; j < n; ++j) {
      complex<double> acc{0.0, 0.0};
      for (int i = 0; i < m; ++i) {
        const complex<double> f =
            ris.sel[static_cast<std::size_t>(i)]
                ? ris.amp(i) * complex<double>(std::cos(ris.phase(i)), std::sin(ris.phase(i)))
                : complex<double>(0.0, 0.0);
        acc += std::conj(h_r(i)) * f * g(i, j);
      }
      row[static_cast<std::size_t>(j)] = acc;
    }
    return row;
  }

  static double beam_power(const std::vector<complex<double>>& row, const VectorXcd& w) {
    complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < row.size(); ++j) {
      acc += row[j] * w(static_cast<Eigen::Index>(j));
    }
    return std::norm(acc);
  }

  static double noise_amp(const VectorXcd& h_r, const RisConfig& ris, double sigma_z2) {
    double acc = 0.0;
    for (int i = 0; i < h_r.size(); ++i) {
      const complex<double> f =
          ris.sel[static_cast<std::size_t>(i)]
              ? ris.amp(i) * complex<double>(std::cos(ris.phase(i)), std::sin(ris.phase(i)))
              : complex<double>(0.0, 0.0);
      acc += std::norm(std::conj(h_r(i)) * f);
    }
    return sigma_z2 * acc;
  }
};

BeamformingSet random_beams(int n, int k, RngStream& rng) {
  BeamformingSet bf;
  bf.w_common.resize(n);
  for (int i = 0; i < n; ++i) bf.w_common(i) = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  for (int u = 0; u < k; ++u) {
    VectorXcd w(n);
    for (int i = 0; i < n; ++i) w(i) = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    bf.w_private.push_back(w);
  }
  return bf;
}

RisConfig random_ris(int m, RngStream& rng) {
  RisConfig ris;
  ris.amp.resize(m);
  ris.phase.resize(m);
  ris.sel.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    ris.amp(i) = rng.uniform(0.0, 5.0);
    ris.phase(i) = rng.uniform(0.0, 2.0 * kPi);
    ris.sel[static_cast<std::size_t>(i)] = rng.uniform() < 0.8 ? 1 : 0;
  }
  return ris;
}

ChannelRealization random_channels(int m, int n, int k, RngStream& rng) {
  ChannelRealization chan;
  chan.g.resize(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) chan.g(i, j) = {rng.gaussian(), rng.gaussian()};
  }
  for (int u = 0; u < k; ++u) {
    VectorXcd h(m);
    for (int i = 0; i < m; ++i) h(i) = {rng.gaussian(), rng.gaussian()};
    chan.h_r.push_back(h);
  }
  return chan;
}

}  // namespace

TEST_CASE("effective ris diagonal") {
  RisConfig off = RisConfig::all_on(3, 2.0, 1.0);
  off.sel = {0, 0, 0};
  CHECK(effective_ris_diagonal(off).isZero());

  RisConfig one = RisConfig::all_on(1, 2.0, kPi);
  const VectorXcd d = effective_ris_diagonal(one);
  CHECK(d(0).real() == doctest::Approx(-2.0));
  CHECK(std::abs(d(0).imag()) < 1e-12);

  RisConfig mask = RisConfig::all_on(2, 3.0, 0.4);
  mask.amp(1) = 5.0;
  mask.sel = {1, 0};
  const VectorXcd dm = effective_ris_diagonal(mask);
  CHECK(std::abs(dm(0) - std::polar(3.0, 0.4)) < 1e-12);
  CHECK(dm(1) == complex<double>(0.0, 0.0));

  CHECK(RisConfig::all_on(4).num_on() == 4);
  CHECK(mask.num_on() == 1);
}

TEST_CASE("effective user channel examples") {
  VectorXcd h_r(2);
  h_r << complex<double>(1, 0), complex<double>(0, 1);
  VectorXcd f(2);
  f << complex<double>(2, 0), complex<double>(0, 0);
  MatrixXcd g(2, 1);
  g << complex<double>(1, 0), complex<double>(1, 0);

  // h^H = h_r^H diag(f) G = [1, -j] diag(2, 0) [[1],[1]] = [2]
  const VectorXcd h = effective_user_channel(h_r, f, g);
  CHECK(h.size() == 1);
  CHECK(std::abs(h(0) - complex<double>(2, 0)) < 1e-12);

  const VectorXcd zero = effective_user_channel(h_r, VectorXcd::Zero(2), g);
  CHECK(zero.isZero());

  // scalar all-ones with amplitude a
  VectorXcd h1(1), f1(1);
  MatrixXcd g1(1, 1);
  h1 << complex<double>(1, 0);
  f1 << complex<double>(3.5, 0);
  g1 << complex<double>(1, 0);
  CHECK(std::abs(effective_user_channel(h1, f1, g1)(0) - complex<double>(3.5, 0)) < 1e-12);

  CHECK_THROWS_AS(effective_user_channel(h_r, f, MatrixXcd::Zero(3, 1)),
                  std::invalid_argument);
}

TEST_CASE("identity-channel sinr examples") {
  // K=1, M=N=1, unit channel and unit beams, sigma_z2 = sigma_k2 = 0.5
  BeamformingSet bf;
  bf.w_common = VectorXcd::Ones(1);
  bf.w_private.push_back(VectorXcd::Ones(1));
  VectorXcd h_r = VectorXcd::Ones(1);
  VectorXcd f = VectorXcd::Ones(1);
  VectorXcd h = VectorXcd::Ones(1);

  CHECK(sinr_common(0, bf, h, h_r, f, 0.5, 0.5) == doctest::Approx(0.5));
  CHECK(sinr_private(0, bf, h, h_r, f, 0.5, 0.5) == doctest::Approx(1.0));

  BeamformingSet no_common = bf;
  no_common.w_common = VectorXcd::Zero(1);
  CHECK(sinr_common(0, no_common, h, h_r, f, 0.5, 0.5) == doctest::Approx(0.0));

  BeamformingSet no_private = bf;
  no_private.w_private[0] = VectorXcd::Zero(1);
  CHECK(sinr_private(0, no_private, h, h_r, f, 0.5, 0.5) == doctest::Approx(0.0));

  // the common-SINR interference sum includes i = k unless excluded
  RsmaOptions excl;
  excl.common_sinr_excludes_self = true;
  CHECK(sinr_common(0, bf, h, h_r, f, 0.5, 0.5, excl) == doctest::Approx(1.0));
}

TEST_CASE("rate function") {
  CHECK(rate(0.0) == doctest::Approx(0.0));
  CHECK(rate(1.0) == doctest::Approx(1.0));
  CHECK(rate(3.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(rate(-0.1), std::invalid_argument);
  double prev = rate(0.0);
  for (double s = 0.1; s < 100.0; s *= 2.0) {
    CHECK(rate(s) > prev);
    prev = rate(s);
  }
}

TEST_CASE("common rate split feasibility") {
  VectorXd c0 = VectorXd::Zero(3);
  VectorXd rc0 = VectorXd::Constant(3, 0.5);
  CHECK(common_rate_ok(c0, rc0));

  VectorXd c(2), rc(2);
  c << 0.5, 0.6;
  rc << 1.0, 1.2;
  CHECK_FALSE(common_rate_ok(c, rc));  // 1.1 > 1.0

  c << 0.4, 0.5;
  CHECK(common_rate_ok(c, rc));  // 0.9 <= 1.0
}

TEST_CASE("total rate") {
  RateReport rep;
  rep.c_alloc = VectorXd::Zero(2);
  rep.r_private = VectorXd::Zero(2);
  CHECK(total_rate(rep) == doctest::Approx(0.0));

  rep.c_alloc << 0.4, 0.5;
  rep.r_private << 1.0, 2.0;
  CHECK(total_rate(rep) == doctest::Approx(3.9));
}

TEST_CASE("rate report matches brute-force scalar recomputation") {
  RngStream rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int k_users = 1 + static_cast<int>(rng.integer(3));
    const int m = 1 + static_cast<int>(rng.integer(4));
    const int n = 1 + static_cast<int>(rng.integer(3));
    const double sigma_z2 = rng.uniform(1e-3, 1.0);
    const double sigma_k2 = rng.uniform(1e-3, 1.0);

    const ChannelRealization chan = random_channels(m, n, k_users, rng);
    const BeamformingSet bf = random_beams(n, k_users, rng);
    const RisConfig ris = random_ris(m, rng);
    VectorXd c_alloc(k_users);
    for (int k = 0; k < k_users; ++k) c_alloc(k) = rng.uniform(0.0, 2.0);

    const RateReport rep =
        compute_rate_report(bf, chan, ris, c_alloc, sigma_z2, sigma_k2);

    double total = 0.0;
    for (int k = 0; k < k_users; ++k) {
      const auto& h_r = chan.h_r[static_cast<std::size_t>(k)];
      const auto row = ScalarOracle::effective_row(h_r, ris, chan.g);
      const double noise = ScalarOracle::noise_amp(h_r, ris, sigma_z2) + sigma_k2;

      double interf_all = 0.0;
      for (int i = 0; i < k_users; ++i) {
        interf_all +=
            ScalarOracle::beam_power(row, bf.w_private[static_cast<std::size_t>(i)]);
      }
      const double sig_c = ScalarOracle::beam_power(row, bf.w_common);
      const double gamma_c = sig_c / (interf_all + noise);
      const double sig_p =
          ScalarOracle::beam_power(row, bf.w_private[static_cast<std::size_t>(k)]);
      const double gamma_p = sig_p / (interf_all - sig_p + noise);

      CHECK(rep.sinr_common(k) == doctest::Approx(gamma_c).epsilon(1e-12));
      CHECK(rep.sinr_private(k) == doctest::Approx(gamma_p).epsilon(1e-12));
      total += c_alloc(k) + std::log2(1.0 + gamma_p);
    }
    CHECK(rep.r_total == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("scaling beamformers raises every sinr") {
  RngStream rng(99);
  const int k_users = 2, m = 3, n = 2;
  const ChannelRealization chan = random_channels(m, n, k_users, rng);
  const BeamformingSet bf = random_beams(n, k_users, rng);
  const RisConfig ris = random_ris(m, rng);
  const VectorXd c_alloc = VectorXd::Zero(k_users);

  const RateReport base = compute_rate_report(bf, chan, ris, c_alloc, 0.1, 0.1);
  BeamformingSet scaled = bf;
  scaled.w_common *= 2.0;
  for (auto& w : scaled.w_private) w *= 2.0;
  const RateReport big = compute_rate_report(scaled, chan, ris, c_alloc, 0.1, 0.1);
  for (int k = 0; k < k_users; ++k) {
    CHECK(big.sinr_common(k) > base.sinr_common(k));
    CHECK(big.sinr_private(k) > base.sinr_private(k));
  }
}

TEST_CASE("switching one element off subtracts its rank-one contribution") {
  RngStream rng(31);
  const int k_users = 1, m = 4, n = 2;
  const ChannelRealization chan = random_channels(m, n, k_users, rng);
  RisConfig ris = random_ris(m, rng);
  ris.sel = {1, 1, 1, 1};

  const VectorXcd h_on =
      effective_user_channel(chan.h_r[0], effective_ris_diagonal(ris), chan.g);
  ris.sel[2] = 0;
  const VectorXcd h_off =
      effective_user_channel(chan.h_r[0], effective_ris_diagonal(ris), chan.g);

  // contribution of element 2: conj(h_r[2]) * f[2] * g.row(2)
  const complex<double> f2 = std::polar(ris.amp(2), ris.phase(2));
  for (int j = 0; j < n; ++j) {
    const complex<double> contrib = std::conj(chan.h_r[0](2)) * f2 * chan.g(2, j);
    // h is the conjugated column: h(j) = conj(h^H(j))
    CHECK(std::abs((h_on(j) - h_off(j)) - std::conj(contrib)) < 1e-12);
  }
}

TEST_CASE("common sinr upper bound and single-user private denominator") {
  RngStream rng(17);
  const int m = 2, n = 2;
  const ChannelRealization chan = random_channels(m, n, 1, rng);
  const BeamformingSet bf = random_beams(n, 1, rng);
  const RisConfig ris = random_ris(m, rng);
  const VectorXcd f = effective_ris_diagonal(ris);
  const VectorXcd h = effective_user_channel(chan.h_r[0], f, chan.g);
  const double sigma_k2 = 0.3;

  const double gc = sinr_common(0, bf, h, chan.h_r[0], f, 0.2, sigma_k2);
  const double bound = std::norm(h.dot(bf.w_common)) / sigma_k2;
  CHECK(gc <= bound + 1e-12);

  // K = 1: private interference sum is empty
  const double gp = sinr_private(0, bf, h, chan.h_r[0], f, 0.2, sigma_k2);
  const auto row = ScalarOracle::effective_row(chan.h_r[0], ris, chan.g);
  const double expected = ScalarOracle::beam_power(row, bf.w_private[0]) /
                          (ScalarOracle::noise_amp(chan.h_r[0], ris, 0.2) + sigma_k2);
  CHECK(gp == doctest::Approx(expected).epsilon(1e-12));
}
