// SPDX-License-Identifier: Apache-2.0
#include "aaris/common.hpp"

#include <iostream>
#include <mutex>
#include <set>

namespace aaris {

void warn_once(const std::string& key, const std::string& message) {
  static std::mutex mtx;
  static std::set<std::string> seen;
  std::lock_guard<std::mutex> lock(mtx);
  if (seen.insert(key).second) {
    std::cerr << "[aaris] warning: " << message << "\n";
  }
}

std::uint64_t RngStream::integer(std::uint64_t n) {
  if (n == 0) {
    return 0;
  }
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double RngStream::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  have_spare_ = true;
  return u * factor;
}

}  // namespace aaris
