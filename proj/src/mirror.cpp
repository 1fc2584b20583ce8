#include "oscmirror/mirror.hpp"

#include <cmath>
#include <cstdlib>

#include "oscmirror/bessel.hpp"

namespace oscmirror {

complexd pi_factor_sum(int m, double z, double theta, int n_trunc) {
  if (n_trunc < 0) n_trunc = BesselOrderRange::for_argument(z).n_max + std::abs(m);
  const auto j = bessel_j_sequence(n_trunc + std::abs(m), std::abs(z));
  const auto jn = [&](int n) {
    const int a = std::abs(n);
    const double v = a < int(j.size()) ? j[std::size_t(a)] : 0.0;
    return (n < 0 && (a & 1)) ? -v : v;
  };
  complexd sum = 0.0;
  for (int n = -n_trunc; n <= n_trunc; ++n)
    sum += jn(n) * jn(m - n) * std::polar(1.0, double(n) * theta);
  return sum;
}

complexd pi_factor_closed(int m, double z, double theta) {
  const double arg = 2.0 * z * std::cos(0.5 * theta);
  return bessel_j(m, arg) * std::polar(1.0, pi_phase_sign * 0.5 * double(m) * theta);
}

int pi_factor_order_window(double z, double theta, double budget) {
  const double arg = std::abs(2.0 * z * std::cos(0.5 * theta));
  const int hard = BesselOrderRange::for_argument(arg).n_max;
  double total = std::norm(pi_factor_closed(0, z, theta));
  int m = 0;
  while (total < 1.0 - budget && m < hard) {
    ++m;
    total += 2.0 * std::norm(pi_factor_closed(m, z, theta));
  }
  return m;
}

complexd mode_coefficient_a(int n, double k0x, double z) {
  const double jn = bessel_j(n, z);
  if (n % 2 == 0) return complexd(std::sin(k0x) * jn, 0.0);
  return complexd(0.0, -std::cos(k0x) * jn);
}

}  // namespace oscmirror
