#include "oscmirror/bessel.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace oscmirror {

namespace {

/* ascending series sum_k (-1)^k (x/2)^(n+2k) / (k! (n+k)!), used for x <= 2
 * where it converges in a handful of terms with no cancellation trouble */
double series_j(int n, double x) {
  const double h = 0.5 * x;
  double term = 1.0;
  for (int i = 1; i <= n; ++i) term *= h / double(i);
  double sum = term;
  const double h2 = h * h;
  for (int k = 1; k <= 48; ++k) {
    term *= -h2 / (double(k) * double(n + k));
    sum += term;
    if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-30)) break;
  }
  return sum;
}

}  // namespace

BesselOrderRange BesselOrderRange::for_argument(double x) {
  return BesselOrderRange{int(std::ceil(std::abs(x))) + 15};
}

std::vector<double> bessel_j_sequence(int n_max, double x) {
  if (!std::isfinite(x)) throw std::domain_error("bessel_j_sequence: non-finite argument");
  if (x < 0.0) throw std::domain_error("bessel_j_sequence: negative argument");
  if (n_max < 0) throw std::domain_error("bessel_j_sequence: negative order");
  std::vector<double> j(std::size_t(n_max) + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  if (x <= 2.0) {
    for (int n = 0; n <= n_max; ++n) j[std::size_t(n)] = series_j(n, x);
    return j;
  }
  /* Miller's algorithm: run the three-term recurrence downward from an order
   * high enough that the arbitrary seed has been forgotten, then rescale the
   * whole sequence with the closure J0 + 2 sum_k J_2k = 1. */
  const int start = n_max + int(std::ceil(x)) + 26;
  std::vector<double> w(std::size_t(start) + 2, 0.0);
  w[std::size_t(start)] = 1e-30;
  for (int n = start; n > 0; --n) {
    w[std::size_t(n) - 1] = (2.0 * double(n) / x) * w[std::size_t(n)] - w[std::size_t(n) + 1];
    if (std::abs(w[std::size_t(n) - 1]) > 1e250) {
      for (std::size_t i = std::size_t(n) - 1; i < w.size(); ++i) w[i] *= 1e-250;
    }
  }
  double norm = w[0];
  for (int n = 2; n <= start; n += 2) norm += 2.0 * w[std::size_t(n)];
  for (int n = 0; n <= n_max; ++n) j[std::size_t(n)] = w[std::size_t(n)] / norm;
  return j;
}

double bessel_j(int n, double x) {
  if (!std::isfinite(x)) throw std::domain_error("bessel_j: non-finite argument");
  double sign = 1.0;
  if (x < 0.0) {
    x = -x;
    if (n % 2 != 0) sign = -sign;
  }
  if (n < 0) {
    n = -n;
    if (n % 2 != 0) sign = -sign;
  }
  if (x <= 2.0) return sign * series_j(n, x);
  return sign * bessel_j_sequence(n, x)[std::size_t(n)];
}

}  // namespace oscmirror
