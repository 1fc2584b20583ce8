#pragma once

#include <vector>

namespace oscmirror {

/** Truncation window for Bessel-weighted series. Orders beyond
 * ceil(|x|) + 15 fall super-exponentially (below ~1e-8 at x = 12, far less
 * for the smaller arguments typical here), negligible at the accuracy
 * targets of the consumers. */
struct BesselOrderRange {
  int n_max = 0;
  static BesselOrderRange for_argument(double x);
};

/**
 * Bessel function of the first kind, integer order n (any sign), real finite
 * x. Ascending power series for |x| <= 2, Miller downward recurrence
 * normalized with J0 + 2*sum J_2k = 1 otherwise. Absolute accuracy 1e-12 for
 * |n| <= 40, |x| <= 12. Throws std::domain_error on non-finite x.
 */
double bessel_j(int n, double x);

/** J_0(x) .. J_n_max(x) in one pass; requires x >= 0. */
std::vector<double> bessel_j_sequence(int n_max, double x);

}  // namespace oscmirror
