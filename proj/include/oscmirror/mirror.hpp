#pragma once

#include <complex>

namespace oscmirror {

using complexd = std::complex<double>;

/* Fourier weights of the two-time mirror phase factor,
 *
 *   Pi_m(z, theta) = sum_n J_n(z) J_{m-n}(z) e^{i n theta},
 *
 * where z = k0*l0 and theta = nu*tau. Two independent evaluation routes are
 * kept on purpose: the literal convolution sum and the closed form
 * J_m(2 z cos(theta/2)) e^{i m theta/2}; tests cross-check them against each
 * other. The phase sign in the closed form is pinned by that comparison at
 * (z, theta) = (1.0, 0.5). */

inline constexpr double pi_phase_sign = 1.0;

/** Convolution-sum route; n_trunc < 0 picks the order window automatically. */
complexd pi_factor_sum(int m, double z, double theta, int n_trunc = -1);

/** Closed-form route. */
complexd pi_factor_closed(int m, double z, double theta);

/** Smallest M with sum_{|m| > M} |Pi_m|^2 < budget (the total is 1). */
int pi_factor_order_window(double z, double theta, double budget = 1e-10);

/**
 * Standing-wave expansion coefficient of the mirror-side mode at optical
 * phase position k0x:
 *
 *   A_n(k0x, z) = (1/2i) (e^{i k0x} - (-1)^n e^{-i k0x}) J_n(z)
 *               = sin(k0x) J_n(z)        (n even)
 *               = -i cos(k0x) J_n(z)     (n odd).
 */
complexd mode_coefficient_a(int n, double k0x, double z);

}  // namespace oscmirror
