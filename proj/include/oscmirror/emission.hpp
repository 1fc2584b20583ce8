#pragma once

#include "oscmirror/scenario.hpp"

namespace oscmirror {

/**
 * Scale-separation checks behind the model: max(gamma, k0l0*nu) must stay
 * below ratio * min(omega0/k0l0, omega0). Both right-hand entries need the
 * optical frequency; when omega0_over_gamma is absent and the mirror moves, a
 * note (not a warning) says the check was skipped.
 */
std::vector<TimescaleIssue> validate_timescales(const ScenarioParams& p, double ratio = 0.1);

ModifiedRates modified_rates(const ScenarioParams& p);

/**
 * Excited-state amplitude in the frame rotating at omega0, integrating
 *
 *   dc/dt = -(gamma/2) [ c(t) - eps e^{i omega0 tau} e^{-i k0l0 (sin nu t + sin nu (t-tau))}
 *                              c(t - tau) Theta(t - tau) ]
 *
 * with classical RK4 by the method of steps. dt is shrunk so the delay is an
 * integer number of steps (the returned trace carries the adjusted grid);
 * midpoint stage values of the delayed argument come from cubic Hermite
 * interpolation of the stored solution. Requires t_start = 0. tau = 0 is the
 * instantaneous limit and integrates the corresponding ODE on the grid as
 * given.
 */
AmplitudeTrace dde_solve(const ScenarioParams& p, const TimeGrid& grid);

/**
 * Order-epsilon solution: free decay plus one delayed echo, carrier weight
 * Pi_0 and sidebands Pi_m. m_max < 0 picks the Pi order window; nu = 0 uses
 * the static-mirror expression.
 */
AmplitudeTrace analytic_first_order(const ScenarioParams& p, const TimeGrid& grid,
                                    int m_max = -1);

/**
 * Instantaneous-mirror (Markov) amplitude
 *
 *   c(t) = e^{-gamma_eff t / 2} exp{ -eps (gamma/2) e^{i omega0 tau}
 *            sum_{n != 0} J_n(2 k0l0) (e^{-i n nu t} - 1)/(i n nu) },
 *
 * returned without the slow carrier e^{-i shift t}; the dropped shift is
 * recorded as frame_shift on the trace. n_max < 0 picks the Bessel window.
 */
AmplitudeTrace markov_amplitude(const ScenarioParams& p, const TimeGrid& grid, int n_max = -1);

}  // namespace oscmirror
