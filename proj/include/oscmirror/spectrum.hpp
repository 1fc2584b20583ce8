#pragma once

#include <functional>

#include "oscmirror/scenario.hpp"

namespace oscmirror {

/**
 * Detector-plane field envelope in the frame rotating at omega0, at time t
 * for a detector a travel time d_over_c from the emitter: the direct decay
 * front plus the mirror echo carrying the oscillation phase history
 *
 *   E(t) = Theta(u) e^{-(i shift + gamma_eff/2) u}
 *        - Theta(v) e^{i omega0 tau} e^{-(i shift + gamma_eff/2) v}
 *          sum_s J_s(2 k0l0) e^{-i s nu t},
 *
 * with u = t - d_over_c and v = u - tau. n_max < 0 picks the Bessel window
 * for the echo sum.
 */
complexd detector_field(const ScenarioParams& p, double t, int n_max = -1);

/**
 * Output energy density w(t) = |E_D(t)|^2 of a Lorentzian filter
 * (f(s) = Gamma_D e^{-(Gamma_D + i omega_D) s}, s > 0) fed by an arbitrary
 * field sample function, by composite Simpson quadrature between the given
 * breakpoints (field is zero before breakpoints.front()). The result is
 * checked by internal step halving to 1% and the halved-step value returned;
 * failure throws convergence_error. quadrature_dt <= 0 picks a default from
 * the filter setting.
 */
double filtered_field_energy(const std::function<complexd(double)>& field, const FilterSpec& f,
                             double t, double quadrature_dt, std::vector<double> breakpoints);

/** Filter output energy density for the detector field of scenario p. */
double filtered_energy_density(const ScenarioParams& p, const FilterSpec& f, double t,
                               double quadrature_dt = 0.0, int n_max = -1);

/** Filter scan over a grid of settings omega_D at fixed Gamma_D and t,
 * sharing the field samples between settings. */
SpectrumResult filtered_spectrum_scan(const ScenarioParams& p, double Gamma_D, double t,
                                      const FrequencyGrid& omega_D_grid,
                                      double quadrature_dt = 0.0, int n_max = -1,
                                      bool peak_normalize = true);

/** Narrow-filter, long-time closed form of filtered_energy_density: the
 * filter responds with interfering Lorentzian factors at omega_D and
 * omega_D - s nu, under slowly decaying envelopes e^{-Gamma_D (t - ...)}.
 * Valid for Gamma_D well below gamma_eff/2 and t beyond several 1/gamma_eff. */
double filtered_closed_form(const ScenarioParams& p, const FilterSpec& f, double t,
                            int n_max = -1);

/** Carrier and sideband weights of the ideal spectrum comb:
 * b0 = 1 - e^{i omega0 tau} J_0(2 k0l0) and
 * entry(m) = e^{i omega0 tau} e^{-i m nu (tau + d_over_c)} J_m(2 k0l0).
 * m_max < 0 keeps orders until |J_m(2 k0l0)| falls and stays below 1e-8,
 * plus two. */
SidebandTable sideband_strengths(const ScenarioParams& p, int m_max = -1);

/**
 * Ideal (vanishing filter width) emission spectrum: the interfering comb
 *
 *   S(D) = | b0 / (i(D - shift) - gamma_eff/2)
 *           - sum_{m != 0} entry(m) / (i(D - shift - m nu) - gamma_eff/2) |^2,
 *
 * optionally normalized to its maximum on the grid (the raw maximum is kept
 * in peak_raw). Requires gamma_eff > 0.
 */
SpectrumResult spectrum_ideal(const ScenarioParams& p, const FrequencyGrid& grid, int m_max = -1,
                              bool peak_normalize = true);

}  // namespace oscmirror
