#pragma once

#include "oscmirror/scenario.hpp"

namespace oscmirror {

/* Long-time photon-mode amplitudes of the two decay channels. Channel A is
 * the mirror-facing channel (standing-wave modes, weight epsilon of the
 * decay); channel B is the open channel (weight 1 - epsilon). Amplitudes are
 * normalized so |values|^2 integrates over detuning to a probability:
 * channel A carries g_eff = sqrt(eps*gamma/pi), channel B
 * h_eff = sqrt((1-eps)*gamma/(2 pi)). */

/** Open-channel carrier at order epsilon: Lorentzian plus one delayed
 * correction weighted by Pi_0. */
ModeAmplitudeProfile channel_b_carrier(const ScenarioParams& p, const FrequencyGrid& grid);

/** Open-channel sideband family at order epsilon; requires nu > 0 (throws
 * std::domain_error otherwise). m_max < 0 picks the Pi order window. */
ModeAmplitudeProfile channel_b_sidebands(const ScenarioParams& p, const FrequencyGrid& grid,
                                         int m_max = -1);

/** Open channel in the instantaneous-mirror limit: a single Lorentzian of
 * width gamma_eff at the shifted line. Together with channel_a_steady_markov
 * this closes the probability bookkeeping at any epsilon. */
ModeAmplitudeProfile channel_b_steady_markov(const ScenarioParams& p, const FrequencyGrid& grid);

/**
 * Transient mirror-channel amplitude at fixed detuning delta:
 *
 *   c_A(t) = g_eff sum_n A_n(k0x, k0l0)
 *            (e^{(i(delta - shift - n nu) - gamma_eff/2) t} - 1)
 *            / (i(delta - shift - n nu) - gamma_eff/2),
 *
 * in the instantaneous-mirror regime. The detection-mode phase k0x defaults
 * to k0R.
 */
AmplitudeTrace channel_a_time(const ScenarioParams& p, double delta, const TimeGrid& grid,
                              int n_max = -1, std::optional<double> k0x_detection = {});

/** Same transient amplitude as channel_a_time, at fixed time t over a
 * detuning grid. */
ModeAmplitudeProfile channel_a_time_profile(const ScenarioParams& p, double t,
                                            const FrequencyGrid& grid, int n_max = -1);

/** Mirror channel, instantaneous-mirror steady state: a Lorentzian comb of
 * width gamma_eff; even orders carry sin(k0R), odd orders cos(k0R). Requires
 * gamma_eff > 0. */
ModeAmplitudeProfile channel_a_steady_markov(const ScenarioParams& p, const FrequencyGrid& grid,
                                             int n_max = -1);

/** Mirror channel, finite-delay steady state at order epsilon: line widths
 * stay gamma/2 and the mode phase k0R + delta*tau/2 tracks the detuning,
 * which skews the sideband envelope. */
ModeAmplitudeProfile channel_a_steady_nonmarkov(const ScenarioParams& p,
                                                const FrequencyGrid& grid, int m_max = -1);

}  // namespace oscmirror
