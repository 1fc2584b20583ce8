#include "oscmirror/field_populations.hpp"

#include <cmath>
#include <numbers>

#include "oscmirror/bessel.hpp"
#include "oscmirror/emission.hpp"
#include "oscmirror/mirror.hpp"

namespace oscmirror {

namespace {

double g_eff(const ScenarioParams& p) { return std::sqrt(p.epsilon * p.gamma / std::numbers::pi); }

double h_eff(const ScenarioParams& p) {
  return std::sqrt((1.0 - p.epsilon) * p.gamma / (2.0 * std::numbers::pi));
}

constexpr complexd I{0.0, 1.0};

}  // namespace

ModeAmplitudeProfile channel_b_carrier(const ScenarioParams& p, const FrequencyGrid& grid) {
  p.validate();
  grid.validate();
  const double h = h_eff(p);
  const complexd pi0 = pi_factor_sum(0, p.k0l0, p.nu * p.tau);
  const auto d = grid.points();

  ModeAmplitudeProfile prof;
  prof.grid = grid;
  prof.channel = Channel::b;
  prof.regime = Regime::non_markovian;
  prof.values.resize(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const complexd denom = 0.5 * p.gamma - I * d[i];
    const complexd phase = std::polar(1.0, p.omega0_tau + d[i] * p.tau);
    prof.values[i] = h * (1.0 / denom + p.epsilon * 0.5 * p.gamma * pi0 * phase / (denom * denom));
  }
  return prof;
}

ModeAmplitudeProfile channel_b_sidebands(const ScenarioParams& p, const FrequencyGrid& grid,
                                         int m_max) {
  p.validate();
  grid.validate();
  if (p.nu <= 0.0)
    throw std::domain_error("channel_b_sidebands: nu must be > 0 (no sidebands for a static mirror)");
  const double theta = p.nu * p.tau;
  if (m_max < 0) m_max = pi_factor_order_window(p.k0l0, theta);
  const double h = h_eff(p);
  const auto d = grid.points();

  ModeAmplitudeProfile prof;
  prof.grid = grid;
  prof.channel = Channel::b;
  prof.regime = Regime::non_markovian;
  prof.values.setZero(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    complexd acc = 0.0;
    for (int m = -m_max; m <= m_max; ++m) {
      if (m == 0) continue;
      const complexd pim = pi_factor_sum(m, p.k0l0, theta);
      const complexd phase = std::polar(1.0, p.omega0_tau + (d[i] - double(m) * p.nu) * p.tau);
      const complexd shifted = 0.5 * p.gamma - I * (d[i] - double(m) * p.nu);
      const complexd central = 0.5 * p.gamma - I * d[i];
      acc += pim / (2.0 * I * double(m)) * (phase / shifted - phase / central);
    }
    prof.values[i] = h * p.epsilon * (p.gamma / p.nu) * acc;
  }
  return prof;
}

ModeAmplitudeProfile channel_b_steady_markov(const ScenarioParams& p, const FrequencyGrid& grid) {
  p.validate();
  grid.validate();
  const auto rates = modified_rates(p);
  if (!(rates.gamma_eff > 0.0))
    throw config_error("channel_b_steady_markov: gamma_eff must be > 0");
  const double h = h_eff(p);
  const auto d = grid.points();

  ModeAmplitudeProfile prof;
  prof.grid = grid;
  prof.channel = Channel::b;
  prof.regime = Regime::markovian;
  prof.values.resize(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    prof.values[i] = h / (0.5 * rates.gamma_eff - I * (d[i] - rates.shift));
  return prof;
}

namespace {

/* (e^{x t} - 1)/x with the x -> 0 limit t */
complexd expm1_over(complexd x, double t) {
  if (std::abs(x) * t < 1e-8) return t * (1.0 + 0.5 * x * t);
  return (std::exp(x * t) - 1.0) / x;
}

complexd channel_a_transient_value(const ScenarioParams& p, const ModifiedRates& rates,
                                   double delta, double t, int n_max, double k0x) {
  const double g = g_eff(p);
  complexd acc = 0.0;
  for (int nn = -n_max; nn <= n_max; ++nn) {
    const complexd an = mode_coefficient_a(nn, k0x, p.k0l0);
    const complexd x = I * (delta - rates.shift - double(nn) * p.nu) - 0.5 * rates.gamma_eff;
    acc += an * expm1_over(x, t);
  }
  return g * acc;
}

}  // namespace

AmplitudeTrace channel_a_time(const ScenarioParams& p, double delta, const TimeGrid& grid,
                              int n_max, std::optional<double> k0x_detection) {
  p.validate();
  const auto rates = modified_rates(p);
  if (n_max < 0) n_max = BesselOrderRange::for_argument(p.k0l0).n_max;
  const double k0x = k0x_detection.value_or(p.k0R);

  AmplitudeTrace tr;
  tr.grid = grid;
  tr.frame = Frame::rotating;
  tr.frame_shift = 0.0;
  tr.values.resize(Eigen::Index(grid.n_steps));
  for (std::size_t i = 0; i < grid.n_steps; ++i) {
    const double t = grid.t_start + grid.dt * double(i);
    tr.values[Eigen::Index(i)] = channel_a_transient_value(p, rates, delta, t, n_max, k0x);
  }
  return tr;
}

ModeAmplitudeProfile channel_a_time_profile(const ScenarioParams& p, double t,
                                            const FrequencyGrid& grid, int n_max) {
  p.validate();
  grid.validate();
  const auto rates = modified_rates(p);
  if (n_max < 0) n_max = BesselOrderRange::for_argument(p.k0l0).n_max;
  const auto d = grid.points();

  ModeAmplitudeProfile prof;
  prof.grid = grid;
  prof.channel = Channel::a;
  prof.regime = Regime::markovian;
  prof.values.resize(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    prof.values[i] = channel_a_transient_value(p, rates, d[i], t, n_max, p.k0R);
  return prof;
}

ModeAmplitudeProfile channel_a_steady_markov(const ScenarioParams& p, const FrequencyGrid& grid,
                                             int n_max) {
  p.validate();
  grid.validate();
  const auto rates = modified_rates(p);
  if (!(rates.gamma_eff > 0.0))
    throw config_error("channel_a_steady_markov: gamma_eff must be > 0");
  if (n_max < 0) n_max = BesselOrderRange::for_argument(p.k0l0).n_max;
  const double g = g_eff(p);
  const auto d = grid.points();

  ModeAmplitudeProfile prof;
  prof.grid = grid;
  prof.channel = Channel::a;
  prof.regime = Regime::markovian;
  prof.values.setZero(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    complexd acc = 0.0;
    for (int nn = -n_max; nn <= n_max; ++nn) {
      const complexd an = mode_coefficient_a(nn, p.k0R, p.k0l0);
      acc += an / (I * (d[i] - rates.shift - double(nn) * p.nu) - 0.5 * rates.gamma_eff);
    }
    prof.values[i] = -g * acc;
  }
  return prof;
}

ModeAmplitudeProfile channel_a_steady_nonmarkov(const ScenarioParams& p,
                                                const FrequencyGrid& grid, int m_max) {
  p.validate();
  grid.validate();
  if (m_max < 0) m_max = BesselOrderRange::for_argument(p.k0l0).n_max;
  const double g = g_eff(p);
  const complexd pi0 = pi_factor_sum(0, p.k0l0, p.nu * p.tau);
  const auto d = grid.points();

  ModeAmplitudeProfile prof;
  prof.grid = grid;
  prof.channel = Channel::a;
  prof.regime = Regime::non_markovian;
  prof.values.setZero(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    /* the mode phase tracks the detuning: k x = k0 R + delta tau / 2 */
    const double phase = p.k0R + 0.5 * d[i] * p.tau;
    complexd acc = 0.0;
    for (int m = -m_max; m <= m_max; ++m) {
      const complexd am = mode_coefficient_a(m, phase, p.k0l0);
      const complexd denom = I * (d[i] - double(m) * p.nu) - 0.5 * p.gamma;
      const complexd echo = std::polar(1.0, p.omega0_tau + (d[i] - double(m) * p.nu) * p.tau);
      acc += am * (-1.0 / denom + p.epsilon * 0.5 * p.gamma * pi0 * echo / (denom * denom));
    }
    prof.values[i] = g * acc;
  }
  return prof;
}

}  // namespace oscmirror
