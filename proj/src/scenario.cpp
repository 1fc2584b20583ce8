#include "oscmirror/scenario.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace oscmirror {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw config_error(std::string(name) + " must be finite");
}

}  // namespace

double ScenarioParams::derived_phase(double k0R) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double phase = std::fmod(2.0 * k0R, two_pi);
  if (phase < 0.0) phase += two_pi;
  return phase;
}

void ScenarioParams::validate() const {
  require_finite(gamma, "gamma");
  require_finite(epsilon, "epsilon");
  require_finite(nu, "nu");
  require_finite(tau, "tau");
  require_finite(k0l0, "k0l0");
  require_finite(k0R, "k0R");
  require_finite(omega0_tau, "omega0_tau");
  require_finite(d_over_c, "d_over_c");
  if (gamma <= 0.0) throw config_error("gamma must be > 0");
  if (epsilon < 0.0 || epsilon > 1.0) {
    std::ostringstream os;
    os << "epsilon must lie in [0, 1] (got " << epsilon << ")";
    throw config_error(os.str());
  }
  if (nu < 0.0) throw config_error("nu must be >= 0");
  if (tau < 0.0) throw config_error("tau must be >= 0");
  if (k0l0 < 0.0) throw config_error("k0l0 must be >= 0");
  if (k0R < 0.0) throw config_error("k0R must be >= 0");
  if (d_over_c < 0.0) throw config_error("d_over_c must be >= 0");
  if (omega0_over_gamma && *omega0_over_gamma <= 0.0)
    throw config_error("omega0_over_gamma must be > 0 when given");
}

Eigen::ArrayXd TimeGrid::points() const {
  Eigen::ArrayXd t(n_steps);
  for (std::size_t i = 0; i < n_steps; ++i) t[Eigen::Index(i)] = t_start + dt * double(i);
  return t;
}

void TimeGrid::validate(const ScenarioParams& p) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw config_error("time_grid: dt must be > 0");
  if (n_steps < 2) throw config_error("time_grid: n_steps must be >= 2");
  if (!std::isfinite(t_start) || t_start < 0.0)
    throw config_error("time_grid: t_start must be >= 0");
  const double dt_osc = 0.05 / std::max(p.nu, p.gamma);
  if (dt > dt_osc * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time_grid: dt = " << dt << " too coarse; need dt <= 0.05/max(nu, gamma) = " << dt_osc;
    throw config_error(os.str());
  }
  if (p.tau > 0.0 && dt > p.tau / 50.0 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time_grid: dt = " << dt << " too coarse; need dt <= tau/50 = " << p.tau / 50.0;
    throw config_error(os.str());
  }
}

Eigen::ArrayXd FrequencyGrid::points() const {
  Eigen::ArrayXd w(n_points);
  if (n_points == 1) {
    w[0] = omega_min;
    return w;
  }
  const double step = (omega_max - omega_min) / double(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) w[Eigen::Index(i)] = omega_min + step * double(i);
  return w;
}

void FrequencyGrid::validate() const {
  if (!std::isfinite(omega_min) || !std::isfinite(omega_max))
    throw config_error("frequency_grid: bounds must be finite");
  if (n_points < 1) throw config_error("frequency_grid: n_points must be >= 1");
  if (n_points > 1 && !(omega_max > omega_min))
    throw config_error("frequency_grid: omega_max must exceed omega_min");
}

double profile_probability(const ModeAmplitudeProfile& prof) {
  const auto w = prof.grid.points();
  const Eigen::ArrayXd p = prof.values.abs2();
  double acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < p.size(); ++i)
    acc += 0.5 * (p[i] + p[i + 1]) * (w[i + 1] - w[i]);
  return acc;
}

void FilterSpec::validate() const {
  if (!std::isfinite(omega_D)) throw config_error("filter: omega_D must be finite");
  if (!(Gamma_D > 0.0) || !std::isfinite(Gamma_D))
    throw config_error("filter: Gamma_D must be > 0");
}

}  // namespace oscmirror
