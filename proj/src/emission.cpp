#include "oscmirror/emission.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "oscmirror/bessel.hpp"
#include "oscmirror/mirror.hpp"

namespace oscmirror {

std::vector<TimescaleIssue> validate_timescales(const ScenarioParams& p, double ratio) {
  p.validate();
  std::vector<TimescaleIssue> out;
  const bool moving = p.nu > 0.0 || p.k0l0 > 0.0;
  if (!p.omega0_over_gamma) {
    if (moving)
      out.push_back({IssueSeverity::note,
                     "omega0_over_gamma not given; optical scale-separation checks skipped"});
    return out;
  }
  const double w0 = *p.omega0_over_gamma * p.gamma;
  const double lhs = std::max(p.gamma, p.k0l0 * p.nu);
  const double mirror_speed_bound =
      p.k0l0 > 0.0 ? w0 / p.k0l0 : std::numeric_limits<double>::infinity();
  const double rhs = std::min(mirror_speed_bound, w0);
  if (lhs > ratio * rhs) {
    std::ostringstream os;
    os << "scale separation violated: max(gamma, k0l0*nu) = " << lhs << " exceeds " << ratio
       << " * min(omega0/k0l0, omega0) = " << ratio * rhs
       << "; the slowly-varying-envelope treatment is unreliable here";
    out.push_back({IssueSeverity::warning, os.str()});
  }
  return out;
}

ModifiedRates modified_rates(const ScenarioParams& p) {
  p.validate();
  const double j0 = bessel_j(0, 2.0 * p.k0l0);
  return {p.gamma * (1.0 - p.epsilon * j0 * std::cos(p.omega0_tau)),
          -0.5 * p.gamma * p.epsilon * j0 * std::sin(p.omega0_tau)};
}

namespace {

struct DelayKernel {
  double gamma;
  double nu;
  double tau;
  double k0l0;
  complexd feedback;  // eps * (gamma/2) * e^{i omega0 tau}

  complexd mirror_phase(double t) const {
    const double s = std::sin(nu * t) + std::sin(nu * (t - tau));
    return std::polar(1.0, -k0l0 * s);
  }
  complexd operator()(double t, complexd c, complexd delayed, bool active) const {
    complexd rhs = -0.5 * gamma * c;
    if (active) rhs += feedback * mirror_phase(t) * delayed;
    return rhs;
  }
};

}  // namespace

AmplitudeTrace dde_solve(const ScenarioParams& p, const TimeGrid& grid) {
  p.validate();
  grid.validate(p);
  if (grid.t_start != 0.0) throw config_error("dde_solve: grid must start at t = 0");

  double dt = grid.dt;
  std::size_t K = 0;  // delay in steps
  if (p.tau > 0.0) {
    K = std::size_t(std::ceil(p.tau / dt - 1e-12));
    dt = p.tau / double(K);
  }
  const double t_end = grid.t_end();
  const std::size_t n = std::size_t(std::ceil(t_end / dt - 1e-9)) + 1;

  const DelayKernel rhs{p.gamma, p.nu, p.tau, p.k0l0,
                        0.5 * p.gamma * p.epsilon * std::polar(1.0, p.omega0_tau)};
  const bool instantaneous = (K == 0);

  std::vector<complexd> y(n);
  /* per-interval one-sided derivatives for the Hermite midpoint of the
   * delayed argument: fl[i] at the left node of interval i, fr[i] at its
   * right node, both in the regime governing that interval */
  std::vector<complexd> fl(n > 1 ? n - 1 : 0), fr(n > 1 ? n - 1 : 0);
  y[0] = 1.0;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double t = dt * double(i);
    complexd k1, k2, k3, k4;
    if (instantaneous) {
      k1 = rhs(t, y[i], y[i], true);
      const complexd y2 = y[i] + 0.5 * dt * k1;
      k2 = rhs(t + 0.5 * dt, y2, y2, true);
      const complexd y3 = y[i] + 0.5 * dt * k2;
      k3 = rhs(t + 0.5 * dt, y3, y3, true);
      const complexd y4 = y[i] + dt * k3;
      k4 = rhs(t + dt, y4, y4, true);
      y[i + 1] = y[i] + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      fl[i] = k1;
      fr[i] = rhs(t + dt, y[i + 1], y[i + 1], true);
      continue;
    }
    /* the feedback switches on for the step starting at t = tau, so stages of
     * one step never straddle the discontinuity */
    const bool active = i >= K;
    complexd d0 = 0.0, dh = 0.0, d1 = 0.0;
    if (active) {
      const std::size_t q = i - K;  // past interval holding the delayed stage times
      d0 = y[q];
      d1 = y[q + 1];
      dh = 0.5 * (y[q] + y[q + 1]) + 0.125 * dt * (fl[q] - fr[q]);
    }
    k1 = rhs(t, y[i], d0, active);
    k2 = rhs(t + 0.5 * dt, y[i] + 0.5 * dt * k1, dh, active);
    k3 = rhs(t + 0.5 * dt, y[i] + 0.5 * dt * k2, dh, active);
    k4 = rhs(t + dt, y[i] + dt * k3, d1, active);
    y[i + 1] = y[i] + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    fl[i] = k1;
    fr[i] = rhs(t + dt, y[i + 1], active ? y[i + 1 - K] : complexd(0.0), active);
  }

  AmplitudeTrace tr;
  tr.grid = TimeGrid{0.0, dt, n};
  tr.values = Eigen::Map<const Eigen::ArrayXcd>(y.data(), Eigen::Index(n));
  tr.frame = Frame::rotating;
  tr.frame_shift = 0.0;
  return tr;
}

AmplitudeTrace analytic_first_order(const ScenarioParams& p, const TimeGrid& grid, int m_max) {
  p.validate();
  grid.validate(p);
  const double theta = p.nu * p.tau;
  if (m_max < 0) m_max = p.nu == 0.0 ? 0 : pi_factor_order_window(p.k0l0, theta);

  std::vector<complexd> pi(std::size_t(2 * m_max) + 1);
  for (int m = -m_max; m <= m_max; ++m)
    pi[std::size_t(m + m_max)] = pi_factor_sum(m, p.k0l0, theta);

  const complexd pref = p.epsilon * 0.5 * p.gamma * std::polar(1.0, p.omega0_tau);
  const std::size_t n = grid.n_steps;

  AmplitudeTrace tr;
  tr.grid = grid;
  tr.values.resize(Eigen::Index(n));
  tr.frame = Frame::rotating;

  /* sideband phases e^{-i m nu t} advanced by recurrence along the uniform
   * grid; the m-sum is folded into constant + sum_m coef_m e^{-i m nu t} */
  const std::size_t nm = std::size_t(2 * m_max) + 1;
  std::vector<complexd> ph(nm), step(nm), coef(nm);
  complexd fixed = 0.0;
  for (int m = -m_max; m <= m_max; ++m) {
    const std::size_t q = std::size_t(m + m_max);
    ph[q] = std::polar(1.0, -double(m) * p.nu * grid.t_start);
    step[q] = std::polar(1.0, -double(m) * p.nu * grid.dt);
    if (m == 0) {
      coef[q] = 0.0;
      continue;
    }
    const complexd inv = 1.0 / complexd(0.0, double(m) * p.nu);
    coef[q] = -pi[q] * inv;
    fixed += pi[q] * std::polar(1.0, -double(m) * p.nu * p.tau) * inv;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid.t_start + grid.dt * double(i);
    complexd v = std::exp(complexd(-0.5 * p.gamma * t, 0.0));
    if (t >= p.tau) {
      const double u = t - p.tau;
      const double env = std::exp(-0.5 * p.gamma * u);
      complexd mod = pi[std::size_t(m_max)] * u + fixed;
      for (std::size_t q = 0; q < nm; ++q) mod += coef[q] * ph[q];
      v += pref * env * mod;
    }
    tr.values[Eigen::Index(i)] = v;
    for (std::size_t q = 0; q < nm; ++q) ph[q] *= step[q];
  }
  return tr;
}

AmplitudeTrace markov_amplitude(const ScenarioParams& p, const TimeGrid& grid, int n_max) {
  p.validate();
  grid.validate(p);
  const auto rates = modified_rates(p);
  const double z2 = 2.0 * p.k0l0;
  if (n_max < 0) n_max = BesselOrderRange::for_argument(z2).n_max;

  AmplitudeTrace tr;
  tr.grid = grid;
  tr.values.resize(Eigen::Index(grid.n_steps));
  tr.frame = Frame::rotating;
  tr.frame_shift = rates.shift;

  if (p.nu == 0.0 || p.k0l0 == 0.0) {
    const auto t = grid.points();
    tr.values = (-0.5 * rates.gamma_eff * t).exp().cast<complexd>();
    return tr;
  }

  const auto j = bessel_j_sequence(n_max, z2);
  const complexd pref = -p.epsilon * 0.5 * p.gamma * std::polar(1.0, p.omega0_tau);
  for (std::size_t i = 0; i < grid.n_steps; ++i) {
    const double t = grid.t_start + grid.dt * double(i);
    complexd s = 0.0;
    for (int nn = 1; nn <= n_max; ++nn) {
      const complexd em = std::polar(1.0, -double(nn) * p.nu * t);
      const complexd ep = std::conj(em);
      const double parity = (nn % 2 == 0) ? 1.0 : -1.0;
      const complexd denom(0.0, double(nn) * p.nu);
      s += j[std::size_t(nn)] * ((em - 1.0) / denom + parity * (ep - 1.0) / (-denom));
    }
    tr.values[Eigen::Index(i)] = std::exp(complexd(-0.5 * rates.gamma_eff * t, 0.0) + pref * s);
  }
  return tr;
}

}  // namespace oscmirror
