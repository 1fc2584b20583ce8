#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "oscmirror/bessel.hpp"
#include "oscmirror/emission.hpp"
#include "oscmirror/spectrum.hpp"

using namespace oscmirror;

namespace {

constexpr double pi = std::numbers::pi;
constexpr complexd I{0.0, 1.0};

/* half the first roots of J_1 and J_0: oscillation amplitudes that null one
 * reflected comb line and the reflected carrier respectively */
constexpr double half_j1_root = 1.9158529851037562;
constexpr double half_j0_root2 = 2.7600390551431553;

complexd field_by_hand(const ScenarioParams& p, double t, int s_max) {
  const auto rates = modified_rates(p);
  const double u = t - p.d_over_c;
  if (u < 0.0) return 0.0;
  complexd val = std::exp(complexd(-0.5 * rates.gamma_eff * u, -rates.shift * u));
  const double v = u - p.tau;
  if (v >= 0.0) {
    complexd comb = 0.0;
    for (int s = -s_max; s <= s_max; ++s)
      comb += bessel_j(s, 2.0 * p.k0l0) * std::polar(1.0, -double(s) * p.nu * t);
    val -= std::polar(1.0, p.omega0_tau) * comb *
           std::exp(complexd(-0.5 * rates.gamma_eff * v, -rates.shift * v));
  }
  return val;
}

}  // namespace

TEST_SUITE("spectrum") {

TEST_CASE("detector field: causality and the static echo") {
  ScenarioParams p;
  p.epsilon = 0.5;
  p.tau = 0.8;
  p.k0l0 = 0.0;
  p.omega0_tau = 0.9;
  p.d_over_c = 1.3;

  CHECK(detector_field(p, 0.5) == complexd(0.0));
  CHECK(detector_field(p, 1.2999) == complexd(0.0));

  const auto rates = modified_rates(p);
  /* before the echo arrives: only the direct front */
  const double t1 = 1.8, u1 = t1 - p.d_over_c;
  CHECK(std::abs(detector_field(p, t1) -
                 std::exp(complexd(-0.5 * rates.gamma_eff * u1, -rates.shift * u1))) <= 1e-15);
  /* after: direct front minus the single reflected term */
  const double t2 = 3.0, u2 = t2 - p.d_over_c, v2 = u2 - p.tau;
  const complexd ref = std::exp(complexd(-0.5 * rates.gamma_eff * u2, -rates.shift * u2)) -
                       std::polar(1.0, p.omega0_tau) *
                           std::exp(complexd(-0.5 * rates.gamma_eff * v2, -rates.shift * v2));
  CHECK(std::abs(detector_field(p, t2) - ref) <= 1e-14);
}

TEST_CASE("detector field: moving mirror against a direct comb sum") {
  ScenarioParams p;
  p.epsilon = 0.6;
  p.nu = 12.0;
  p.tau = 0.5;
  p.k0l0 = 0.6;
  p.omega0_tau = 0.4;
  p.d_over_c = 0.2;
  for (double t : {0.1, 0.3, 0.69, 0.71, 1.5, 4.0, 9.7}) {
    CHECK(std::abs(detector_field(p, t) - field_by_hand(p, t, 25)) <= 1e-13);
  }
}

TEST_CASE("comb weights") {
  SUBCASE("static mirror: single reflected line") {
    ScenarioParams p;
    p.k0l0 = 0.0;
    p.omega0_tau = 0.9;
    const auto tab = sideband_strengths(p);
    CHECK(std::abs(tab.b0 - (1.0 - std::polar(1.0, 0.9))) <= 1e-15);
    CHECK(std::abs(tab.entry(0) - std::polar(1.0, 0.9)) <= 1e-15);
    for (int m = 1; m <= tab.m_max; ++m) {
      CHECK(std::abs(tab.entry(m)) <= 1e-16);
      CHECK(std::abs(tab.entry(-m)) <= 1e-16);
    }
  }

  SUBCASE("moduli and the weight sum rule") {
    for (double z : {0.5, 1.0, 1.9, half_j0_root2}) {
      ScenarioParams p;
      p.nu = 20.0;
      p.tau = 0.3;
      p.k0l0 = z;
      p.omega0_tau = 0.7;
      p.d_over_c = 0.1;
      const auto tab = sideband_strengths(p);
      double sum = 0.0;
      for (int m = -tab.m_max; m <= tab.m_max; ++m) {
        CHECK(std::abs(std::abs(tab.entry(m)) - std::abs(bessel_j(m, 2.0 * z))) <= 1e-15);
        if (m != 0) sum += std::norm(tab.entry(m));
      }
      const double j0 = bessel_j(0, 2.0 * z);
      CHECK(std::abs(sum - (1.0 - j0 * j0)) <= 1e-10);
      CHECK(std::abs(tab.b0) <= 1.0 + std::abs(j0) + 1e-15);
    }
  }

  SUBCASE("amplitudes that null single lines") {
    ScenarioParams p;
    p.nu = 20.0;
    p.omega0_tau = 0.7;
    p.k0l0 = half_j1_root;
    CHECK(std::abs(sideband_strengths(p).entry(1)) <= 1e-10);
    p.k0l0 = half_j0_root2;
    CHECK(std::abs(sideband_strengths(p).b0 - 1.0) <= 1e-10);
  }
}

TEST_CASE("ideal spectrum: static limit is one Lorentzian") {
  ScenarioParams p;
  p.epsilon = 0.5;
  p.k0l0 = 0.0;
  p.omega0_tau = pi;  // fully reflective phase: b0 = 2, rate gamma*(1+eps)
  const auto rates = modified_rates(p);
  CHECK(rates.gamma_eff == doctest::Approx(1.5).epsilon(1e-14));
  const FrequencyGrid grid{-6.0, 6.0, 481};
  const auto res = spectrum_ideal(p, grid, -1, false);
  const auto d = grid.points();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double ref = 4.0 / (d[i] * d[i] + 0.25 * rates.gamma_eff * rates.gamma_eff);
    worst = std::max(worst, std::abs(double(res.values[i]) - ref) / ref);
  }
  CHECK(worst <= 1e-12);
  CHECK(res.peak_raw == doctest::Approx(4.0 / (0.25 * 1.5 * 1.5)).epsilon(1e-12));
}

TEST_CASE("ideal spectrum: comb positions and heights") {
  ScenarioParams p;
  p.epsilon = 0.5;
  p.k0l0 = 1.0;
  p.omega0_tau = 0.8;
  const auto rates = modified_rates(p);
  p.nu = 20.0 * rates.gamma_eff;
  const auto tab = sideband_strengths(p);

  SUBCASE("local maxima sit on the shifted comb") {
    const FrequencyGrid grid{-3.6 * p.nu, 3.6 * p.nu, 4001};
    const auto res = spectrum_ideal(p, grid);
    const auto d = grid.points();
    for (int m = -3; m <= 3; ++m) {
      const double target = rates.shift + double(m) * p.nu;
      bool found = false;
      for (Eigen::Index i = 1; i + 1 < d.size(); ++i) {
        if (res.values[i] > res.values[i - 1] && res.values[i] >= res.values[i + 1] &&
            std::abs(d[i] - target) <= 0.1 * rates.gamma_eff) {
          found = true;
          break;
        }
      }
      CHECK(found);
    }
  }

  SUBCASE("line heights follow the comb weights") {
    const double lor = 4.0 / (rates.gamma_eff * rates.gamma_eff);
    for (int m = -3; m <= 3; ++m) {
      const FrequencyGrid one{rates.shift + double(m) * p.nu, rates.shift + double(m) * p.nu, 1};
      const auto res = spectrum_ideal(p, one, -1, false);
      const double expected = (m == 0 ? std::norm(tab.b0) : std::norm(tab.entry(m))) * lor;
      CHECK(double(res.values[0]) == doctest::Approx(expected).epsilon(0.10));
    }
  }
}

TEST_CASE("filtered output matches the narrow-filter closed form") {
  ScenarioParams p;
  p.epsilon = 0.5;
  p.tau = 0.3;
  p.k0l0 = 0.0;
  p.omega0_tau = 0.9;
  const auto rates = modified_rates(p);
  const double Gd = 0.01 * rates.gamma_eff;
  const double t = 30.0 / Gd;
  for (double off : {-1.0, -0.3, 0.0, 0.5, 2.0}) {
    const FilterSpec f{rates.shift + off * rates.gamma_eff, Gd};
    const double wq = filtered_energy_density(p, f, t);
    const double wc = filtered_closed_form(p, f, t);
    CHECK(wq == doctest::Approx(wc).epsilon(0.05));
  }
}

TEST_CASE("quadrature that cannot resolve the field is rejected") {
  ScenarioParams p;
  p.epsilon = 0.5;
  p.tau = 0.3;
  p.k0l0 = 0.0;
  p.omega0_tau = 0.9;
  const auto rates = modified_rates(p);
  const FilterSpec f{rates.shift + rates.gamma_eff, 0.01 * rates.gamma_eff};
  const double t = 30.0 / f.Gamma_D;
  CHECK_THROWS_AS((void)filtered_energy_density(p, f, t, 7.7), convergence_error);
  try {
    (void)filtered_energy_density(p, f, t, 7.7);
  } catch (const convergence_error& e) {
    CHECK(e.op() == "filtered_energy_density");
  }
}

TEST_CASE("filter output is insensitive to a global field phase and scales quadratically") {
  ScenarioParams p;
  p.epsilon = 0.5;
  p.nu = 15.0;
  p.tau = 0.4;
  p.k0l0 = 0.7;
  p.omega0_tau = 0.5;
  const FilterSpec f{0.8, 0.05};
  const double t = 40.0;
  const std::vector<double> cuts{0.0, p.tau};
  const auto base = [&](double s) { return detector_field(p, s); };
  const double w0 = filtered_field_energy(base, f, t, 0.0, cuts);
  const auto rotated = [&](double s) { return std::polar(1.0, 0.73) * detector_field(p, s); };
  CHECK(filtered_field_energy(rotated, f, t, 0.0, cuts) == doctest::Approx(w0).epsilon(1e-12));
  const auto doubled = [&](double s) { return 2.0 * detector_field(p, s); };
  CHECK(filtered_field_energy(doubled, f, t, 0.0, cuts) == doctest::Approx(4.0 * w0).epsilon(1e-12));
}

TEST_CASE("narrower filters approach the closed form monotonically") {
  ScenarioParams p;
  p.epsilon = 0.5;
  p.tau = 0.3;
  p.k0l0 = 0.0;
  p.omega0_tau = 0.9;
  const auto rates = modified_rates(p);
  double last = 1e100;
  for (double gd : {0.04, 0.02, 0.01}) {
    const double Gd = gd * rates.gamma_eff;
    const double t = 30.0 / Gd;
    const FilterSpec f{rates.shift, Gd};
    const double err =
        std::abs(filtered_energy_density(p, f, t) / filtered_closed_form(p, f, t) - 1.0);
    CHECK(err < last);
    last = err;
  }
}

TEST_CASE("spectrum scan agrees with pointwise evaluation") {
  ScenarioParams p;
  p.epsilon = 0.5;
  p.nu = 15.0;
  p.tau = 0.2;
  p.k0l0 = 0.8;
  p.omega0_tau = 0.6;
  const auto rates = modified_rates(p);
  const double Gd = 0.02 * rates.gamma_eff;
  const double t = 30.0 / Gd;
  const FrequencyGrid grid{rates.shift - p.nu, rates.shift + p.nu, 3};
  const double qdt = 0.005;
  const auto res = filtered_spectrum_scan(p, Gd, t, grid, qdt);
  CHECK(res.peak_normalized);
  CHECK(res.values.maxCoeff() == doctest::Approx(1.0).epsilon(1e-15));
  const auto d = grid.points();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const FilterSpec f{d[i], Gd};
    const double w = filtered_energy_density(p, f, t, qdt);
    CHECK(double(res.values[i]) * res.peak_raw == doctest::Approx(w).epsilon(1e-12));
  }
  const auto raw = filtered_spectrum_scan(p, Gd, t, grid, qdt, -1, false);
  CHECK(raw.peak_raw == doctest::Approx(res.peak_raw).epsilon(1e-15));
}

}  // TEST_SUITE
