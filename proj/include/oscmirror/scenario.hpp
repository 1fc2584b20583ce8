#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oscmirror {

using complexd = std::complex<double>;

/** Invalid parameter, grid, or config-file values. The CLI maps this to exit
 * code 2. */
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/** An internal accuracy check failed (step size too coarse, quadrature not
 * converged). Carries the name of the failing operation; the CLI maps this to
 * exit code 3. */
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& op, const std::string& what)
      : std::runtime_error(op + ": " + what), op_(op) {}
  const std::string& op() const { return op_; }

 private:
  std::string op_;
};

/**
 * Dimensionless description of one emitter-mirror scenario.
 *
 * gamma sets the inverse time unit (1.0 by convention); nu and all other
 * frequencies are angular frequencies in the same unit, times are in the
 * inverse unit. Lengths enter only through optical phases: k0l0 is the mirror
 * oscillation amplitude times the carrier wavenumber, k0R the mean
 * emitter-mirror distance times the carrier wavenumber. omega0_tau is the
 * optical round-trip phase modulo 2*pi; when not set explicitly it follows
 * from the geometry as 2*k0R mod 2*pi.
 */
struct ScenarioParams {
  double gamma = 1.0;       // free-space decay rate
  double epsilon = 0.5;     // mirror-channel weight, in [0, 1]
  double nu = 0.0;          // mirror oscillation frequency
  double tau = 0.0;         // round-trip delay 2R/c
  double k0l0 = 0.0;        // oscillation amplitude as an optical phase
  double k0R = 0.0;         // mean distance as an optical phase
  double omega0_tau = 0.0;  // optical round-trip phase, mod 2*pi
  double d_over_c = 0.0;    // emitter-to-detector travel time
  std::optional<double> omega0_over_gamma;  // optical/decay scale ratio, if known

  static double derived_phase(double k0R);

  void validate() const;  // throws config_error on out-of-range values
};

/** Uniform time grid; n_steps counts samples including t_start. */
struct TimeGrid {
  double t_start = 0.0;
  double dt = 0.0;
  std::size_t n_steps = 0;

  double t_end() const { return t_start + dt * double(n_steps - 1); }
  Eigen::ArrayXd points() const;

  /** Solver step constraint: dt must resolve both the mirror oscillation and
   * the delay (dt <= 0.05/max(nu, gamma) and dt <= tau/50 when tau > 0). */
  void validate(const ScenarioParams& p) const;
};

/** Uniform grid of detunings from the emitter line omega0. */
struct FrequencyGrid {
  double omega_min = 0.0;
  double omega_max = 0.0;
  std::size_t n_points = 0;

  Eigen::ArrayXd points() const;
  void validate() const;
};

enum class Frame { rotating, lab };

/** Excited-state amplitude samples on a time grid. Values are in the frame
 * rotating at omega0; frame_shift records an additional slow carrier
 * exp(-i*frame_shift*t) that the producing routine dropped, if any. */
struct AmplitudeTrace {
  TimeGrid grid;
  Eigen::ArrayXcd values;
  Frame frame = Frame::rotating;
  double frame_shift = 0.0;
};

enum class Channel { a, b };
enum class Regime { markovian, non_markovian };

/** Photon-mode amplitudes over a detuning grid. |values|^2 integrates over
 * detuning (d omega) to the emission probability into the channel. */
struct ModeAmplitudeProfile {
  FrequencyGrid grid;
  Eigen::ArrayXcd values;
  Channel channel = Channel::a;
  Regime regime = Regime::markovian;
};

/** Trapezoid integral of |values|^2 over the profile's grid. */
double profile_probability(const ModeAmplitudeProfile& prof);

/** Lorentzian detection filter: center omega_D (detuning from omega0) and
 * half width Gamma_D. */
struct FilterSpec {
  double omega_D = 0.0;
  double Gamma_D = 0.0;
  void validate() const;
};

struct SpectrumResult {
  FrequencyGrid grid;
  Eigen::ArrayXd values;
  bool peak_normalized = true;
  double peak_raw = 0.0;  // maximum before normalization
};

/** Carrier weight b0 and sideband weights for the emission spectrum comb.
 * entries holds the reflected-comb amplitudes for |m| <= m_max; entry(0) is
 * the reflected carrier piece, and b0 = 1 - entry(0). */
struct SidebandTable {
  complexd b0;
  int m_max = 0;
  std::vector<complexd> entries;

  complexd entry(int m) const { return entries.at(std::size_t(m + m_max)); }
};

enum class IssueSeverity { note, warning };

struct TimescaleIssue {
  IssueSeverity severity;
  std::string message;
};

/** Decay rate and line shift of the emitter in front of the oscillating
 * mirror: gamma_eff = gamma*(1 - epsilon*J0(2*k0l0)*cos(omega0_tau)),
 * shift = omega0_eff - omega0 = -epsilon*(gamma/2)*J0(2*k0l0)*sin(omega0_tau). */
struct ModifiedRates {
  double gamma_eff = 0.0;
  double shift = 0.0;
};

}  // namespace oscmirror
