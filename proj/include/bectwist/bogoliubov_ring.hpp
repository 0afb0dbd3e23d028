#pragma once

// Rotating condensate on a ring: plane-wave ground state, Bogoliubov phonons and the
// polaron quantities they induce on a ring lattice of impurities. All functions take a
// RingModel in hbar = 1 units and are pure.

#include <bectwist/core_units.hpp>
#include <bectwist/errors.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace bectwist {

struct CondensateGroundState {
  double q0 = 0.0;       // condensate quasi-momentum 2 pi j / L
  double delta_q = 0.0;  // m_b v / hbar - q0, in [-pi/L, pi/L]
  double mu = 0.0;
  long winding_j = 0;
  bool degenerate = false;  // |delta_q| == pi/L: two windings tie
};

struct BogoliubovMode {
  double q = 0.0;
  double eps0 = 0.0;       // free-particle energy q^2 / 2 m_b
  double energy_EB = 0.0;  // sqrt(eps0 (eps0 + 2 g n0)), non-rotating
  double energy_hw = 0.0;  // E^B - q delta_q / m_b
  double A = 1.0;
  double B = 0.0;
  double M_abs_sq = 0.0;          // |M_{j,q}|^2, independent of the site j
  double structure_factor = 1.0;  // eps0 / E^B
};

struct PolaronSummary {
  double alpha_a = 0.0;
  double hopping_reduction_factor = 1.0;
  double polaron_shift_E_j = 0.0;
  double mean_field_shift_Ebar = 0.0;
  double mediated_V_nn = 0.0;
};

struct ModeSumOptions {
  /// Multiplies the Gaussian cut-off momentum; 1 keeps every mode with exp(-q^2 sigma^2/2) > 1e-16.
  double cutoff_scale = 1.0;
};

/// Tolerance on |delta_q| == pi/L used to flag the degenerate (critical) ground state.
inline constexpr double kCriticalTolerance = 1e-12;

inline CondensateGroundState select_ground_state(const RingModel& m) {
  const double two_pi = 2.0 * std::numbers::pi;
  // m_b v / hbar in units of 2 pi / L
  const double target = m.mass_b * m.velocity() * m.L / two_pi;
  const double lower = std::floor(target);
  const double frac = target - lower;

  CondensateGroundState gs;
  if (std::abs(frac - 0.5) <= kCriticalTolerance) {
    gs.degenerate = true;
    const double upper = lower + 1.0;
    gs.winding_j = static_cast<long>(std::abs(lower) <= std::abs(upper) ? lower : upper);
  } else {
    gs.winding_j = static_cast<long>(frac < 0.5 ? lower : lower + 1.0);
  }
  gs.q0 = two_pi * static_cast<double>(gs.winding_j) / m.L;
  gs.delta_q = (target - static_cast<double>(gs.winding_j)) * two_pi / m.L;
  gs.mu = gs.q0 * gs.q0 / (2.0 * m.mass_b) + m.g * m.n0 - m.velocity() * gs.q0;
  return gs;
}

/// One Bogoliubov mode at relative quasi-momentum q != 0.
inline BogoliubovMode dispersion(const RingModel& m, const CondensateGroundState& gs, double q) {
  if (q == 0.0) throw ValidationError("q", "the condensate mode q = 0 has no phonon");
  BogoliubovMode mode;
  mode.q = q;
  mode.eps0 = q * q / (2.0 * m.mass_b);
  mode.energy_EB = std::sqrt(mode.eps0 * (mode.eps0 + 2.0 * m.g * m.n0));
  mode.energy_hw = mode.energy_EB - q * gs.delta_q / m.mass_b;
  if (!(mode.energy_hw > 0.0))
    throw CriticalRotationError(q, "non-positive phonon energy at q = " + std::to_string(q));

  mode.structure_factor = mode.eps0 / mode.energy_EB;
  // A +- B = (E^B / eps0)^(+-1/2)
  const double plus = std::sqrt(mode.energy_EB / mode.eps0);
  const double minus = 1.0 / plus;
  mode.A = 0.5 * (plus + minus);
  mode.B = 0.5 * (plus - minus);

  const double coupling = m.kappa / mode.energy_hw;
  mode.M_abs_sq = coupling * coupling * (m.n0 / m.L) * mode.structure_factor *
                  std::exp(-q * q * m.sigma * m.sigma / 2.0);
  return mode;
}

/// M_{j,q} for a Gaussian Wannier function centred at x_site. Gaussian overlap of
/// (phi0^* u_q - phi0 v_q) with |eta_j|^2 in closed form.
inline std::complex<double> coupling_element(const RingModel& m, const BogoliubovMode& mode,
                                             double x_site) {
  const double magnitude = (m.kappa / mode.energy_hw) * std::sqrt(m.n0 / m.L) *
                           (mode.A - mode.B) *
                           std::exp(-mode.q * mode.q * m.sigma * m.sigma / 4.0);
  return std::polar(magnitude, mode.q * x_site);
}

/// Largest mode index j (q = 2 pi j / L) kept by the Gaussian cut-off.
inline long mode_cutoff_index(const RingModel& m, const ModeSumOptions& opts = {}) {
  const double q_max = opts.cutoff_scale * std::sqrt(2.0 * 16.0 * std::numbers::ln10) / m.sigma;
  return static_cast<long>(std::floor(q_max * m.L / (2.0 * std::numbers::pi)));
}

namespace detail {
inline void require_noncritical(const CondensateGroundState& gs) {
  if (gs.degenerate)
    throw CriticalRotationError(0.0, "degenerate condensate ground state (|delta_q| = pi/L)");
}

/// Calls f(mode_plus, mode_minus) for j = 1..jmax with q = +-2 pi j / L.
template <class F>
void for_each_mode_pair(const RingModel& m, const CondensateGroundState& gs,
                        const ModeSumOptions& opts, F&& f) {
  require_noncritical(gs);
  const long jmax = mode_cutoff_index(m, opts);
  for (long j = 1; j <= jmax; ++j) {
    const double q = 2.0 * std::numbers::pi * static_cast<double>(j) / m.L;
    f(dispersion(m, gs, q), dispersion(m, gs, -q));
  }
}
}  // namespace detail

/// All modes kept by the cut-off, ordered +q1, -q1, +q2, -q2, ...
inline std::vector<BogoliubovMode> bogoliubov_modes(const RingModel& m,
                                                    const ModeSumOptions& opts = {}) {
  const auto gs = select_ground_state(m);
  std::vector<BogoliubovMode> modes;
  detail::for_each_mode_pair(m, gs, opts, [&](const BogoliubovMode& p, const BogoliubovMode& n) {
    modes.push_back(p);
    modes.push_back(n);
  });
  return modes;
}

/// Phase twist per bond for hopping j -> j+1:
/// alpha_a = (1/2pi) sum_{q != 0} |M_q|^2 sin(q a).
/// The excluded mode is the condensate itself, i.e. relative momentum q = 0.
inline double phase_twist_alpha_a(const RingModel& m, const ModeSumOptions& opts = {}) {
  const auto gs = select_ground_state(m);
  double sum = 0.0;
  detail::for_each_mode_pair(m, gs, opts, [&](const BogoliubovMode& p, const BogoliubovMode& n) {
    // paired so that the Omega = 0 cancellation is exact
    sum += p.M_abs_sq * std::sin(p.q * m.a) + n.M_abs_sq * std::sin(n.q * m.a);
  });
  return sum / (2.0 * std::numbers::pi);
}

/// Thermal suppression of the nearest-neighbour hopping,
/// exp(-1/2 sum_q |M_iq - M_jq|^2 (2 N_q + 1)).
inline double hopping_reduction(const RingModel& m, double kT, const ModeSumOptions& opts = {}) {
  if (!(kT >= 0.0)) throw ValidationError("temperature", "must be >= 0");
  const auto gs = select_ground_state(m);
  double exponent = 0.0;
  auto add = [&](const BogoliubovMode& mode) {
    const double s = std::sin(mode.q * m.a / 2.0);
    const double occupation = kT > 0.0 ? 1.0 / std::tanh(mode.energy_hw / (2.0 * kT)) : 1.0;
    exponent += 4.0 * mode.M_abs_sq * s * s * occupation;
  };
  detail::for_each_mode_pair(m, gs, opts, [&](const BogoliubovMode& p, const BogoliubovMode& n) {
    add(p);
    add(n);
  });
  return std::exp(-0.5 * exponent);
}

/// Twist, hopping reduction at the model temperature, polaron shift, mean-field shift and
/// nearest-neighbour mediated interaction, from one pass over the modes.
inline PolaronSummary polaron_quantities(const RingModel& m, const ModeSumOptions& opts = {}) {
  const auto gs = select_ground_state(m);
  double twist = 0.0, reduction_exponent = 0.0, shift = 0.0, v_nn = 0.0;
  auto add = [&](const BogoliubovMode& mode) {
    const double s = std::sin(mode.q * m.a / 2.0);
    const double occupation =
        m.kT > 0.0 ? 1.0 / std::tanh(mode.energy_hw / (2.0 * m.kT)) : 1.0;
    reduction_exponent += 4.0 * mode.M_abs_sq * s * s * occupation;
    shift += mode.energy_hw * mode.M_abs_sq;
    v_nn += 2.0 * mode.energy_hw * mode.M_abs_sq * std::cos(mode.q * m.a);
  };
  detail::for_each_mode_pair(m, gs, opts, [&](const BogoliubovMode& p, const BogoliubovMode& n) {
    twist += p.M_abs_sq * std::sin(p.q * m.a) + n.M_abs_sq * std::sin(n.q * m.a);
    add(p);
    add(n);
  });

  PolaronSummary out;
  out.alpha_a = twist / (2.0 * std::numbers::pi);
  out.hopping_reduction_factor = std::exp(-0.5 * reduction_exponent);
  out.polaron_shift_E_j = shift;
  out.mean_field_shift_Ebar = m.kappa * m.n0;
  out.mediated_V_nn = v_nn;
  return out;
}

}  // namespace bectwist
