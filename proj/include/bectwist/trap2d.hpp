#pragma once

// Phase twist between two lattice sites induced by a non-interacting condensate in a rotating
// isotropic 2D harmonic trap. Internal units: hbar = 1, omega_tr = 1, lengths in a0.
//
// The mode sum sum_nu T_nu / e_nu^2 is evaluated with the split
//   1/e^2 = int_0^tau t e^{-t e} dt + e^{-tau e} (1 + tau e) / e^2 .
// The second piece is summed over modes (exponentially convergent in the shell index). The
// first is a time integral of the rotating-oscillator (Mehler) kernel, which resums all modes
// in closed form.

#include <bectwist/core_units.hpp>
#include <bectwist/errors.hpp>
#include <bectwist/laguerre.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace bectwist {

enum class CondensateMode { ground, vortex };  // (n, l) = (0, 0) and (0, 1)

struct TrapParams {
  double omega_tr = 1.0;  // rad/s
  double Omega = 0.0;     // rad/s
  double N0 = 1.0;
  double a0 = 1.0;        // m
  double kappa = 0.0;     // J m^2
  double mass_b = 0.0;    // kg; when > 0, a0 is checked against sqrt(hbar / m_b omega_tr)
  CondensateMode mode = CondensateMode::ground;
};

struct SitePairPolar {
  double xi_i = 0.0;
  double xi_j = 0.0;
  double phi_i = 0.0;
  double phi_j = 0.0;
};

struct TrapTruncation {
  int max_shell = 120;       // modes with 2n + l <= max_shell
  double split_time = 0.5;   // tau, in units of 1 / omega_tr
  bool include_negative_l = true;
  double quadrature_tolerance = 1e-13;
};

struct TrapTwist {
  double alpha = 0.0;      // full twist (requires kappa, N0, a0)
  double alpha_red = 0.0;  // sum_nu T_nu (hbar omega_tr / hbar omega_nu)^2
  double last_shell = 0.0; // contribution of the outermost shell kept, as a tail estimate
  std::vector<std::pair<int, int>> negative_energy_modes;
};

inline void validate(const TrapParams& t) {
  if (!(t.omega_tr > 0.0) || !std::isfinite(t.omega_tr)) throw ValidationError("omega_tr", "must be positive");
  if (!std::isfinite(t.Omega)) throw ValidationError("Omega", "must be finite");
  if (!(t.a0 > 0.0)) throw ValidationError("a0", "must be positive");
  if (!(t.N0 > 0.0)) throw ValidationError("N0", "must be positive");
  if (!std::isfinite(t.kappa)) throw ValidationError("kappa", "must be finite");
  if (std::abs(t.Omega) >= t.omega_tr)
    throw InstabilityError("the system is unstable: |Omega| >= omega_tr");
  if (t.mass_b > 0.0) {
    const double expected = std::sqrt(PhysicalConstants::hbar / (t.mass_b * t.omega_tr));
    if (std::abs(t.a0 - expected) > 1e-12 * expected)
      throw ValidationError("a0", "inconsistent with sqrt(hbar / m_b omega_tr)");
  }
}

inline void validate(const SitePairPolar& p) {
  if (!(p.xi_i >= 0.0) || !(p.xi_j >= 0.0)) throw ValidationError("xi", "radii must be >= 0");
  if (!std::isfinite(p.xi_i) || !std::isfinite(p.xi_j) || !std::isfinite(p.phi_i) || !std::isfinite(p.phi_j))
    throw ValidationError("site_pair", "coordinates must be finite");
}

/// kappa^2 N0 / (2 pi^3 a0^4 (hbar omega_tr)^2): converts alpha_red to alpha.
inline double twist_prefactor(const TrapParams& t) {
  const double e = PhysicalConstants::hbar * t.omega_tr;
  return t.kappa * t.kappa * t.N0 / (2.0 * std::pow(std::numbers::pi, 3) * std::pow(t.a0, 4) * e * e);
}

/// Mode energy relative to the condensate mode, in units of hbar omega_tr.
inline double trap_mode_energy(int n, int l, CondensateMode mode, double omega_ratio) {
  const auto [n0, l0] = mode == CondensateMode::ground ? std::pair{0, 0} : std::pair{0, 1};
  return static_cast<double>((2 * n + l + 1) - (2 * n0 + l0 + 1)) - omega_ratio * (l - l0);
}

namespace detail {

/// n!/(n+l)! e^{-xi_i^2-xi_j^2} (xi_i xi_j)^l L_n^l(xi_i^2) L_n^l(xi_j^2), with negative l
/// rewritten through the negative-order identity; symmetric in (xi_i, xi_j) bit for bit.
inline double trap_radial_factor(int n, int l, double xi_i, double xi_j) {
  const int k = std::abs(l);
  const int nr = l < 0 ? n - k : n;
  const double prod = xi_i * xi_j;
  if (k > 0 && prod == 0.0) return 0.0;
  double log_scale = std::lgamma(nr + 1.0) - std::lgamma(nr + k + 1.0) - xi_i * xi_i - xi_j * xi_j;
  if (k > 0) log_scale += k * std::log(prod);
  const double li = laguerre_assoc(nr, k, xi_i * xi_i);
  const double lj = laguerre_assoc(nr, k, xi_j * xi_j);
  return std::exp(log_scale) * (li * lj);
}

/// Numerator T_nu of the twist sum (everything except 1/e^2).
inline double trap_term(int n, int l, CondensateMode mode, const SitePairPolar& p) {
  const double dphi = p.phi_i - p.phi_j;
  if (mode == CondensateMode::ground) {
    const double s = std::sin(l * dphi);
    if (s == 0.0) return 0.0;
    return trap_radial_factor(n, l, p.xi_i, p.xi_j) * s;
  }
  const double s = std::sin((l + 1) * dphi);
  if (s == 0.0) return 0.0;
  return trap_radial_factor(n, l, p.xi_i, p.xi_j) * (p.xi_i * p.xi_j) * s;
}

/// sum_nu T_nu e^{-t e_nu} over all modes (condensate mode included), in closed form.
inline double trap_kernel(double t, CondensateMode mode, double w, const SitePairPolar& p) {
  if (t <= 0.0) return 0.0;
  const double dphi = p.phi_i - p.phi_j;
  const double r2 = p.xi_i * p.xi_i + p.xi_j * p.xi_j;
  const double prod = p.xi_i * p.xi_j;
  const double sh = std::sinh(t);
  const double re = -(r2 * std::cosh(t) - 2.0 * prod * std::cos(dphi) * std::cosh(w * t)) / (2.0 * sh);
  const double im = prod * std::sin(dphi) * std::sinh(w * t) / sh;
  const bool vortex = mode == CondensateMode::vortex;
  const double e0 = vortex ? 2.0 - w : 1.0;
  const double angle = im + (vortex ? dphi : 0.0);
  if (angle == 0.0) return 0.0;
  const double weight = vortex ? prod : 1.0;
  return weight * std::exp(-r2 / 2.0 + t * e0 + re) * std::sin(angle) / (2.0 * sh);
}

inline void check_resonance(int n, int l, double e, double term, std::vector<std::pair<int, int>>& resonant) {
  if (std::abs(e) < 1e-12 && term != 0.0) resonant.emplace_back(n, l);
}

}  // namespace detail

/// Twist for the condensate in `trap.mode`. Modes of negative energy (possible for the vortex)
/// are summed and reported; a mode of vanishing energy with a nonzero term is an error.
inline TrapTwist phase_twist(const SitePairPolar& pair, const TrapParams& trap,
                             const TrapTruncation& trunc = {}) {
  validate(trap);
  validate(pair);
  if (trunc.max_shell < 1) throw ValidationError("max_shell", "must be >= 1");
  if (!(trunc.split_time > 0.0)) throw ValidationError("split_time", "must be positive");

  const CondensateMode mode = trap.mode;
  const double w = trap.Omega / trap.omega_tr;
  const auto nu0 = mode == CondensateMode::ground ? std::pair{0, 0} : std::pair{0, 1};
  const double tau = trunc.split_time;
  const bool split = trunc.include_negative_l;  // the kernel resums every mode, so needs all l

  TrapTwist out;
  std::vector<std::pair<int, int>> resonant;
  double sum = 0.0;
  for (int shell = 0; shell <= trunc.max_shell; ++shell) {
    double shell_sum = 0.0;
    for (int n = 0; n <= shell; ++n) {
      const int l = shell - 2 * n;
      if (l < -n) break;
      if (l < 0 && !trunc.include_negative_l) continue;
      if (std::pair{n, l} == nu0) continue;
      const double term = detail::trap_term(n, l, mode, pair);
      const double e = trap_mode_energy(n, l, mode, w);
      if (e < 0.0) out.negative_energy_modes.emplace_back(n, l);
      if (term == 0.0) continue;
      detail::check_resonance(n, l, e, term, resonant);
      if (!resonant.empty()) continue;
      shell_sum += split ? term * std::exp(-tau * e) * (1.0 + tau * e) / (e * e) : term / (e * e);
    }
    sum += shell_sum;
    if (shell == trunc.max_shell) out.last_shell = shell_sum;
  }
  if (!resonant.empty())
    throw ResonantModeError(resonant, "trap mode with vanishing energy contributes to the twist sum");

  if (split) {
    auto f = [&](double t) { return t * detail::trap_kernel(t, mode, w, pair); };
    double uv = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, 0.0, tau, 20, trunc.quadrature_tolerance);
    // the kernel includes the condensate mode itself (e = 0), whose piece is T_0 tau^2 / 2
    uv -= detail::trap_term(nu0.first, nu0.second, mode, pair) * tau * tau / 2.0;
    sum += uv;
  }

  out.alpha_red = sum;
  out.alpha = twist_prefactor(trap) * sum;
  return out;
}

inline TrapTwist phase_twist_ground(const SitePairPolar& pair, TrapParams trap,
                                    const TrapTruncation& trunc = {}) {
  trap.mode = CondensateMode::ground;
  return phase_twist(pair, trap, trunc);
}

inline TrapTwist phase_twist_vortex(const SitePairPolar& pair, TrapParams trap,
                                    const TrapTruncation& trunc = {}) {
  trap.mode = CondensateMode::vortex;
  return phase_twist(pair, trap, trunc);
}

enum class Fig4Sweep { omega, xi };

struct Fig4Grid {
  Fig4Sweep variable = Fig4Sweep::omega;
  std::vector<double> values;  // Omega / omega_tr, or xi = xi_i = xi_j
  double xi = 0.5;             // fixed radius for the omega sweep
  double omega_ratio = 0.25;   // fixed rotation for the xi sweep
  double delta_phi = 0.1;
};

struct Fig4Row {
  double x = 0.0;
  double alpha_red_ground = 0.0;
  double alpha_red_vortex = 0.0;
};

inline Fig4Row fig4_point(const TrapParams& trap, const Fig4Grid& grid, double x,
                          const TrapTruncation& trunc = {}) {
  TrapParams t = trap;
  SitePairPolar pair{grid.xi, grid.xi, grid.delta_phi, 0.0};
  if (grid.variable == Fig4Sweep::omega) {
    t.Omega = x * trap.omega_tr;
  } else {
    t.Omega = grid.omega_ratio * trap.omega_tr;
    pair.xi_i = pair.xi_j = x;
  }
  return {x, phase_twist_ground(pair, t, trunc).alpha_red, phase_twist_vortex(pair, t, trunc).alpha_red};
}

inline std::vector<Fig4Row> sweep_fig4(const TrapParams& trap, const Fig4Grid& grid,
                                       const TrapTruncation& trunc = {}) {
  if (grid.values.empty()) throw ValidationError("grid", "sweep grid is empty");
  std::vector<Fig4Row> rows;
  rows.reserve(grid.values.size());
  for (double x : grid.values) rows.push_back(fig4_point(trap, grid, x, trunc));
  return rows;
}

}  // namespace bectwist
