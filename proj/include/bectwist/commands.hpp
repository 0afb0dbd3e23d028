#pragma once

// The five driver commands. Each reads a Config, computes everything in memory and returns a
// RunOutput; nothing touches the filesystem until commit_run.

#include <bectwist/bogoliubov_ring.hpp>
#include <bectwist/bose_hubbard_ed.hpp>
#include <bectwist/config.hpp>
#include <bectwist/core_units.hpp>
#include <bectwist/lattice_dynamics.hpp>
#include <bectwist/run_output.hpp>
#include <bectwist/trap2d.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <vector>

namespace bectwist {

struct RingRunConfig {
  RingBecParams base;
  std::vector<double> omegas;    // rad/s
  std::vector<double> g_values;  // J m; a single entry when g is not swept
  bool g_swept = false;
  ModeSumOptions mode_sum;
  ValidityThresholds thresholds;
};

/// Sections [condensate], [impurity], [sweep], [numerics], [validity].
/// `need_omega_grid` is false for the validate command.
inline RingRunConfig read_ring_config(Config& cfg, bool need_omega_grid = true) {
  RingRunConfig r;
  RingBecParams& p = r.base;
  UnitContext ctx;
  p.boson_mass_m_b = cfg.mass("condensate", "mass", "Rb87");
  p.impurity_mass_m_a = cfg.mass("impurity", "mass", "Na23");
  p.lattice_constant_a = cfg.quantity("impurity", "lattice_constant", Dimension::length, ctx);
  if (!(p.lattice_constant_a > 0.0)) throw cfg.error("impurity", "lattice_constant", "must be positive");
  ctx.lattice_constant = p.lattice_constant_a;
  ctx.recoil_energy = recoil_energy(p.impurity_mass_m_a, p.lattice_constant_a);

  p.circumference_L = cfg.quantity("condensate", "circumference", Dimension::length, ctx);
  if (!(p.circumference_L > 0.0)) throw cfg.error("condensate", "circumference", "must be positive");
  p.density_n0 = cfg.quantity("condensate", "density", Dimension::inverse_length, ctx);
  const double radius = p.circumference_L / (2.0 * std::numbers::pi);
  ctx.omega_crit = PhysicalConstants::hbar / (2.0 * p.boson_mass_m_b * radius * radius);

  const auto default_sites = static_cast<long long>(std::lround(p.circumference_L / p.lattice_constant_a));
  const long long sites = cfg.integer("impurity", "sites", default_sites);
  if (sites < 1 || sites > std::numeric_limits<int>::max()) throw cfg.error("impurity", "sites", "must be >= 1");
  p.lattice_sites_N_s = static_cast<int>(sites);
  p.impurity_coupling_kappa = cfg.quantity("impurity", "kappa", Dimension::coupling_1d, ctx);
  p.wannier_width_sigma =
      cfg.quantity("impurity", "wannier_width", Dimension::length, ctx, 0.25 * p.lattice_constant_a);
  p.hopping_J_a = cfg.quantity("impurity", "hopping", Dimension::energy, ctx, 0.01 * *ctx.recoil_energy);
  p.temperature_T = cfg.quantity("impurity", "temperature", Dimension::temperature, ctx, 0.0);

  if (auto g = cfg.optional_grid("sweep", "coupling_g", Dimension::coupling_1d, ctx)) {
    r.g_values = g->values;
    r.g_swept = true;
  } else {
    r.g_values = {cfg.quantity("condensate", "coupling_g", Dimension::coupling_1d, ctx)};
  }
  p.coupling_g = r.g_values.front();
  for (double g : r.g_values)
    if (!(g > 0.0)) throw cfg.error("sweep", "coupling_g", "must be positive");

  if (need_omega_grid) r.omegas = cfg.grid("sweep", "omega", Dimension::rotation, ctx).values;
  p.rotation_Omega = r.omegas.empty() ? 0.0 : r.omegas.front();

  r.mode_sum.cutoff_scale = cfg.number("numerics", "cutoff_scale", 1.0);
  if (!(r.mode_sum.cutoff_scale > 0.0)) throw cfg.error("numerics", "cutoff_scale", "must be positive");
  r.thresholds.weak_coupling_max = cfg.number("validity", "weak_coupling_max", 0.1);
  r.thresholds.phonon_velocity_min = cfg.number("validity", "phonon_velocity_min", 10.0);

  // full validation of the base point (names the offending field)
  to_dimensionless(p);
  return r;
}

struct RingRow {
  double omega = 0.0;
  bool critical = false;
  std::string message;
  long winding_j = 0;
  double delta_q = 0.0;  // 1/m
  double alpha_a = 0.0;
  double hopping_reduction = 1.0;
  double E_j = 0.0;   // J
  double V_nn = 0.0;  // J
};

inline RingRow ring_point(RingBecParams p, double omega, const ModeSumOptions& opts) {
  p.rotation_Omega = omega;
  const ScaledRing s = to_dimensionless(p);
  RingRow row;
  row.omega = omega;
  try {
    const auto gs = select_ground_state(s.model);
    const auto pq = polaron_quantities(s.model, opts);
    row.winding_j = gs.winding_j;
    row.delta_q = gs.delta_q / s.scales.length;
    row.alpha_a = pq.alpha_a;
    row.hopping_reduction = pq.hopping_reduction_factor;
    row.E_j = pq.polaron_shift_E_j * s.scales.energy;
    row.V_nn = pq.mediated_V_nn * s.scales.energy;
  } catch (const CriticalRotationError& e) {
    row.critical = true;
    row.message = e.what();
  }
  return row;
}

inline std::string ring_csv(const std::vector<RingRow>& rows) {
  CsvWriter csv({"omega_rad_s", "winding_j", "delta_q", "alpha_a", "hopping_reduction", "E_j", "V_nn"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    if (r.critical)
      csv.row(r.omega, nan, nan, nan, nan, nan, nan);
    else
      csv.row(r.omega, r.winding_j, r.delta_q, r.alpha_a, r.hopping_reduction, r.E_j, r.V_nn);
  }
  return csv.str();
}

inline RunOutput cmd_phase_ring(Config& cfg, int threads = 1) {
  const RingRunConfig rc = read_ring_config(cfg);
  RunOutput out;
  out.command = "phase-ring";

  const std::size_t n_omega = rc.omegas.size();
  std::vector<RingRow> rows(rc.g_values.size() * n_omega);
  parallel_for(rows.size(), threads, [&](std::size_t k) {
    RingBecParams p = rc.base;
    p.coupling_g = rc.g_values[k / n_omega];
    rows[k] = ring_point(p, rc.omegas[k % n_omega], rc.mode_sum);
  });

  std::string log;
  CsvWriter index({"file", "coupling_g"});
  for (std::size_t gi = 0; gi < rc.g_values.size(); ++gi) {
    const std::vector<RingRow> block(rows.begin() + static_cast<std::ptrdiff_t>(gi * n_omega),
                                     rows.begin() + static_cast<std::ptrdiff_t>((gi + 1) * n_omega));
    const std::string name = rc.g_swept ? fmt::format("phase_ring_g{:03d}.csv", gi) : "phase_ring.csv";
    out.add(name, ring_csv(block));
    if (rc.g_swept) index.row(name, rc.g_values[gi]);
    for (std::size_t k = 0; k < block.size(); ++k)
      if (block[k].critical)
        log += fmt::format("{} row {} omega_rad_s={:.17g}: {}\n", name, k + 1, block[k].omega, block[k].message);

    RingBecParams p = rc.base;
    p.coupling_g = rc.g_values[gi];
    for (const auto& w : validity_check(to_dimensionless(p).model, rc.thresholds).warnings)
      out.warn(fmt::format("g = {:.6g} J*m: {}", rc.g_values[gi], w));
  }
  if (rc.g_swept) out.add("phase_ring_index.csv", index.str());
  if (!log.empty()) {
    out.add("phase_ring_critical.log", log);
    out.warn("critical rotation in the sweep; affected rows are NaN (see phase_ring_critical.log)");
  }
  return out;
}

inline RunOutput cmd_validate(Config& cfg) {
  const RingRunConfig rc = read_ring_config(cfg, false);
  RunOutput out;
  out.command = "validate";
  nlohmann::json reports = nlohmann::json::array();
  for (double g : rc.g_values) {
    RingBecParams p = rc.base;
    p.coupling_g = g;
    const auto rep = validity_check(to_dimensionless(p).model, rc.thresholds);
    reports.push_back({{"coupling_g", g},
                       {"weak_coupling_ratio", rep.weak_coupling_ratio},
                       {"weak_coupling_ok", rep.weak_coupling_ok},
                       {"phonon_velocity_ratio", rep.phonon_velocity_ratio},
                       {"phonon_velocity_ok", rep.phonon_velocity_ok},
                       {"tight_binding_ok", rep.tight_binding_ok},
                       {"warnings", rep.warnings}});
    for (const auto& w : rep.warnings) out.warn(fmt::format("g = {:.6g} J*m: {}", g, w));
  }
  out.add("validity.json", reports.dump(2) + "\n");
  return out;
}

inline std::string time_label(double t) { return fmt::format("{:g}", t); }

inline RunOutput cmd_drift(Config& cfg, int threads = 1) {
  DriftRunConfig base;
  base.N_s = static_cast<int>(cfg.integer("lattice", "sites", 30));
  base.j0 = static_cast<int>(cfg.integer("lattice", "j0", 15));
  base.w_ini = cfg.number("lattice", "w_ini", std::numbers::sqrt2);
  base.hopping_scale = cfg.number("lattice", "hopping_scale", 1.0);
  base.alpha_a = cfg.number("lattice", "alpha_a", 0.03);
  const double t_max = cfg.number("carpet", "t_max", 6.0);
  const auto samples = cfg.integer("carpet", "samples", 201);
  const auto times = cfg.grid("drift", "times", Dimension::dimensionless, {}).values;
  const auto alphas = cfg.grid("drift", "alpha", Dimension::dimensionless, {}).values;

  base.times = times;
  validate(base);
  if (samples < 2) throw cfg.error("carpet", "samples", "need at least 2 samples");
  if (!(t_max > 0.0)) throw cfg.error("carpet", "t_max", "must be positive");

  RunOutput out;
  out.command = "drift";

  const auto carpet = density_carpet(base, t_max, static_cast<int>(samples));
  CsvWriter c({"t_d", "site", "density"});
  for (std::size_t k = 0; k < carpet.times.size(); ++k)
    for (std::size_t j = 0; j < carpet.densities[k].size(); ++j)
      c.row(carpet.times[k], static_cast<int>(j + 1), carpet.densities[k][j]);
  out.add("carpet.csv", c.str());

  std::vector<std::vector<double>> means(alphas.size());
  parallel_for(alphas.size(), threads, [&](std::size_t k) {
    DriftRunConfig d = base;
    d.alpha_a = alphas[k];
    means[k] = drift_mean_positions(d);
  });
  std::set<std::string> labels;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    CsvWriter d({"alpha_a", "mean_position_at_t_d"});
    for (std::size_t k = 0; k < alphas.size(); ++k) d.row(alphas[k], means[k][ti]);
    std::string label = time_label(times[ti]);
    if (!labels.insert(label).second) label = fmt::format("{}_{}", label, ti);
    out.add("drift_t" + label + ".csv", d.str());
  }
  return out;
}

inline EdModelParams read_ed_model(Config& cfg) {
  EdModelParams p;
  p.N_s = static_cast<int>(cfg.integer("model", "sites", 21));
  p.N_c = static_cast<int>(cfg.integer("model", "bosons_c", 3));
  p.J_a = cfg.number("model", "J_a", 1.0);
  p.J_c = cfg.number("model", "J_c", 1.0);
  p.U_c = cfg.number("model", "U_c", 1.0);
  p.U_I = cfg.number("model", "U_I", 2.0);
  p.max_nonzeros = cfg.integer("model", "max_nonzeros", 5'000'000);
  if (p.N_c > 255) throw cfg.error("model", "bosons_c", "must be <= 255");
  validate(p);
  return p;
}

inline RunOutput cmd_ed(Config& cfg, int threads = 1) {
  const EdModelParams base = read_ed_model(cfg);
  QuenchConfig q;
  q.j0 = static_cast<int>(cfg.integer("quench", "j0", 11));
  q.w_ini = cfg.number("quench", "w_ini", std::numbers::sqrt2);
  q.times = {cfg.number("quench", "t_d", 4.0)};
  q.matrix_free = cfg.boolean("quench", "matrix_free", false);
  q.krylov.krylov_dim = static_cast<int>(cfg.integer("krylov", "dimension", 30));
  q.krylov.tolerance = cfg.number("krylov", "tolerance", 1e-10);
  const auto alphas = cfg.grid("sweep", "alpha_c", Dimension::dimensionless, {}).values;
  std::vector<double> density_alphas = alphas;
  if (auto d = cfg.optional_grid("sweep", "density_alpha_c", Dimension::dimensionless, {})) density_alphas = d->values;

  if (q.j0 < 1 || q.j0 > base.N_s) throw cfg.error("quench", "j0", "must lie in [1, N_s]");
  if (!(q.w_ini > 0.0)) throw cfg.error("quench", "w_ini", "must be positive");
  if (!(q.times.front() >= 0.0)) throw cfg.error("quench", "t_d", "must be >= 0");
  if (q.krylov.krylov_dim < 2) throw cfg.error("krylov", "dimension", "must be >= 2");
  // size check before any allocation
  require_within_cap(base.N_s, base.N_c, base.max_nonzeros);

  std::vector<double> run_alphas = alphas;
  for (double a : density_alphas)
    if (std::find(run_alphas.begin(), run_alphas.end(), a) == run_alphas.end()) run_alphas.push_back(a);

  std::vector<QuenchResult> results(run_alphas.size());
  parallel_for(run_alphas.size(), threads, [&](std::size_t k) {
    EdModelParams p = base;
    p.alpha_c = run_alphas[k];
    results[k] = quench_evolve(p, q);
    results[k].final_state.resize(0);
  });

  RunOutput out;
  out.command = "ed";
  CsvWriter drift({"alpha_c", "mean_position_at_t_d"});
  for (std::size_t k = 0; k < alphas.size(); ++k) drift.row(alphas[k], results[k].snapshots.back().mean_position);
  out.add("drift.csv", drift.str());

  for (std::size_t k = 0; k < density_alphas.size(); ++k) {
    const auto it = std::find(run_alphas.begin(), run_alphas.end(), density_alphas[k]);
    const auto& r = results[static_cast<std::size_t>(it - run_alphas.begin())];
    CsvWriter d({"site", "rho"});
    const auto& rho = r.snapshots.back().impurity_density;
    for (std::size_t j = 0; j < rho.size(); ++j) d.row(static_cast<int>(j + 1), rho[j]);
    out.add(fmt::format("density_{:03d}_alpha_c_{:g}.csv", k, density_alphas[k]), d.str());
  }

  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t k = 0; k < run_alphas.size(); ++k) {
    const auto& r = results[k];
    const auto& s = r.snapshots.back();
    runs.push_back({{"alpha_c", run_alphas[k]},
                    {"c_ground_energy", r.c_ground.energy},
                    {"c_momentum_index", r.c_ground.momentum_index},
                    {"c_degenerate", r.c_ground.degenerate},
                    {"lanczos_iterations", r.c_ground.iterations},
                    {"lanczos_residual", r.c_ground.residual},
                    {"krylov_steps", r.propagation.steps},
                    {"krylov_matvecs", r.propagation.matvecs},
                    {"krylov_max_error_estimate", r.propagation.max_error_estimate},
                    {"norm_error", s.norm_error},
                    {"energy_drift", std::abs(s.energy - r.initial_energy)},
                    {"mean_position", s.mean_position}});
    if (r.c_ground.degenerate)
      out.warn(fmt::format("alpha_c = {:.17g}: c-sector ground state degenerate (critical twist)", run_alphas[k]));
  }
  nlohmann::json meta = {{"dimension", results.front().dimension},
                         {"nonzeros", results.front().nonzeros},
                         {"runs", runs}};
  out.add("ed_metadata.json", meta.dump(2) + "\n");
  return out;
}

inline RunOutput cmd_phase_2d(Config& cfg, int threads = 1) {
  TrapParams trap;
  UnitContext ctx;
  trap.omega_tr = cfg.quantity("trap", "omega_tr", Dimension::rotation, ctx);
  if (!(trap.omega_tr > 0.0)) throw cfg.error("trap", "omega_tr", "must be positive");
  ctx.omega_tr = trap.omega_tr;
  if (cfg.has("trap", "mass") || !cfg.has("trap", "a0")) {
    trap.mass_b = cfg.mass("trap", "mass", "Rb87");
    trap.a0 = std::sqrt(PhysicalConstants::hbar / (trap.mass_b * trap.omega_tr));
  }
  ctx.oscillator_length = trap.a0;
  if (cfg.has("trap", "a0")) trap.a0 = cfg.quantity("trap", "a0", Dimension::length, ctx);
  trap.N0 = cfg.number("trap", "N0", 1.0);
  trap.kappa = cfg.quantity("trap", "kappa", Dimension::coupling_2d, ctx, 0.0);

  Fig4Grid grid;
  const std::string variable = cfg.string("sweep", "variable", "omega");
  if (variable == "omega") {
    grid.variable = Fig4Sweep::omega;
    for (double w : cfg.grid("sweep", "omega", Dimension::rotation, ctx).values) grid.values.push_back(w / trap.omega_tr);
    grid.xi = cfg.number("sweep", "xi", 0.5);
  } else if (variable == "xi") {
    grid.variable = Fig4Sweep::xi;
    grid.values = cfg.grid("sweep", "xi", Dimension::dimensionless, {}).values;
    grid.omega_ratio = cfg.quantity("sweep", "omega", Dimension::rotation, ctx, 0.25 * trap.omega_tr) / trap.omega_tr;
  } else {
    throw cfg.error("sweep", "variable", "must be 'omega' or 'xi'");
  }
  grid.delta_phi = cfg.number("sweep", "delta_phi", 0.1);

  TrapTruncation trunc;
  trunc.max_shell = static_cast<int>(cfg.integer("truncation", "max_shell", 120));
  trunc.split_time = cfg.number("truncation", "split_time", 0.5);
  trunc.include_negative_l = cfg.boolean("truncation", "include_negative_l", true);

  // validation before any evaluation
  for (double x : grid.values) {
    TrapParams t = trap;
    SitePairPolar pair{grid.xi, grid.xi, grid.delta_phi, 0.0};
    if (grid.variable == Fig4Sweep::omega) t.Omega = x * trap.omega_tr;
    else {
      t.Omega = grid.omega_ratio * trap.omega_tr;
      pair.xi_i = pair.xi_j = x;
    }
    validate(t);
    validate(pair);
  }
  if (trunc.max_shell < 1) throw cfg.error("truncation", "max_shell", "must be >= 1");
  if (!(trunc.split_time > 0.0)) throw cfg.error("truncation", "split_time", "must be positive");

  std::vector<Fig4Row> rows(grid.values.size());
  parallel_for(rows.size(), threads, [&](std::size_t k) { rows[k] = fig4_point(trap, grid, grid.values[k], trunc); });

  RunOutput out;
  out.command = "phase-2d";
  CsvWriter csv({grid.variable == Fig4Sweep::omega ? "omega_over_omega_tr" : "xi", "alpha_red_ground",
                 "alpha_red_vortex"});
  for (const auto& r : rows) csv.row(r.x, r.alpha_red_ground, r.alpha_red_vortex);
  out.add("phase_2d.csv", csv.str());
  out.warn("vortex state: mode (n, l) = (0, 0) lies below the condensate mode (negative energy); it is included in the sum");
  out.extra["alpha_prefactor"] = twist_prefactor(trap);
  if (!trunc.include_negative_l) out.warn("negative-l modes excluded; the twist sum uses the plain 1/e^2 weights");
  return out;
}

}  // namespace bectwist
