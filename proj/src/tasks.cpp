// tasks.cpp — task runners behind `photoion run`
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "photoion/bogoliubov.hpp"
#include "photoion/cli.hpp"
#include "photoion/dynamics.hpp"
#include "photoion/dyson.hpp"
#include "photoion/fock.hpp"
#include "photoion/leading.hpp"
#include "photoion/model.hpp"

namespace photoion::cli {

using nlohmann::json;

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << "\n";
    }
  }
};

struct TaskOutput {
  Table results;
  std::map<std::string, Table> plotdata;
  json summary = json::object();
  bool invariants_ok = true;
};

std::vector<double> numbers(const json& j) {
  std::vector<double> out;
  if (j.is_number()) return {j.get<double>()};
  for (const auto& v : j) out.push_back(v.get<double>());
  return out;
}

model::CouplingSpec build_spec(const RunConfig& cfg) {
  std::map<std::string, double> pm;
  const json& p = cfg.resolved["model"]["params"];
  for (auto it = p.begin(); it != p.end(); ++it) pm[it.key()] = it.value().get<double>();
  return model::preset(cfg.resolved["model"]["preset"].get<std::string>(), pm);
}

model::GridParams build_grid(const RunConfig& cfg) {
  const json& m = cfg.resolved["model"]["modes"];
  const json& e = cfg.resolved["model"]["electron"];
  model::GridParams g;
  g.modes.cutoff_Lambda = m["cutoff_Lambda"];
  g.modes.k_lo = m["k_lo"];
  g.modes.k_hi = m["k_hi"];
  g.modes.n_radial = m["n_radial"];
  g.modes.n_theta = m["n_theta"];
  g.modes.n_phi = m["n_phi"];
  g.electron.points = e["points"];
  g.electron.h_x = e["h_x"];
  return g;
}

fock::FockBasis build_basis(const RunConfig& cfg, const model::DiscretizedModel& m) {
  const json& f = cfg.resolved["fock"];
  std::optional<double> budget;
  if (!f["memory_budget_mb"].is_null()) budget = f["memory_budget_mb"].get<double>();
  return fock::build_basis(m.mode_count(), f["N_max"].get<int>(), static_cast<std::size_t>(m.electron_dim()), budget);
}

MomentumRegion build_region(const json& j) {
  MomentumRegion r;
  r.p_min = j["p_min"];
  r.p_max = j["p_max"].is_null() ? std::numeric_limits<double>::infinity() : j["p_max"].get<double>();
  for (const auto& s : j["signs"]) r.signs.push_back(s.get<int>());
  r.all_space = j["all_space"];
  r.id = j["id"];
  r.validate();
  return r;
}

double profile_value(const std::string& profile, double x) {
  if (profile == "gaussian") return std::exp(-0.5 * x * x);
  if (profile == "bump") {
    static const auto chi = leading::bump_profile();
    return chi(x);
  }
  throw ConfigError("key 'task.cloud.orbitals.profile': unknown profile '" + profile + "'");
}

fock::PhotonCloud build_cloud(const json& j, const model::DiscretizedModel& m) {
  fock::PhotonCloud cloud;
  for (const auto& o : j["orbitals"]) {
    const double c = o["center"], w = o["width"];
    const int sign = o["sign"];
    if (!(w > 0.0)) throw ConfigError("key 'task.cloud.orbitals.width' must be positive");
    Vec f = Vec::Zero(m.mode_count());
    for (int i = 0; i < m.mode_count(); ++i) {
      const double kx = m.modes[i].k[0];
      if (m.dim == 1 && sign != 0 && (kx > 0) != (sign > 0)) continue;
      f[i] = profile_value(o["profile"].get<std::string>(), (m.modes[i].omega - c) / w) * std::sqrt(m.modes[i].weight);
    }
    if (f.norm() == 0.0) throw ConfigError("key 'task.cloud.orbitals': orbital vanishes on the mode grid");
    cloud.orbitals.push_back(f / f.norm());
    cloud.multiplicity.push_back(o["multiplicity"].get<int>());
  }
  for (int n : cloud.multiplicity)
    if (n < 1) throw ConfigError("key 'task.cloud.orbitals.multiplicity' must be >= 1");
  cloud.check_orthonormal(1e-10);
  return cloud;
}

std::function<cd(const Vec3&)> isotropic(int dim) {
  const double c = dim == 1 ? 1.0 / std::sqrt(2.0) : 1.0 / std::sqrt(4.0 * kPi);
  return [c](const Vec3&) -> cd { return c; };
}

leading::ContinuumCloud build_continuum_cloud(const json& list, int dim) {
  leading::ContinuumCloud cloud;
  const auto chi = leading::bump_profile();
  for (const auto& o : list) {
    cloud.orbitals.push_back(leading::monochromatic_orbital(o["center"], o["width"], chi, isotropic(dim), dim));
    cloud.multiplicity.push_back(o["multiplicity"].get<int>());
  }
  return cloud;
}

// ---------------------------------------------------------------------------

TaskOutput task_ground_state(const RunConfig& cfg, int jobs) {
  const json& t = cfg.resolved["task"];
  const auto spec = build_spec(cfg);
  const auto m = model::discretize(spec, build_grid(cfg));
  const auto basis = build_basis(cfg, m);
  const std::vector<double> gl = numbers(t["g"]);
  std::vector<dynamics::GroundStateResult> res(gl.size());
  dynamics::GroundStateOptions opt;
  opt.tol = t["tol"];
  parallel_for(gl.size(), jobs, [&](std::size_t i) {
    res[i] = dynamics::ground_state(dynamics::assemble(m, gl[i], basis), opt);
  });
  TaskOutput out;
  out.results.header = {"g", "E0", "E0_minus_e0", "residual", "overlap_perp", "continuum_weight", "iterations"};
  json rows = json::array();
  for (std::size_t i = 0; i < gl.size(); ++i) {
    const auto& r = res[i];
    out.results.rows.push_back({fmt(gl[i]), fmt(r.E0), fmt(r.E0 - spec.e0), fmt(r.residual), fmt(r.overlap_perp),
                                fmt(r.continuum_weight), std::to_string(r.iterations)});
    rows.push_back({{"g", gl[i]}, {"E0", r.E0}, {"residual", r.residual}});
  }
  out.summary["ground_states"] = rows;
  if (!rows.empty()) out.summary["E0"] = rows[0]["E0"];
  return out;
}

TaskOutput task_transport(const RunConfig& cfg, int jobs) {
  const json& t = cfg.resolved["task"];
  const auto spec = build_spec(cfg);
  const auto m = model::discretize(spec, build_grid(cfg));
  const auto basis = build_basis(cfg, m);
  const auto cloud = build_cloud(t["cloud"], m);
  const MomentumRegion region = build_region(t["region"]);
  const std::vector<double> gl = numbers(t["g"]), Rl = numbers(t["R"]), tg = numbers(t["t"]);
  const double tau = t["tau"], tol = t["tol"];
  std::vector<std::vector<std::vector<double>>> tables(gl.size());
  std::vector<dynamics::PPDecayTable> pp(gl.size());
  parallel_for(gl.size(), jobs, [&](std::size_t i) {
    const auto sys = dynamics::assemble(m, gl[i], basis);
    const auto gs = dynamics::ground_state(sys);
    const Vec psi = dynamics::cloud_state(sys, gs, cloud, tau, 1e-2 * tol);
    tables[i] = dynamics::charge_table(sys, psi, Rl, tg, region, tol);
    if (t["pp_decay"].get<bool>()) pp[i] = dynamics::pp_charge_decay(sys, psi, Rl, tg);
  });
  TaskOutput out;
  out.results.header = {"g", "R", "t", "region", "charge", "tau", "tau_regime"};
  json plateaus = json::array();
  for (std::size_t i = 0; i < gl.size(); ++i) {
    const std::string reg = dynamics::to_string(dynamics::classify_tau(tau, gl[i], spec.smoothness_K));
    for (std::size_t r = 0; r < Rl.size(); ++r) {
      for (std::size_t k = 0; k < tg.size(); ++k)
        out.results.rows.push_back({fmt(gl[i]), fmt(Rl[r]), fmt(tg[k]), region.id, fmt(tables[i][r][k]), fmt(tau), reg});
      const auto pl = dynamics::windowed_plateau(tg, tables[i][r], t["plateau_variation"].get<double>());
      plateaus.push_back({{"g", gl[i]}, {"R", Rl[r]}, {"found", pl.found}, {"value", pl.value},
                          {"t_begin", pl.t_begin}, {"t_end", pl.t_end}});
    }
  }
  out.summary["plateaus"] = plateaus;
  if (t["pp_decay"].get<bool>()) {
    Table pt;
    pt.header = {"g", "R", "sup_norm", "retained_eigenvectors"};
    for (std::size_t i = 0; i < gl.size(); ++i)
      for (std::size_t r = 0; r < pp[i].R.size(); ++r)
        pt.rows.push_back({fmt(gl[i]), fmt(pp[i].R[r]), fmt(pp[i].sup_norm[r]), std::to_string(pp[i].retained_eigenvectors)});
    out.plotdata["pp_decay"] = pt;
  }
  return out;
}

TaskOutput task_leading(const RunConfig& cfg, int jobs) {
  const json& t = cfg.resolved["task"];
  const auto spec = build_spec(cfg);
  const double E0 = t["E0"].is_null() ? spec.e0 : t["E0"].get<double>();
  const std::string rs = t["regime"];
  if (rs != "infinity" && rs != "zero") throw ConfigError("key 'task.regime' must be \"infinity\" or \"zero\"");
  const leading::Regime regime = rs == "zero" ? leading::Regime::zero : leading::Regime::infinity;
  const auto cloud = build_continuum_cloud(t["orbitals"], spec.dim);
  leading::LeadingOptions lo;
  lo.tol = t["tol"];
  std::vector<MomentumRegion> regions;
  for (const auto& r : t["regions"]) regions.push_back(build_region(r));
  std::vector<double> Q(regions.size());
  parallel_for(regions.size(), jobs, [&](std::size_t i) {
    Q[i] = leading::charge_Q(cloud, regions[i], spec, E0, regime, lo);
  });
  TaskOutput out;
  out.results.header = {"region", "regime", "E0", "Q"};
  json qs = json::array();
  for (std::size_t i = 0; i < regions.size(); ++i) {
    out.results.rows.push_back({regions[i].id, rs, fmt(E0), fmt(Q[i])});
    qs.push_back({{"region", regions[i].id}, {"Q", Q[i]}});
  }
  out.summary["charges"] = qs;

  double rmax = 0.0;
  for (const auto& o : cloud.orbitals) rmax = std::max(rmax, o.r_max);
  const double pmax = 1.5 * std::sqrt(std::max(E0 + rmax, 1.0));
  const int n = t["p_samples"];
  Table pairing;
  pairing.header = {"orbital", "p", "re", "im", "shell_re", "shell_im", "pv_re", "pv_im"};
  for (std::size_t j = 0; j < cloud.orbitals.size(); ++j)
    for (int i = 0; i < n; ++i) {
      const double p = n > 1 ? pmax * i / (n - 1) : 0.0;
      const auto r = leading::pair_L(Vec3(p, 0, 0), cloud.orbitals[j], spec, E0, regime, lo);
      pairing.rows.push_back({std::to_string(j), fmt(p), fmt(r.value.real()), fmt(r.value.imag()),
                              fmt(r.shell_part.real()), fmt(r.shell_part.imag()), fmt(r.pv_part.real()),
                              fmt(r.pv_part.imag())});
    }
  out.plotdata["pairing"] = pairing;

  if (t["crosscheck"].get<bool>()) {
    dyson::CrosscheckOptions co;
    co.levels.clear();
    for (const auto& v : t["crosscheck_levels"]) co.levels.push_back(v.get<int>());
    co.leading = lo;
    Table cc;
    cc.header = {"region", "n_radial", "horizon", "discrete", "continuum", "rel_diff"};
    json cs = json::array();
    for (const auto& reg : regions) {
      const auto res = dyson::closed_form_crosscheck(cloud, reg, spec, regime, co);
      for (const auto& l : res.levels)
        cc.rows.push_back({reg.id, std::to_string(l.n_radial), fmt(l.horizon), fmt(l.discrete), fmt(l.continuum), fmt(l.rel_diff)});
      cs.push_back({{"region", reg.id}, {"rel_diff", res.rel_diff}});
    }
    out.plotdata["crosscheck"] = cc;
    out.summary["crosscheck"] = cs;
  }
  return out;
}

TaskOutput task_monochromatic(const RunConfig& cfg, int jobs) {
  const json& t = cfg.resolved["task"];
  const auto spec = build_spec(cfg);
  const double E0 = t["E0"].is_null() ? spec.e0 : t["E0"].get<double>();
  const auto chi = leading::bump_profile();
  const auto kappa = isotropic(spec.dim);
  const MomentumRegion region = build_region(t["region"]);
  const std::vector<double> om = numbers(t["omega"]), deltas = numbers(t["deltas"]);
  std::vector<leading::MonochromaticResult> res(om.size());
  std::vector<std::vector<leading::DeltaSweepRow>> sweeps(om.size());
  parallel_for(om.size(), jobs, [&](std::size_t i) {
    res[i] = leading::monochromatic(om[i], chi, kappa, region, spec, E0);
    sweeps[i] = leading::monochromatic_sweep(om[i], deltas, chi, kappa, region, spec, E0);
  });
  TaskOutput out;
  out.results.header = {"omega", "case", "theta0", "I", "limit_charge"};
  Table sw;
  sw.header = {"omega", "delta", "charge", "limit_charge"};
  for (std::size_t i = 0; i < om.size(); ++i) {
    out.results.rows.push_back({fmt(om[i]), leading::to_string(res[i].mono_case), fmt(res[i].theta0),
                                fmt(res[i].I_value), fmt(res[i].limit_charge)});
    for (const auto& r : sweeps[i]) sw.rows.push_back({fmt(om[i]), fmt(r.delta), fmt(r.charge), fmt(res[i].limit_charge)});
  }
  out.plotdata["delta_sweep"] = sw;
  return out;
}

TaskOutput task_dyson(const RunConfig& cfg, int jobs) {
  const json& t = cfg.resolved["task"];
  const auto spec = build_spec(cfg);
  const auto m = model::discretize(spec, build_grid(cfg));
  const auto basis = build_basis(cfg, m);
  const auto cloud = build_cloud(t["cloud"], m);
  const MomentumRegion region = build_region(t["region"]);
  dyson::CompareOptions opt;
  opt.t = t["t"];
  opt.tau = t["tau"];
  const std::string rg = t["regime"];
  if (rg != "short" && rg != "long") throw ConfigError("key 'task.regime' must be \"short\" or \"long\"");
  opt.regime = rg == "long" ? dyson::PhiRegime::long_time : dyson::PhiRegime::short_time;
  opt.R = t["R"];
  opt.t_grid = numbers(t["t_grid"]);
  opt.plateau_variation = t["plateau_variation"];
  opt.tol = t["tol"];
  opt.horizon = t["horizon"];
  opt.K = spec.smoothness_K;
  const std::vector<double> gl = numbers(t["g"]);
  std::vector<dyson::CompareRow> rows(gl.size());
  parallel_for(gl.size(), jobs, [&](std::size_t i) {
    rows[i] = dyson::theorem_compare(m, basis, cloud, region, {gl[i]}, opt).rows[0];
  });
  TaskOutput out;
  out.results.header = {"g", "E0", "horizon", "lhs_error", "formula_Q", "dynamic_Q", "plateau_begin", "plateau_end"};
  std::vector<double> gx, lhs, qg, qd;
  for (const auto& r : rows) {
    out.results.rows.push_back({fmt(r.g), fmt(r.E0), fmt(r.horizon), fmt(r.lhs_error), fmt(r.formula_Q),
                                fmt(r.dynamic_Q), fmt(r.plateau.t_begin), fmt(r.plateau.t_end)});
    if (r.g > 0.0 && r.lhs_error > 0.0) gx.push_back(r.g), lhs.push_back(r.lhs_error);
    if (r.g > 0.0 && std::isfinite(r.dynamic_Q) && r.dynamic_Q != r.formula_Q)
      qg.push_back(r.g), qd.push_back(std::abs(r.dynamic_Q - r.formula_Q));
  }
  out.summary["lhs_slope"] = gx.size() >= 2 ? json(dyson::loglog_slope(gx, lhs)) : json(nullptr);
  out.summary["q_diff_slope"] = qg.size() >= 2 ? json(dyson::loglog_slope(qg, qd)) : json(nullptr);
  const std::vector<double> dt = numbers(t["duhamel_t"]);
  if (!dt.empty()) {
    Table du;
    du.header = {"g", "t", "residual"};
    for (double g : gl) {
      const auto sys = dynamics::assemble(m, g, basis);
      const auto gs = dynamics::ground_state(sys);
      for (double tt : dt) du.rows.push_back({fmt(g), fmt(tt), fmt(dyson::duhamel_residual(sys, gs, cloud, tt, 1e-8).residual)});
    }
    out.plotdata["duhamel"] = du;
  }
  return out;
}

TaskOutput task_bogoliubov(const RunConfig& cfg, int jobs) {
  const json& t = cfg.resolved["task"];
  const std::string name = t["problem"];
  bogoliubov::BogoliubovProblem prob;
  if (name == "schrodinger-toy") {
    const json& q = t["toy"];
    bogoliubov::SchrodingerToyParams sp;
    sp.points = q["points"];
    sp.h_x = q["h_x"];
    sp.V0 = q["V0"];
    sp.a = q["a"];
    sp.c = q["c"];
    sp.b = q["b"];
    sp.sigma_k = q["sigma_k"];
    sp.modes = build_grid(cfg).modes;
    prob = bogoliubov::schrodinger_toy(sp);
  } else if (name == "model") {
    prob = bogoliubov::from_model(model::discretize(build_spec(cfg), build_grid(cfg)));
  } else {
    throw ConfigError("key 'task.problem' must be \"schrodinger-toy\" or \"model\"");
  }
  const std::vector<double> gl = numbers(t["g"]);
  std::vector<bogoliubov::BogoliubovResult> res(gl.size());
  parallel_for(gl.size(), jobs, [&](std::size_t i) {
    res[i] = bogoliubov::solve_fixed_point(gl[i], prob, t["tol"].get<double>(), t["max_iter"].get<int>());
  });
  const Vec h0 = bogoliubov::h0_vector(prob);
  TaskOutput out;
  out.results.header = {"g", "iterations", "e_g", "gauge_residual", "fixed_point_residual", "final_ratio", "h_norm",
                        "h_minus_h0_norm"};
  Table ratios;
  ratios.header = {"g", "iteration", "ratio"};
  json js = json::array();
  for (std::size_t i = 0; i < gl.size(); ++i) {
    const auto& r = res[i];
    const double last = r.contraction_ratios.empty() ? 0.0 : r.contraction_ratios.back();
    out.results.rows.push_back({fmt(gl[i]), std::to_string(r.iterations), fmt(r.e_g), fmt(r.gauge_residual),
                                fmt(r.fixed_point_residual), fmt(last), fmt(r.h_g.norm()), fmt((r.h_g - h0).norm())});
    for (std::size_t k = 0; k < r.contraction_ratios.size(); ++k)
      ratios.rows.push_back({fmt(gl[i]), std::to_string(k + 1), fmt(r.contraction_ratios[k])});
    json j = bogoliubov::to_json(r);
    j["g"] = gl[i];
    js.push_back(j);
  }
  out.plotdata["contraction_ratios"] = ratios;
  out.summary["results"] = js;
  return out;
}

TaskOutput task_validate(const RunConfig& cfg, int) {
  const json& t = cfg.resolved["task"];
  TaskOutput out;
  out.results.header = {"suite", "passed", "detail"};
  json suites = json::object();
  auto record = [&](const std::string& name, const std::function<std::string()>& body) {
    bool ok = true;
    std::string detail;
    try {
      detail = body();
    } catch (const ValidationError& e) {
      ok = false;
      detail = e.what();
    }
    out.results.rows.push_back({name, ok ? "true" : "false", "\"" + detail + "\""});
    suites[name] = ok;
    out.invariants_ok = out.invariants_ok && ok;
  };
  const auto spec = build_spec(cfg);
  const auto m = model::discretize(spec, build_grid(cfg));
  const auto basis = build_basis(cfg, m);
  const double g = t["g"];
  record("model_invariants", [&] {
    m.check_invariants();
    return std::string("modes=") + std::to_string(m.mode_count());
  });
  record("bound_bound_zero", [&] {
    for (const auto& G : m.coupling)
      if (G.coeff(m.bound_index(), m.bound_index()) != cd(0.0)) throw ValidationError("nonzero (b,b) entry");
    return std::string("exact");
  });
  record("eta_rho_symmetry", [&] {
    if (!spec.eta_is_rho) return std::string("not applicable");
    const int b = m.bound_index();
    for (const auto& G : m.coupling)
      for (int i = 0; i < m.P(); ++i)
        if (G.coeff(i, b) != std::conj(G.coeff(b, i))) throw ValidationError("column is not the adjoint of the row");
    return std::string("exact");
  });
  record("fock_count", [&] {
    const double expect = fock::binomial(basis.mode_count() + basis.max_total(), basis.max_total());
    if (static_cast<double>(basis.size()) != expect) throw ValidationError("basis size differs from C(M+N, N)");
    return std::to_string(basis.size()) + " states";
  });
  const auto sys = dynamics::assemble(m, g, basis);
  record("hamiltonian_hermitian", [&] {
    const SpMat d = sys.H - SpMat(sys.H.adjoint());
    for (int k = 0; k < d.outerSize(); ++k)
      for (SpMat::InnerIterator it(d, k); it; ++it)
        if (it.value() != cd(0.0)) throw ValidationError("H - H^dagger is not exactly zero");
    return std::string("exact");
  });
  record("ccr_guarded", [&] {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd;
    Vec f(basis.mode_count()), h(basis.mode_count());
    for (int i = 0; i < basis.mode_count(); ++i) f[i] = cd(nd(rng), nd(rng)), h[i] = cd(nd(rng), nd(rng));
    const SpMat a = fock::ladder(basis, f, fock::LadderKind::annihilate).entries;
    const SpMat ad = fock::ladder(basis, h, fock::LadderKind::create).entries;
    const SpMat guard = fock::sector_projector(basis, 0, basis.max_total() - 1);
    const Mat c = Mat(SpMat(a * ad - ad * a) * guard) - f.dot(h) * Mat(guard);
    const double err = c.cwiseAbs().maxCoeff();
    if (err > 1e-12 * std::max(1.0, std::abs(f.dot(h)))) throw ValidationError("CCR violated: " + fmt(err));
    return "max error " + fmt(err);
  });
  record("ground_state", [&] {
    dynamics::GroundStateOptions o;
    o.tol = t["tol"];
    try {
      const auto gs = dynamics::ground_state(sys, o);
      return "E0=" + fmt(gs.E0) + " residual=" + fmt(gs.residual);
    } catch (const ConvergenceError& e) {
      throw ValidationError(e.what());
    }
  });
  out.summary["suites"] = suites;
  out.summary["all_passed"] = out.invariants_ok;
  return out;
}

}  // namespace

RunOutcome run(const RunConfig& cfg, int jobs) {
  const auto start = std::chrono::steady_clock::now();
  TaskOutput out;
  if (cfg.task == "ground-state") out = task_ground_state(cfg, jobs);
  else if (cfg.task == "transport-sweep") out = task_transport(cfg, jobs);
  else if (cfg.task == "leading-order") out = task_leading(cfg, jobs);
  else if (cfg.task == "monochromatic") out = task_monochromatic(cfg, jobs);
  else if (cfg.task == "dyson-compare") out = task_dyson(cfg, jobs);
  else if (cfg.task == "bogoliubov") out = task_bogoliubov(cfg, jobs);
  else if (cfg.task == "validate") out = task_validate(cfg, jobs);
  else throw ConfigError("unknown task 'task.name' = '" + cfg.task + "'");

  const std::filesystem::path dir(cfg.output);
  std::filesystem::create_directories(dir);
  out.results.write(dir / "results.csv");
  if (!out.plotdata.empty()) {
    std::filesystem::create_directories(dir / "plotdata");
    for (const auto& [name, table] : out.plotdata) table.write(dir / "plotdata" / (name + ".csv"));
  }
  RunOutcome r;
  r.exit_code = out.invariants_ok ? 0 : 2;
  json s = out.summary;
  s["schema"] = "photoion-summary-v1";
  s["task"] = cfg.task;
  s["version"] = kVersion;
  s["config"] = cfg.resolved;
  s["exit_code"] = r.exit_code;
  s["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream(dir / "summary.json") << s.dump(2) << "\n";
  r.summary = s;
  return r;
}

}  // namespace photoion::cli
