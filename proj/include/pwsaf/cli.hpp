#pragma once

// Command-line front end. Needs CLI11.hpp and json.hpp on the include path.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pwsaf/array_solver.hpp"
#include "pwsaf/csv.hpp"
#include "pwsaf/extraction.hpp"
#include "pwsaf/sample_table.hpp"
#include "pwsaf/stability.hpp"
#include "pwsaf/validation.hpp"

namespace pwsaf::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

enum exit_code : int { ok = 0, config_failure = 1, numeric_failure = 2 };

// ---------------------------------------------------------------------------
// Config

/// Typed access to one JSON object; unknown keys are rejected by finish() so
/// that a misspelt unit suffix cannot silently fall back to a default.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw config_error(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw config_error(path_ + "." + key + ": missing");
    const json& v = j_.at(key);
    if (!v.is_number()) throw config_error(path_ + "." + key + ": expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : (seen_.insert(key), fallback);
  }
  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }
  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const double v = number(key);
    if (!(v >= 0.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
      throw config_error(path_ + "." + key + ": expected a non-negative integer");
    return static_cast<std::size_t>(v);
  }
  std::string string(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    if (!j_.at(key).is_string()) throw config_error(path_ + "." + key + ": expected a string");
    return j_.at(key).get<std::string>();
  }

  void allow(const std::string& key) { seen_.insert(key); }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.contains(k)) throw config_error(path_ + ": unknown key '" + k + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

struct OscillatorEntry {
  std::optional<VdpParams> vdp;
  std::optional<std::vector<AdmittanceSample>> table;
};

enum class ModelKind { pw, non_pw, exact };

inline ModelKind parse_model(const std::string& s) {
  if (s == "pw") return ModelKind::pw;
  if (s == "non_pw" || s == "non-pw") return ModelKind::non_pw;
  if (s == "exact") return ModelKind::exact;
  throw config_error("model must be one of pw, non_pw, exact (got '" + s + "')");
}

inline const char* model_name(ModelKind k) {
  switch (k) {
    case ModelKind::pw: return "pw";
    case ModelKind::non_pw: return "non_pw";
    case ModelKind::exact: return "exact";
  }
  return "?";
}

struct RunConfig {
  std::vector<OscillatorEntry> oscillators;
  CouplingParams coupling{};
  SamplingGrid grid;
  Anchoring anchoring = Anchoring::left;
  double sanity_factor = 0.2;
  std::size_t q = 0;  // zero-based
  double eta_q = 0.0;
  ModelKind model = ModelKind::pw;
  double non_pw_eta_c = 0.0;
  SolverOptions solver;
  double sweep_min_step_fraction = 1.0 / 64.0;

  double solve_dphi = 0.0;
  InjectionSource solve_injection;

  double sweep_start = -1.4, sweep_stop = 1.4, sweep_step = 0.05;
  double stability_resolution = 1e-3;

  double inject_i_s = 0.0, inject_dphi = 0.0;
  std::size_t inject_theta_steps = 72;

  std::optional<double> max_eta_error, antisymmetry_tol, min_non_pw_ratio;
  std::optional<double> window_min, window_max;  ///< comparison range [rad]

  fs::path output_dir = "out";
};

inline VdpParams parse_vdp(Section& s) {
  VdpParams p{};
  p.a = s.number("a_s");
  p.b = s.number("b_a_per_v3");
  p.l = s.number("l_nh") * 1e-9;
  p.varactor.c_jo = s.number("c_jo_pf") * 1e-12;
  p.varactor.m = s.number("m");
  if (const auto c = s.optional_number("c_out_pf")) p.c_out = *c * 1e-12;
  p.g_load = 1.0 / s.number("r_load_ohm");
  const auto v_bi = s.optional_number("v_bi_v");
  const double cal_eta = s.number("calibrate_eta_v", 2.5);
  const double cal_f = s.number("calibrate_f_ghz", 5.2) * 1e9;
  p.varactor.v_bi = v_bi ? *v_bi : calibrate_vbi(p, cal_eta, cal_f);
  p.validate();
  return p;
}

inline RunConfig parse_config(const json& root, const fs::path& base_dir) {
  Section top(root, "config");
  RunConfig c;

  const json empty = json::object();
  const json& defaults_j = root.contains("oscillator_defaults") ? root.at("oscillator_defaults") : empty;
  if (root.contains("oscillator_defaults") && !defaults_j.is_object())
    throw config_error("config.oscillator_defaults: expected an object");
  if (!root.contains("oscillators") || !root.at("oscillators").is_array())
    throw config_error("config.oscillators: expected an array");
  const json& list = root.at("oscillators");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "config.oscillators[" + std::to_string(i) + "]";
    if (!list[i].is_object()) throw config_error(path + ": expected an object");
    OscillatorEntry e;
    if (list[i].contains("sample_table")) {
      Section s(list[i], path);
      const fs::path file = base_dir / s.string("sample_table", "");
      s.finish();
      std::ifstream in(file);
      if (!in) throw config_error(path + ": cannot open sample table " + file.string());
      e.table = read_sample_table(in);
    } else {
      json merged = defaults_j;
      merged.update(list[i]);
      Section s(merged, path);
      e.vdp = parse_vdp(s);
      s.finish();
    }
    c.oscillators.push_back(std::move(e));
  }
  if (c.oscillators.size() < 2) throw config_error("config.oscillators: need at least two");

  if (!root.contains("coupling")) throw config_error("config.coupling: missing");
  {
    Section s(root.at("coupling"), "config.coupling");
    c.coupling.z_o = s.number("z_o_ohm");
    c.coupling.psi_o = s.number("psi_o_deg") * std::numbers::pi / 180.0;
    c.coupling.f_ref = s.number("f_ref_ghz") * 1e9;
    c.coupling.r_s = s.number("r_s_ohm");
    c.coupling.r_p = s.number("r_p_ohm");
    const std::string topo = s.string("topology", "loaded_line");
    if (topo == "loaded_line") c.coupling.topology = CouplingTopology::loaded_line;
    else if (topo == "pi") c.coupling.topology = CouplingTopology::pi;
    else throw config_error("config.coupling.topology: expected loaded_line or pi");
    s.finish();
    c.coupling.validate();
  }

  if (root.contains("grid")) {
    Section s(root.at("grid"), "config.grid");
    const double lo = s.number("eta_min_v"), hi = s.number("eta_max_v");
    const std::size_t p = s.count("points", 0);
    if (p < 2) throw config_error("config.grid.points: need at least 2");
    c.grid = SamplingGrid::uniform(lo, hi, p);
    c.grid.validate();
    const std::string anch = s.string("anchoring", "left");
    if (anch == "left") c.anchoring = Anchoring::left;
    else if (anch == "nearest") c.anchoring = Anchoring::nearest;
    else throw config_error("config.grid.anchoring: expected left or nearest");
    c.sanity_factor = s.number("sanity_factor", 0.2);
    s.finish();
  }

  if (!root.contains("array")) throw config_error("config.array: missing");
  {
    Section s(root.at("array"), "config.array");
    const std::size_t q = s.count("q", 0);
    if (q < 1 || q > c.oscillators.size())
      throw config_error("config.array.q: must lie in 1..N (one-based)");
    c.q = q - 1;
    c.eta_q = s.number("eta_q_v");
    c.model = parse_model(s.string("model", "pw"));
    c.non_pw_eta_c = s.number("non_pw_eta_c_v", c.eta_q);
    s.finish();
  }

  if (root.contains("solver")) {
    Section s(root.at("solver"), "config.solver");
    c.solver.newton.tolerance = s.number("tolerance", c.solver.newton.tolerance);
    c.solver.newton.max_iterations =
        static_cast<int>(s.count("max_iterations", static_cast<std::size_t>(c.solver.newton.max_iterations)));
    c.solver.newton.max_halvings =
        static_cast<int>(s.count("max_halvings", static_cast<std::size_t>(c.solver.newton.max_halvings)));
    c.solver.gap_fraction = s.number("gap_fraction", c.solver.gap_fraction);
    c.sweep_min_step_fraction = s.number("min_step_fraction", c.sweep_min_step_fraction);
    s.finish();
    if (!(c.solver.newton.tolerance > 0.0)) throw config_error("config.solver.tolerance must be positive");
  }

  if (root.contains("solve")) {
    Section s(root.at("solve"), "config.solve");
    c.solve_dphi = s.number("dphi_rad", 0.0);
    c.solve_injection.i_s = s.number("i_s_ma", 0.0) * 1e-3;
    c.solve_injection.theta_s = s.number("theta_s_rad", 0.0);
    s.finish();
  }
  if (root.contains("sweep")) {
    Section s(root.at("sweep"), "config.sweep");
    c.sweep_start = s.number("dphi_start_rad");
    c.sweep_stop = s.number("dphi_stop_rad");
    c.sweep_step = s.number("dphi_step_rad");
    s.finish();
    if (!(c.sweep_step > 0.0) || !(c.sweep_stop >= c.sweep_start))
      throw config_error("config.sweep: need step > 0 and stop >= start");
  }
  if (root.contains("stability")) {
    Section s(root.at("stability"), "config.stability");
    c.stability_resolution = s.number("resolution_rad", c.stability_resolution);
    s.finish();
  }
  if (root.contains("injection")) {
    Section s(root.at("injection"), "config.injection");
    c.inject_i_s = s.number("i_s_ma") * 1e-3;
    c.inject_dphi = s.number("dphi_rad");
    c.inject_theta_steps = s.count("theta_steps", c.inject_theta_steps);
    s.finish();
    if (c.inject_theta_steps < 2) throw config_error("config.injection.theta_steps: need >= 2");
  }
  if (root.contains("validate")) {
    Section s(root.at("validate"), "config.validate");
    c.max_eta_error = s.optional_number("max_eta_error_v");
    c.antisymmetry_tol = s.optional_number("antisymmetry_tol_v");
    c.min_non_pw_ratio = s.optional_number("min_non_pw_ratio");
    c.window_min = s.optional_number("dphi_min_rad");
    c.window_max = s.optional_number("dphi_max_rad");
    s.finish();
  }
  c.output_dir = base_dir / top.string("output_dir", "out");
  for (const char* k : {"oscillator_defaults", "oscillators", "coupling", "grid", "array", "solver",
                        "solve", "sweep", "stability", "injection", "validate"})
    top.allow(k);
  top.finish();

  const bool any_vdp = std::any_of(c.oscillators.begin(), c.oscillators.end(),
                                   [](const OscillatorEntry& e) { return e.vdp.has_value(); });
  if (any_vdp && c.grid.eta.empty())
    throw config_error("config.grid: required when oscillators are Van der Pol models");
  return c;
}

inline RunConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw config_error("cannot open config file " + file.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw config_error("config file " + file.string() + ": " + e.what());
  }
  return parse_config(root, file.parent_path());
}

// ---------------------------------------------------------------------------
// Model construction

inline std::shared_ptr<const VanDerPolOscillator> oracle_of(const OscillatorEntry& e) {
  return std::make_shared<VanDerPolOscillator>(*e.vdp);
}

inline ElementModel build_element(const RunConfig& c, const OscillatorEntry& e, ModelKind kind) {
  ExtractionOptions xo;
  xo.anchoring = c.anchoring;
  xo.sanity_factor = c.sanity_factor;
  switch (kind) {
    case ModelKind::pw:
      if (e.table) return PiecewiseModel(*e.table, c.anchoring, c.sanity_factor);
      return extract_piecewise(*oracle_of(e), c.grid, xo);
    case ModelKind::non_pw:
      if (e.table) {
        const auto& t = *e.table;
        const auto best = std::min_element(t.begin(), t.end(), [&](const auto& a, const auto& b) {
          return std::abs(a.eta_c - c.non_pw_eta_c) < std::abs(b.eta_c - c.non_pw_eta_c);
        });
        return NonPwModel{*best};
      }
      return extract_non_pw(*oracle_of(e), c.non_pw_eta_c, xo);
    case ModelKind::exact:
      if (!e.vdp) throw config_error("the exact model needs analytic oscillators, not sample tables");
      return OracleElement{oracle_of(e), 0.0, std::numeric_limits<double>::infinity()};
  }
  throw config_error("unknown model");
}

inline ArraySpec build_spec(const RunConfig& c, ModelKind kind) {
  ArraySpec s;
  s.coupling = c.coupling;
  s.q = c.q;
  s.eta_q = c.eta_q;
  for (const auto& e : c.oscillators) s.models.push_back(build_element(c, e, kind));
  s.validate();
  return s;
}

inline SweepOptions sweep_options(const RunConfig& c) {
  SweepOptions o;
  o.solver = c.solver;
  o.min_step_fraction = c.sweep_min_step_fraction;
  return o;
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns its output files; nothing touches the disk until
// the whole computation has finished.

using Files = std::map<std::string, std::string>;

struct Outcome {
  int code = ok;
  Files files;
};

inline Outcome cmd_extract(const RunConfig& c, std::ostream& out) {
  Outcome r;
  for (std::size_t i = 0; i < c.oscillators.size(); ++i) {
    const auto& e = c.oscillators[i];
    std::vector<AdmittanceSample> samples;
    if (e.table) {
      samples = *e.table;
    } else {
      ExtractionOptions xo;
      xo.anchoring = c.anchoring;
      xo.sanity_factor = c.sanity_factor;
      samples = extract_piecewise(*oracle_of(e), c.grid, xo).samples();
    }
    std::ostringstream os;
    write_sample_table(os, samples);
    const std::string name = "samples_" + std::to_string(i + 1) + ".csv";
    r.files[name] = os.str();
    std::size_t warnings = 0;
    for (const auto& s : samples) warnings += s.warning ? 1 : 0;
    out << name << ": " << samples.size() << " samples";
    if (warnings) out << ", " << warnings << " derivative warnings";
    out << '\n';
  }
  return r;
}

inline Outcome cmd_solve(const RunConfig& c, ModelKind kind, std::ostream& out) {
  const ArraySpec spec = build_spec(c, kind);
  const auto sol = solve_constant_phase(spec, c.solve_injection, c.solve_dphi, std::nullopt, c.solver);
  std::ostringstream os;
  write_sweep_header(os, spec.size());
  write_sweep_row(os, c.solve_dphi, sol, model_name(kind));
  out << "f_s = " << detail::fmt12(sol.omega_s / two_pi) << " Hz, residual "
      << detail::fmt12(sol.residual_norm) << ", " << sol.iterations << " iterations"
      << (sol.boundary_gap ? ", boundary gap" : "") << '\n';
  for (std::size_t i = 0; i < spec.size(); ++i)
    out << "  osc " << i + 1 << ": V = " << detail::fmt12(sol.v[i])
        << " V, eta = " << detail::fmt12(sol.eta[i]) << " V\n";
  return {ok, {{"solution.csv", os.str()}}};
}

inline SolutionCurve run_sweep(const RunConfig& c, const ArraySpec& spec) {
  return sweep_phase(spec, InjectionSource{}, c.sweep_start, c.sweep_stop, c.sweep_step,
                     sweep_options(c));
}

inline void report_gaps(const SolutionCurve& curve, std::ostream& out) {
  for (const auto& p : curve.points)
    if (!p.solution) out << "  gap at " << detail::fmt12(p.param) << ": " << p.diagnostic << '\n';
}

inline Outcome cmd_sweep(const RunConfig& c, ModelKind kind, std::ostream& out) {
  const ArraySpec spec = build_spec(c, kind);
  const SolutionCurve curve = run_sweep(c, spec);
  std::ostringstream os;
  write_sweep_csv(os, curve, spec.size(), model_name(kind));
  out << "sweep (" << model_name(kind) << "): " << curve.converged_count() << "/"
      << curve.points.size() << " points converged\n";
  report_gaps(curve, out);
  return {ok, {{std::string("sweep_") + model_name(kind) + ".csv", os.str()}}};
}

inline Outcome cmd_stability(const RunConfig& c, ModelKind kind, unsigned jobs, std::ostream& out) {
  const ArraySpec spec = build_spec(c, kind);
  const SolutionCurve curve = run_sweep(c, spec);
  StableRangeOptions so;
  so.resolution = c.stability_resolution;
  so.jobs = jobs;
  so.solver = c.solver;
  const auto res = stable_range(spec, InjectionSource{}, curve, so);
  std::ostringstream trace, iv;
  write_stability_trace_csv(trace, res.trace, spec.size());
  write_intervals_csv(iv, res.intervals);
  out << "stable intervals (" << model_name(kind) << "):\n";
  for (const auto& i : res.intervals)
    out << "  [" << detail::fmt12(i.lo) << ", " << detail::fmt12(i.hi) << "] rad\n";
  if (res.intervals.empty()) out << "  none\n";
  return {ok, {{"stability_trace.csv", trace.str()}, {"stable_intervals.csv", iv.str()}}};
}

inline Outcome cmd_inject_sweep(const RunConfig& c, ModelKind kind, std::ostream& out) {
  const ArraySpec spec = build_spec(c, kind);
  const SolutionCurve curve =
      sweep_injection(spec, c.inject_dphi, c.inject_i_s, c.inject_theta_steps, sweep_options(c));
  std::ostringstream os;
  write_sweep_csv(os, curve, spec.size(), model_name(kind));
  out << "injection sweep (" << model_name(kind) << "): " << curve.converged_count() << "/"
      << curve.points.size() << " points converged";
  if (curve.converged_count())
    out << ", locking bandwidth " << detail::fmt12(locking_bandwidth(curve) / two_pi) << " Hz";
  out << '\n';
  report_gaps(curve, out);
  return {ok, {{"inject_sweep.csv", os.str()}}};
}

inline Outcome cmd_validate(const RunConfig& c, unsigned jobs, std::ostream& out) {
  const ModelKind kinds[] = {ModelKind::pw, ModelKind::non_pw, ModelKind::exact};
  std::vector<ArraySpec> specs;
  for (ModelKind k : kinds) specs.push_back(build_spec(c, k));
  std::vector<SolutionCurve> curves(3);
  detail::parallel_for(3, jobs, [&](std::size_t i) { curves[i] = run_sweep(c, specs[i]); });

  Outcome r;
  for (std::size_t i = 0; i < 3; ++i) {
    std::ostringstream os;
    write_sweep_csv(os, curves[i], specs[i].size(), model_name(kinds[i]));
    r.files[std::string("sweep_") + model_name(kinds[i]) + ".csv"] = os.str();
  }
  // Both models are measured on the range where all three curves converged.
  const auto a = converged_span(curves[0]), b = converged_span(curves[1]);
  std::pair window{std::max(a.first, b.first), std::min(a.second, b.second)};
  if (c.window_min) window.first = std::max(window.first, *c.window_min);
  if (c.window_max) window.second = std::min(window.second, *c.window_max);
  const CurveComparison pw = compare_curves(curves[0], curves[2], window);
  const CurveComparison np = compare_curves(curves[1], curves[2], window);
  std::ostringstream cmp;
  write_comparison_header(cmp);
  write_comparison_row(cmp, "pw", "exact", pw);
  write_comparison_row(cmp, "non_pw", "exact", np);
  r.files["comparison.csv"] = cmp.str();

  std::ostringstream chk;
  chk << "check,value,limit,pass\n";
  bool all = true;
  auto check = [&](const char* name, double value, double limit, bool pass) {
    chk << name << ',' << detail::fmt12(value) << ',' << detail::fmt12(limit) << ','
        << (pass ? 1 : 0) << '\n';
    out << (pass ? "ok   " : "FAIL ") << name << " = " << detail::fmt12(value) << " (limit "
        << detail::fmt12(limit) << ")\n";
    all = all && pass;
  };
  out << "common range [" << detail::fmt12(window.first) << ", " << detail::fmt12(window.second)
      << "] rad, " << pw.count << " points\n";
  if (c.max_eta_error) check("pw_max_eta_error_v", pw.max_abs_eta_error, *c.max_eta_error,
                             pw.max_abs_eta_error < *c.max_eta_error);
  if (c.min_non_pw_ratio) {
    const double ratio = np.max_abs_eta_error / pw.max_abs_eta_error;
    check("non_pw_to_pw_error_ratio", ratio, *c.min_non_pw_ratio, ratio > *c.min_non_pw_ratio);
  }
  if (c.antisymmetry_tol) {
    const double e = antisymmetry_error(curves[0], c.eta_q, window);
    check("pw_antisymmetry_v", e, *c.antisymmetry_tol, e < *c.antisymmetry_tol);
  }
  r.files["checks.csv"] = chk.str();
  r.code = all ? ok : numeric_failure;
  return r;
}

// ---------------------------------------------------------------------------
// Entry point

inline void write_files(const fs::path& dir, const Files& files) {
  fs::create_directories(dir);
  for (const auto& [name, content] : files) {
    std::ofstream f(dir / name, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  }
}

inline int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Piecewise semi-analytical analysis of coupled-oscillator arrays", "pwsaf"};
  app.require_subcommand(1);
  std::string config_path, out_dir, model_flag;
  unsigned jobs = 1;

  struct Sub {
    const char* name;
    const char* help;
    bool takes_model;
  };
  const Sub subs[] = {
      {"extract", "sample each oscillator over the grid and write sample tables", false},
      {"solve", "solve one constant phase-shift point", true},
      {"sweep", "continuation over the phase-shift range", true},
      {"stability", "pole trace and stable intervals along the sweep", true},
      {"inject-sweep", "injection-phase sweep at fixed phase shift", true},
      {"validate", "compare piecewise and single-point models against the exact solve", false},
  };
  for (const auto& s : subs) {
    CLI::App* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("-c,--config", config_path, "JSON run configuration")->required();
    sc->add_option("-o,--out", out_dir, "output directory (overrides output_dir)");
    sc->add_option("-j,--jobs", jobs, "worker threads for parallel stages")->check(CLI::PositiveNumber);
    if (s.takes_model)
      sc->add_option("-m,--model", model_flag, "pw, non_pw or exact (overrides array.model)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return config_failure;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  ModelKind kind = ModelKind::pw;
  try {
    cfg = load_config(config_path);
    kind = model_flag.empty() ? cfg.model : parse_model(model_flag);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
  } catch (const error& e) {
    err << "config error: " << e.what() << '\n';
    return config_failure;
  }

  Outcome result;
  try {
    if (cmd == "extract") result = cmd_extract(cfg, out);
    else if (cmd == "solve") result = cmd_solve(cfg, kind, out);
    else if (cmd == "sweep") result = cmd_sweep(cfg, kind, out);
    else if (cmd == "stability") result = cmd_stability(cfg, kind, jobs, out);
    else if (cmd == "inject-sweep") result = cmd_inject_sweep(cfg, kind, out);
    else result = cmd_validate(cfg, jobs, out);
  } catch (const config_error& e) {
    err << "config error: " << e.what() << '\n';
    return config_failure;
  } catch (const error& e) {
    err << "numeric failure: " << e.what() << '\n';
    return numeric_failure;
  }

  try {
    write_files(cfg.output_dir, result.files);
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << '\n';
    return config_failure;
  }
  for (const auto& [name, content] : result.files) out << "wrote " << (cfg.output_dir / name).string() << '\n';
  return result.code;
}

}  // namespace pwsaf::cli
