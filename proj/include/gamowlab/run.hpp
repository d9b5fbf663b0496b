#pragma once

// Experiment configuration and the driver behind the gamow-lab CLI. Every
// number the CLI prints comes from a library call made here.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gamowlab/error.hpp"
#include "gamowlab/evolution.hpp"
#include "gamowlab/gamow.hpp"
#include "gamowlab/grid.hpp"
#include "gamowlab/hardy.hpp"
#include "gamowlab/io.hpp"
#include "gamowlab/resonance.hpp"
#include "gamowlab/smatrix.hpp"

namespace gamowlab {

enum class Experiment { decompose, evolve, decay_curve, fit_pole, smatrix_decompose };

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::decompose: return "decompose";
    case Experiment::evolve: return "evolve";
    case Experiment::decay_curve: return "decay-curve";
    case Experiment::fit_pole: return "fit-pole";
    case Experiment::smatrix_decompose: return "smatrix-decompose";
  }
  return "?";
}

inline std::optional<Experiment> parse_experiment(const std::string& s) {
  for (auto e : {Experiment::decompose, Experiment::evolve, Experiment::decay_curve,
                 Experiment::fit_pole, Experiment::smatrix_decompose})
    if (s == to_string(e)) return e;
  return std::nullopt;
}

/// Raised for malformed configuration; names the offending field.
class config_error : public error {
 public:
  config_error(const std::string& field, const std::string& what)
      : error(errc::invalid_argument, field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct GridConfig {
  GridKind kind = GridKind::full_line;
  double center = 0.0;
  double half_width = 0.0;
  double E_max = 0.0;
  std::size_t n = 0;

  GridPtr build() const {
    return kind == GridKind::full_line ? make_line_grid(center, half_width, n)
                                       : make_halfline_grid(E_max, n);
  }
};

struct WaveFunctionConfig {
  /// gamow | conjugate-gamow | poles | gaussian | file
  std::string kind = "gamow";
  std::vector<cplx> poles;
  double center = 0.0;
  double width = 1.0;
  std::string path;
};

struct SyntheticConfig {
  std::size_t points = 101;
  double E_min = 0.0;
  double E_max = 0.0;
  double noise = 0.0;
};

struct IoConfig {
  std::string input_csv;
  std::string output_path;  // empty: stdout
  std::string format = "csv";
  std::string samples_path;
};

struct RunConfig {
  Experiment experiment = Experiment::decay_curve;
  std::optional<GridConfig> grid;
  BreitWignerParams resonance{2.0, 0.4, 1.0, 0.0};
  double momentum = 1.0;
  std::vector<double> times;
  IoConfig io;
  std::uint64_t seed = 0;
  bool diagnostic = false;
  Direction direction = Direction::schrodinger_state;
  WaveFunctionConfig wavefunction;
  SyntheticConfig synthetic;
  std::vector<cplx> psi_poles;
  std::vector<cplx> phi_poles;
};

namespace config_detail {

using nlohmann::json;

inline std::string join(const std::string& a, const std::string& b) {
  return a.empty() ? b : a + "." + b;
}

inline void only_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) throw config_error(where.empty() ? "config" : where, "must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw config_error(join(where, k), "unknown key");
}

inline double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw config_error(field, "must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw config_error(field, "must be finite");
  return v;
}

inline double positive(const json& j, const std::string& field) {
  const double v = number(j, field);
  if (!(v > 0.0)) throw config_error(field, "must be positive");
  return v;
}

inline std::size_t count(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw config_error(field, "must be a non-negative integer");
  return static_cast<std::size_t>(j.get<long long>());
}

inline std::string string(const json& j, const std::string& field) {
  if (!j.is_string()) throw config_error(field, "must be a string");
  return j.get<std::string>();
}

inline std::vector<cplx> complex_list(const json& j, const std::string& field) {
  if (!j.is_array()) throw config_error(field, "must be a list of [re, im] pairs");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto f = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) throw config_error(f, "must be a [re, im] pair");
    out.emplace_back(number(j[i][0], f), number(j[i][1], f));
  }
  return out;
}

inline GridConfig parse_grid(const json& j) {
  only_keys(j, "grid", {"kind", "center", "half_width", "E_max", "n"});
  GridConfig g;
  const auto kind = j.contains("kind") ? string(j["kind"], "grid.kind") : "full-line";
  if (kind == "full-line") {
    g.kind = GridKind::full_line;
    if (j.contains("E_max")) throw config_error("grid.E_max", "not used by a full-line grid");
    g.center = j.contains("center") ? number(j["center"], "grid.center") : 0.0;
    if (!j.contains("half_width")) throw config_error("grid.half_width", "required");
    g.half_width = positive(j["half_width"], "grid.half_width");
  } else if (kind == "half-line") {
    g.kind = GridKind::half_line;
    if (j.contains("half_width") || j.contains("center"))
      throw config_error(j.contains("center") ? "grid.center" : "grid.half_width",
                         "not used by a half-line grid");
    if (!j.contains("E_max")) throw config_error("grid.E_max", "required");
    g.E_max = positive(j["E_max"], "grid.E_max");
  } else {
    throw config_error("grid.kind", "must be 'full-line' or 'half-line'");
  }
  if (!j.contains("n")) throw config_error("grid.n", "required");
  g.n = count(j["n"], "grid.n");
  if (g.n < 8) throw config_error("grid.n", "must be at least 8");
  return g;
}

inline std::vector<double> parse_times(const json& j) {
  std::vector<double> t;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      t.push_back(number(j[i], "times[" + std::to_string(i) + "]"));
    return t;
  }
  only_keys(j, "times", {"t_min", "t_max", "steps"});
  for (const char* k : {"t_min", "t_max", "steps"})
    if (!j.contains(k)) throw config_error(std::string("times.") + k, "required");
  const double a = number(j["t_min"], "times.t_min");
  const double b = number(j["t_max"], "times.t_max");
  const std::size_t n = count(j["steps"], "times.steps");
  if (n < 1) throw config_error("times.steps", "must be at least 1");
  if (n > 1 && !(b > a)) throw config_error("times.t_max", "must exceed times.t_min");
  for (std::size_t i = 0; i < n; ++i)
    t.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return t;
}

}  // namespace config_detail

inline Direction parse_direction(const std::string& s, const std::string& field) {
  if (s == "schrodinger_state" || s == "state") return Direction::schrodinger_state;
  if (s == "heisenberg_observable" || s == "observable") return Direction::heisenberg_observable;
  throw config_error(field, "must be 'schrodinger_state' or 'heisenberg_observable'");
}

/// Parses and validates a JSON config. Unknown keys are rejected.
inline RunConfig parse_config(const nlohmann::json& j) {
  using namespace config_detail;
  only_keys(j, "", {"experiment", "grid", "resonance", "momentum", "times", "io", "seed",
                    "diagnostic", "direction", "wavefunction", "synthetic", "smatrix"});
  RunConfig c;
  if (!j.contains("experiment")) throw config_error("experiment", "required");
  const auto e = parse_experiment(string(j["experiment"], "experiment"));
  if (!e) throw config_error("experiment", "unknown experiment '" + j["experiment"].get<std::string>() + "'");
  c.experiment = *e;

  if (j.contains("grid")) c.grid = parse_grid(j["grid"]);

  if (j.contains("resonance")) {
    const auto& r = j["resonance"];
    only_keys(r, "resonance", {"E_R", "Gamma", "R_re", "R_im", "j"});
    if (r.contains("E_R")) c.resonance.E_R = positive(r["E_R"], "resonance.E_R");
    if (r.contains("Gamma")) c.resonance.Gamma = positive(r["Gamma"], "resonance.Gamma");
    double re = 1.0, im = 0.0;
    if (r.contains("R_re")) re = number(r["R_re"], "resonance.R_re");
    if (r.contains("R_im")) im = number(r["R_im"], "resonance.R_im");
    c.resonance.R = {re, im};
    if (r.contains("j")) {
      const double jj = number(r["j"], "resonance.j");
      if (jj < 0.0 || std::floor(2.0 * jj) != 2.0 * jj)
        throw config_error("resonance.j", "must be a non-negative half-integer");
      c.resonance.j = jj;
    }
  }
  if (j.contains("momentum")) c.momentum = positive(j["momentum"], "momentum");
  if (j.contains("times")) c.times = parse_times(j["times"]);

  if (j.contains("io")) {
    const auto& io = j["io"];
    only_keys(io, "io", {"input_csv", "output_path", "format", "samples_path"});
    if (io.contains("input_csv")) c.io.input_csv = string(io["input_csv"], "io.input_csv");
    if (io.contains("output_path")) c.io.output_path = string(io["output_path"], "io.output_path");
    if (io.contains("samples_path")) c.io.samples_path = string(io["samples_path"], "io.samples_path");
    if (io.contains("format")) {
      c.io.format = string(io["format"], "io.format");
      if (c.io.format != "csv" && c.io.format != "json")
        throw config_error("io.format", "must be 'csv' or 'json'");
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw config_error("seed", "must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("diagnostic")) {
    if (!j["diagnostic"].is_boolean()) throw config_error("diagnostic", "must be true or false");
    c.diagnostic = j["diagnostic"].get<bool>();
  }
  if (j.contains("direction")) c.direction = parse_direction(string(j["direction"], "direction"), "direction");

  if (j.contains("wavefunction")) {
    const auto& w = j["wavefunction"];
    only_keys(w, "wavefunction", {"kind", "poles", "center", "width", "path"});
    if (w.contains("kind")) c.wavefunction.kind = string(w["kind"], "wavefunction.kind");
    const auto& k = c.wavefunction.kind;
    if (k != "gamow" && k != "conjugate-gamow" && k != "poles" && k != "gaussian" && k != "file")
      throw config_error("wavefunction.kind",
                         "must be gamow, conjugate-gamow, poles, gaussian or file");
    if (w.contains("poles")) c.wavefunction.poles = complex_list(w["poles"], "wavefunction.poles");
    if (k == "poles" && c.wavefunction.poles.empty())
      throw config_error("wavefunction.poles", "required for kind 'poles'");
    for (std::size_t i = 0; i < c.wavefunction.poles.size(); ++i)
      if (c.wavefunction.poles[i].imag() == 0.0)
        throw config_error("wavefunction.poles[" + std::to_string(i) + "]", "must be off the real axis");
    if (w.contains("center")) c.wavefunction.center = number(w["center"], "wavefunction.center");
    if (w.contains("width")) c.wavefunction.width = positive(w["width"], "wavefunction.width");
    if (w.contains("path")) c.wavefunction.path = string(w["path"], "wavefunction.path");
    if (k == "file" && c.wavefunction.path.empty())
      throw config_error("wavefunction.path", "required for kind 'file'");
  }

  if (j.contains("synthetic")) {
    const auto& s = j["synthetic"];
    only_keys(s, "synthetic", {"points", "E_min", "E_max", "noise"});
    if (s.contains("points")) c.synthetic.points = count(s["points"], "synthetic.points");
    if (s.contains("E_min")) c.synthetic.E_min = number(s["E_min"], "synthetic.E_min");
    if (s.contains("E_max")) c.synthetic.E_max = number(s["E_max"], "synthetic.E_max");
    if (s.contains("noise")) {
      c.synthetic.noise = number(s["noise"], "synthetic.noise");
      if (c.synthetic.noise < 0.0) throw config_error("synthetic.noise", "must be non-negative");
    }
  }

  if (j.contains("smatrix")) {
    const auto& s = j["smatrix"];
    only_keys(s, "smatrix", {"psi_poles", "phi_poles"});
    if (s.contains("psi_poles")) c.psi_poles = complex_list(s["psi_poles"], "smatrix.psi_poles");
    if (s.contains("phi_poles")) c.phi_poles = complex_list(s["phi_poles"], "smatrix.phi_poles");
    for (std::size_t i = 0; i < c.psi_poles.size(); ++i)
      if (!(c.psi_poles[i].imag() < 0.0))
        throw config_error("smatrix.psi_poles[" + std::to_string(i) + "]",
                           "must lie in the lower half-plane (psi is H2_plus)");
    for (std::size_t i = 0; i < c.phi_poles.size(); ++i)
      if (!(c.phi_poles[i].imag() > 0.0))
        throw config_error("smatrix.phi_poles[" + std::to_string(i) + "]",
                           "must lie in the upper half-plane (phi is H2_minus)");
  }
  return c;
}

/// Cross-field checks that depend on the chosen experiment. Call after
/// command-line overrides have been applied.
inline void validate(const RunConfig& c) {
  const bool needs_grid = c.experiment != Experiment::fit_pole &&
                          !(c.experiment == Experiment::decompose && c.wavefunction.kind == "file");
  if (needs_grid && !c.grid) throw config_error("grid", "required for " + std::string(to_string(c.experiment)));
  if (c.experiment == Experiment::evolve || c.experiment == Experiment::decay_curve) {
    if (c.times.empty()) throw config_error("times", "required");
    for (std::size_t i = 0; i < c.times.size(); ++i) {
      if (!std::isfinite(c.times[i])) throw config_error("times", "must be finite");
      if (!c.diagnostic && c.times[i] < 0.0)
        throw config_error("times", "negative time " + io::fmt(c.times[i]) +
                                        " is outside the semigroup (set diagnostic to allow it)");
    }
  }
  if (c.experiment == Experiment::decay_curve) {
    for (std::size_t i = 1; i < c.times.size(); ++i)
      if (c.times[i] < c.times[i - 1]) throw config_error("times", "must be ascending");
    for (double t : c.times)
      if (t < 0.0) throw config_error("times", "decay curves are defined for t >= 0 only");
  }
  if (c.experiment == Experiment::fit_pole && c.io.input_csv.empty()) {
    if (!(c.synthetic.E_max > c.synthetic.E_min))
      throw config_error("synthetic.E_max", "must exceed synthetic.E_min");
    if (c.synthetic.points < 5) throw config_error("synthetic.points", "must be at least 5");
  }
  if (c.experiment == Experiment::smatrix_decompose) {
    if (c.psi_poles.empty()) throw config_error("smatrix.psi_poles", "required");
    if (c.phi_poles.empty()) throw config_error("smatrix.phi_poles", "required");
  }
}

/// Reads a config file. When `expected` is set (a CLI subcommand), a
/// missing "experiment" key defaults to it and a different one is refused.
inline RunConfig load_config(const std::string& path,
                             std::optional<Experiment> expected = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw config_error("config", "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config", std::string("invalid JSON: ") + e.what());
  }
  if (expected) {
    if (!j.is_object()) throw config_error("config", "must be an object");
    if (!j.contains("experiment")) j["experiment"] = to_string(*expected);
    else if (j["experiment"] != to_string(*expected))
      throw config_error("experiment", "config is for '" + j["experiment"].dump() +
                                           "' but the subcommand is '" + to_string(*expected) + "'");
  }
  return parse_config(j);
}

enum class LogLevel { quiet, info, debug };

inline LogLevel log_level_from_env() {
  const char* v = std::getenv("GAMOW_LAB_LOG");
  if (!v) return LogLevel::info;
  const std::string s(v);
  if (s == "quiet") return LogLevel::quiet;
  if (s == "debug") return LogLevel::debug;
  return LogLevel::info;
}

struct RunOutcome {
  int exit_code = 0;
  std::string summary;
};

namespace run_detail {

/// Writes to io.output_path, or to `fallback` when no path is set.
inline void emit(const RunConfig& c, const std::string& text, std::ostream& fallback) {
  if (c.io.output_path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream out(c.io.output_path, std::ios::binary);
  if (!out) throw config_error("io.output_path", "cannot write '" + c.io.output_path + "'");
  out << text;
}

inline std::string where(const RunConfig& c) {
  return c.io.output_path.empty() ? "stdout" : c.io.output_path;
}

inline SampledWaveFunction pole_product(const GridPtr& grid, const std::vector<cplx>& poles,
                                        Role role, HardyClass cls) {
  return SampledWaveFunction::sample(
      grid,
      [&](double E) {
        cplx v = 1.0;
        for (const auto& p : poles) v /= (E - p);
        return v;
      },
      role, cls);
}

inline SampledWaveFunction build_wavefunction(const RunConfig& c) {
  const auto& w = c.wavefunction;
  if (w.kind == "file") {
    std::ifstream in(w.path);
    if (!in) throw config_error("wavefunction.path", "cannot open '" + w.path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw config_error("wavefunction.path", std::string("invalid JSON: ") + e.what());
    }
    return wave_function_from_json(j);
  }
  const auto grid = c.grid->build();
  const cplx z = c.resonance.pole();
  if (w.kind == "gamow") {
    if (grid->is_full_line()) return make_gamow(z, grid).wavefunction;
    return truncated_gamow(z, grid);
  }
  if (w.kind == "conjugate-gamow") {
    // The H2_minus partner of the Gamow function: pole at conj(z_R).
    const cplx a(0.0, std::sqrt(c.resonance.Gamma / (2.0 * pi)));
    return SampledWaveFunction::sample(
        grid, [&](double E) { return a / (E - std::conj(z)); }, Role::state, HardyClass::H2_minus);
  }
  if (w.kind == "poles") {
    bool all_lower = true, all_upper = true;
    for (const auto& p : w.poles) {
      all_lower = all_lower && p.imag() < 0.0;
      all_upper = all_upper && p.imag() > 0.0;
    }
    if (all_lower) return pole_product(grid, w.poles, Role::observable, HardyClass::H2_plus);
    if (all_upper) return pole_product(grid, w.poles, Role::state, HardyClass::H2_minus);
    return pole_product(grid, w.poles, Role::state, HardyClass::unknown);
  }
  // gaussian, unit norm
  const double s = w.width;
  const double a = std::pow(pi * s * s, -0.25);
  return SampledWaveFunction::sample(
      grid, [&](double E) { return a * std::exp(-0.5 * (E - w.center) * (E - w.center) / (s * s)); },
      Role::state);
}

inline RunOutcome run_decompose(const RunConfig& c, std::ostream& out) {
  const auto f = build_wavefunction(c);
  const auto [fp, fm] = decompose(f);
  const double n = l2_norm(f), np = l2_norm(fp), nm = l2_norm(fm);
  std::vector<cplx> sum(f.size());
  double defect = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum[i] = f[i] - fp[i] - fm[i];
  defect = l2_norm(f.with_class(sum, Role::state, HardyClass::unknown)) / n;
  const double ortho = (np > 0.0 && nm > 0.0) ? std::abs(inner_product(fp, fm)) / (np * nm) : 0.0;
  const double lp = hardy_leakage(f, HardyClass::H2_plus);
  const double lm = hardy_leakage(f, HardyClass::H2_minus);

  std::ostringstream s;
  if (c.io.format == "json") {
    nlohmann::json j = {{"norm", n},
                        {"norm_plus", np},
                        {"norm_minus", nm},
                        {"leakage_plus", lp},
                        {"leakage_minus", lm},
                        {"reconstruction_defect", defect},
                        {"orthogonality", ortho}};
    s << j.dump(2) << '\n';
  } else {
    s << "E,re_f,im_f,re_plus,im_plus,re_minus,im_minus\n";
    const auto& g = f.grid();
    for (std::size_t i = 0; i < f.size(); ++i)
      s << io::fmt(g.point(i)) << ',' << io::fmt(f[i].real()) << ',' << io::fmt(f[i].imag()) << ','
        << io::fmt(fp[i].real()) << ',' << io::fmt(fp[i].imag()) << ','
        << io::fmt(fm[i].real()) << ',' << io::fmt(fm[i].imag()) << '\n';
  }
  emit(c, s.str(), out);
  return {0, "decompose: leakage_plus=" + io::fmt(lp) + " leakage_minus=" + io::fmt(lm) +
                 " defect=" + io::fmt(defect) + " -> " + where(c)};
}

inline RunOutcome run_evolve(const RunConfig& c, std::ostream& out) {
  const auto f = build_wavefunction(c);
  if (f.hardy_class() == HardyClass::unknown)
    throw error(errc::class_required, "evolve reports Hardy leakage and needs a function with a class");
  std::vector<io::EvolveRow> rows;
  for (double t : c.times) {
    EvolutionRequest req{t, c.direction, !c.diagnostic};
    const auto g = evolve(f, req);
    rows.push_back({t, hardy_leakage(g, f.hardy_class()), l2_norm(g)});
  }
  std::ostringstream s;
  if (c.io.format == "json") {
    nlohmann::json j = {{"diagnostic", c.diagnostic},
                        {"direction", c.direction == Direction::schrodinger_state
                                          ? "schrodinger_state"
                                          : "heisenberg_observable"},
                        {"t", nlohmann::json::array()},
                        {"leakage", nlohmann::json::array()},
                        {"norm", nlohmann::json::array()}};
    for (const auto& r : rows) {
      j["t"].push_back(r.t);
      j["leakage"].push_back(r.leakage);
      j["norm"].push_back(r.norm);
    }
    s << j.dump(2) << '\n';
  } else {
    io::write_evolve_csv(s, rows);
  }
  emit(c, s.str(), out);
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.leakage);
  return {0, std::string("evolve") + (c.diagnostic ? " [diagnostic mode, t < 0 allowed]" : "") +
                 ": points=" + std::to_string(rows.size()) + " max_leakage=" + io::fmt(worst) +
                 " -> " + where(c)};
}

/// Least-squares slope of log(survival) against t.
inline double log_slope(const DecaySeries& d) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < d.times.size(); ++i) {
    if (!(d.survival[i] > 0.0)) continue;
    const double y = std::log(d.survival[i]);
    st += d.times[i];
    sy += y;
    stt += d.times[i] * d.times[i];
    sty += d.times[i] * y;
    ++m;
  }
  if (m < 2) return 0.0;
  const double mm = static_cast<double>(m);
  return (mm * sty - st * sy) / (mm * stt - st * st);
}

inline RunOutcome run_decay_curve(const RunConfig& c, std::ostream& out) {
  const auto grid = c.grid->build();
  const cplx z = c.resonance.pole();
  const DecaySeries d = grid->is_full_line() ? decay_curve(make_gamow(z, grid), c.times)
                                             : decay_curve(truncated_gamow(z, grid), c.times);
  std::ostringstream s;
  if (c.io.format == "json") s << io::decay_json(d).dump(2) << '\n';
  else io::write_decay_csv(s, d);
  emit(c, s.str(), out);
  return {0, "decay-curve: E_R=" + io::fmt(c.resonance.E_R) + " Gamma=" +
                 io::fmt(c.resonance.Gamma) + " points=" + std::to_string(d.times.size()) +
                 " log_slope=" + io::fmt(log_slope(d)) + " -> " + where(c)};
}

inline RunOutcome run_fit_pole(const RunConfig& c, std::ostream& out) {
  std::vector<LineShapeSample> samples;
  if (!c.io.input_csv.empty()) {
    std::ifstream in(c.io.input_csv);
    if (!in) throw config_error("io.input_csv", "cannot open '" + c.io.input_csv + "'");
    samples = io::read_line_shape_csv(in);
  } else {
    samples = synthesize_line_shape(c.resonance, c.momentum, c.synthetic.E_min, c.synthetic.E_max,
                                    c.synthetic.points, c.synthetic.noise, c.seed);
    if (!c.io.samples_path.empty()) {
      std::ofstream so(c.io.samples_path, std::ios::binary);
      if (!so) throw config_error("io.samples_path", "cannot write '" + c.io.samples_path + "'");
      io::write_line_shape_csv(so, samples);
    }
  }
  const auto r = fit_pole(samples, c.momentum, c.resonance.j);
  std::ostringstream s;
  if (c.io.format == "json") {
    auto j = io::fit_report_json(r);
    j["seed"] = c.seed;
    s << j.dump(2) << '\n';
  } else {
    s << "E_R,Gamma,residual,iterations,converged\n"
      << io::fmt(r.params.E_R) << ',' << io::fmt(r.params.Gamma) << ','
      << io::fmt(r.report.residual) << ',' << r.report.iterations << ','
      << (r.report.converged ? "true" : "false") << '\n';
  }
  emit(c, s.str(), out);
  return {0, "fit-pole: E_R=" + io::fmt(r.params.E_R) + " Gamma=" + io::fmt(r.params.Gamma) +
                 " iterations=" + std::to_string(r.report.iterations) + " -> " + where(c)};
}

inline RunOutcome run_smatrix(const RunConfig& c, std::ostream& out) {
  const auto grid = c.grid->build();
  const auto psi = pole_product(grid, c.psi_poles, Role::observable, HardyClass::H2_plus);
  const auto phi = pole_product(grid, c.phi_poles, Role::state, HardyClass::H2_minus);
  const auto S = single_pole_smatrix(c.resonance.pole());
  SMatrixOptions opt;
  opt.enforce_closure = false;
  const auto d = pole_background_decomposition(psi, phi, S, opt);
  nlohmann::json j = {{"direct", io::complex_json(d.direct)},
                      {"pole_term", io::complex_json(d.pole_term)},
                      {"background", io::complex_json(d.background)},
                      {"closure_defect", d.closure_defect},
                      {"ray_length", d.ray_length},
                      {"ray_endpoint", d.ray_endpoint}};
  emit(c, j.dump(2) + "\n", out);
  RunOutcome o{0, "smatrix-decompose: closure_defect=" + io::fmt(d.closure_defect) +
                      " |background|/|pole|=" +
                      io::fmt(std::abs(d.background) / std::abs(d.pole_term)) + " -> " + where(c)};
  if (!d.consistent) {
    o.exit_code = 3;
    o.summary += " (decomposition-inconsistent: closure above 1e-6)";
  }
  return o;
}

}  // namespace run_detail

/// Runs one experiment. Output goes to io.output_path or `out`.
/// Library errors propagate; see exit_code_for.
inline RunOutcome run(const RunConfig& c, std::ostream& out = std::cout) {
  validate(c);
  switch (c.experiment) {
    case Experiment::decompose: return run_detail::run_decompose(c, out);
    case Experiment::evolve: return run_detail::run_evolve(c, out);
    case Experiment::decay_curve: return run_detail::run_decay_curve(c, out);
    case Experiment::fit_pole: return run_detail::run_fit_pole(c, out);
    case Experiment::smatrix_decompose: return run_detail::run_smatrix(c, out);
  }
  return {1, "unknown experiment"};
}

/// 2 for configuration and input problems, 3 for numerical contract
/// violations raised by the library.
inline int exit_code_for(const error& e) {
  switch (e.code()) {
    case errc::invalid_argument:
    case errc::parse_error:
    case errc::outside_semigroup:
      return 2;
    default:
      return 3;
  }
}

}  // namespace gamowlab
