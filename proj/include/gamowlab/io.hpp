#pragma once

// CSV and JSON output helpers. Numbers are written with 17 significant
// digits and '.' as decimal separator, independent of the global locale.

#include <cstdio>
#include <istream>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gamowlab/error.hpp"
#include "gamowlab/gamow.hpp"
#include "gamowlab/grid.hpp"
#include "gamowlab/resonance.hpp"

namespace gamowlab::io {

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  for (auto& c : s)
    if (c == ',') c = '.';  // in case a C locale with ',' decimals was installed
  return s;
}

inline nlohmann::json complex_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline void write_decay_csv(std::ostream& os, const DecaySeries& d) {
  os << "t,re_A,im_A,survival\n";
  for (std::size_t i = 0; i < d.times.size(); ++i)
    os << fmt(d.times[i]) << ',' << fmt(d.amplitude[i].real()) << ','
       << fmt(d.amplitude[i].imag()) << ',' << fmt(d.survival[i]) << '\n';
}

inline nlohmann::json decay_json(const DecaySeries& d) {
  std::vector<double> re, im;
  for (const auto& a : d.amplitude) {
    re.push_back(a.real());
    im.push_back(a.imag());
  }
  return {{"t", d.times}, {"re_A", re}, {"im_A", im}, {"survival", d.survival}};
}

struct EvolveRow {
  double t;
  double leakage;
  double norm;
};

inline void write_evolve_csv(std::ostream& os, const std::vector<EvolveRow>& rows) {
  os << "t,leakage,norm\n";
  for (const auto& r : rows) os << fmt(r.t) << ',' << fmt(r.leakage) << ',' << fmt(r.norm) << '\n';
}

inline void write_line_shape_csv(std::ostream& os, const std::vector<LineShapeSample>& s) {
  os << "E,sigma\n";
  for (const auto& x : s) os << fmt(x.E) << ',' << fmt(x.sigma) << '\n';
}

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& s, std::size_t line) {
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  double v;
  in >> v;
  gamowlab::detail::require(!in.fail() && (in >> std::ws).eof(), errc::parse_error,
                            "line " + std::to_string(line) + ": cannot parse '" + s + "'");
  return v;
}

}  // namespace detail

/// Reads "E,sigma" CSV. Blank lines are skipped.
inline std::vector<LineShapeSample> read_line_shape_csv(std::istream& is) {
  std::string line;
  std::size_t no = 0;
  bool header = false;
  std::vector<LineShapeSample> out;
  while (std::getline(is, line)) {
    ++no;
    line = detail::trim(line);
    if (line.empty()) continue;
    if (!header) {
      std::string h;
      for (char c : line)
        if (c != ' ') h += c;
      gamowlab::detail::require(h == "E,sigma", errc::parse_error,
                                "expected header 'E,sigma', got '" + line + "'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    gamowlab::detail::require(comma != std::string::npos &&
                                  line.find(',', comma + 1) == std::string::npos,
                              errc::parse_error,
                              "line " + std::to_string(no) + ": expected two fields");
    out.push_back({detail::parse_number(detail::trim(line.substr(0, comma)), no),
                   detail::parse_number(detail::trim(line.substr(comma + 1)), no)});
  }
  gamowlab::detail::require(header, errc::parse_error, "empty CSV input");
  return out;
}

inline nlohmann::json fit_report_json(const FitResult& r) {
  nlohmann::json cov = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < 3; ++k) row.push_back(r.report.covariance(i, k));
    cov.push_back(row);
  }
  return {{"E_R", r.params.E_R},
          {"Gamma", r.params.Gamma},
          {"residual", r.report.residual},
          {"iterations", r.report.iterations},
          {"converged", r.report.converged},
          {"scale", r.report.scale},
          {"covariance", cov},
          {"gradient_norm", r.report.gradient_norm}};
}

}  // namespace gamowlab::io
