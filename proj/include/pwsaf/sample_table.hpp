#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "pwsaf/error.hpp"
#include "pwsaf/extraction.hpp"

namespace pwsaf {

// Sample-table CSV, one row per sample. Values are written with 17 significant
// digits so that export -> import reproduces every double exactly. The
// (I_Gr, I_Gi) columns duplicate (I_G1, I_G-1) through the chain rule; on
// import they are optional and, when present, must agree with them.

inline constexpr std::array<std::string_view, 17> sample_table_columns = {
    "eta_c",      "v_o",        "f_o_hz",    "y_v_re",    "y_v_im",    "y_omega_re",
    "y_omega_im", "y_eta_re",   "y_eta_im",  "i_g1_re",   "i_g1_im",   "i_gm1_re",
    "i_gm1_im",   "i_gr_re",    "i_gr_im",   "i_gi_re",   "i_gi_im"};

namespace detail {

inline std::string exact_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    auto field = line.substr(start, pos == std::string_view::npos ? pos : pos - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    out.push_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, std::size_t line_no) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw config_error("sample table line " + std::to_string(line_no) + ": '" +
                       std::string(s) + "' is not a number");
  return v;
}

}  // namespace detail

inline void write_sample_table(std::ostream& os, const std::vector<AdmittanceSample>& samples) {
  for (std::size_t c = 0; c < sample_table_columns.size(); ++c)
    os << (c ? "," : "") << sample_table_columns[c];
  os << '\n';
  for (const auto& s : samples) {
    const auto inj = s.injection();
    const double row[] = {s.eta_c,          s.v_o,           s.f_o_hz,
                          s.y_v.real(),     s.y_v.imag(),    s.y_omega.real(),
                          s.y_omega.imag(), s.y_eta.real(),  s.y_eta.imag(),
                          s.i_g1.real(),    s.i_g1.imag(),   s.i_gm1.real(),
                          s.i_gm1.imag(),   inj.i_gr().real(), inj.i_gr().imag(),
                          inj.i_gi().real(), inj.i_gi().imag()};
    for (std::size_t c = 0; c < std::size(row); ++c)
      os << (c ? "," : "") << detail::exact_double(row[c]);
    os << '\n';
  }
}

inline std::vector<AdmittanceSample> read_sample_table(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t, std::less<>> index;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = detail::split_csv(line);
    for (std::size_t c = 0; c < fields.size(); ++c) index[std::string(fields[c])] = c;
    break;
  }
  if (index.empty()) throw config_error("sample table: missing header");
  for (std::size_t c = 0; c < 13; ++c)
    if (!index.contains(sample_table_columns[c]))
      throw config_error("sample table: header lacks column '" +
                         std::string(sample_table_columns[c]) + "'");
  const bool has_components = index.contains("i_gr_re") && index.contains("i_gr_im") &&
                              index.contains("i_gi_re") && index.contains("i_gi_im");

  std::vector<AdmittanceSample> out;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() != index.size())
      throw config_error("sample table line " + std::to_string(line_no) + ": expected " +
                         std::to_string(index.size()) + " fields, got " +
                         std::to_string(fields.size()));
    auto get = [&](std::string_view name) {
      return detail::parse_double(fields[index.find(name)->second], line_no);
    };
    AdmittanceSample s;
    s.eta_c = get("eta_c");
    s.v_o = get("v_o");
    s.f_o_hz = get("f_o_hz");
    s.y_v = {get("y_v_re"), get("y_v_im")};
    s.y_omega = {get("y_omega_re"), get("y_omega_im")};
    s.y_eta = {get("y_eta_re"), get("y_eta_im")};
    s.i_g1 = {get("i_g1_re"), get("i_g1_im")};
    s.i_gm1 = {get("i_gm1_re"), get("i_gm1_im")};
    if (has_components) {
      const cplx gr{get("i_gr_re"), get("i_gr_im")};
      const cplx gi{get("i_gi_re"), get("i_gi_im")};
      const auto inj = s.injection();
      const double scale = std::max({std::abs(gr), std::abs(gi), 1e-300});
      if (std::abs(inj.i_gr() - gr) > 1e-9 * scale || std::abs(inj.i_gi() - gi) > 1e-9 * scale)
        throw config_error("sample table line " + std::to_string(line_no) +
                           ": (i_gr, i_gi) disagree with (i_g1, i_gm1)");
    }
    out.push_back(s);
  }
  if (out.empty()) throw config_error("sample table has no rows");
  return out;
}

}  // namespace pwsaf
