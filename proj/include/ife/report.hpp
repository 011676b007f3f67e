#pragma once

#include "ife/core.hpp"
#include "ife/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace ife {

// observed order between two mesh levels; reduces to log2(e0/e1) for halvings
inline double rate_of(double e_coarse, double e_fine, int n_coarse, int n_fine) {
  return std::log(e_coarse / e_fine) / std::log(double(n_fine) / double(n_coarse));
}

struct convergence_row {
  int n = 0;
  double h = 0;
  norm_split norms;
  double l2_rate = 0, h1_rate = 0;  // combined-norm rates, meaningless on the first row
  double l2_minus_rate = 0, l2_plus_rate = 0, h1_minus_rate = 0, h1_plus_rate = 0;
  int iterations = 0;               // linear-solver iterations in solve mode
};

struct convergence_report {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<convergence_row> rows;
  double wall_seconds = 0;  // informational only, never emitted (reports are deterministic)
};

inline void compute_rates(convergence_report& rep) {
  for (size_t k = 1; k < rep.rows.size(); ++k) {
    convergence_row& cur = rep.rows[k];
    const convergence_row& prev = rep.rows[k - 1];
    cur.l2_rate = rate_of(prev.norms.l2(), cur.norms.l2(), prev.n, cur.n);
    cur.h1_rate = rate_of(prev.norms.h1(), cur.norms.h1(), prev.n, cur.n);
    cur.l2_minus_rate = rate_of(prev.norms.l2_minus, cur.norms.l2_minus, prev.n, cur.n);
    cur.l2_plus_rate = rate_of(prev.norms.l2_plus, cur.norms.l2_plus, prev.n, cur.n);
    cur.h1_minus_rate = rate_of(prev.norms.h1_minus, cur.norms.h1_minus, prev.n, cur.n);
    cur.h1_plus_rate = rate_of(prev.norms.h1_plus, cur.norms.h1_plus, prev.n, cur.n);
  }
}

namespace detail {

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4E", x);
  return buf;
}

// rate cell: blank on the first row, "exact" when the error sits at rounding level
inline std::string rate_cell(bool first, double err, double rate) {
  if (err <= 1e-11) return first ? "" : "exact";
  if (first) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", rate);
  return buf;
}

}  // namespace detail

inline std::string emit_csv(const convergence_report& rep) {
  std::ostringstream os;
  for (const auto& [k, v] : rep.meta) os << "# " << k << "=" << v << "\n";
  os << "n,h,l2_error,l2_rate,h1_error,h1_rate\n";
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    const convergence_row& r = rep.rows[i];
    os << r.n << "," << detail::sci(r.h) << "," << detail::sci(r.norms.l2()) << ","
       << detail::rate_cell(i == 0, r.norms.l2(), r.l2_rate) << "," << detail::sci(r.norms.h1())
       << "," << detail::rate_cell(i == 0, r.norms.h1(), r.h1_rate) << "\n";
  }
  return os.str();
}

inline std::string emit_md(const convergence_report& rep) {
  std::ostringstream os;
  for (const auto& [k, v] : rep.meta) os << "- " << k << ": " << v << "\n";
  os << "\n";
  std::vector<std::string> head{"n",        "h",       "l2_minus", "l2_plus", "l2_error",
                                "l2_rate",  "h1_minus", "h1_plus",  "h1_error", "h1_rate"};
  std::vector<std::vector<std::string>> cells;
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    const convergence_row& r = rep.rows[i];
    cells.push_back({std::to_string(r.n), detail::sci(r.h), detail::sci(r.norms.l2_minus),
                     detail::sci(r.norms.l2_plus), detail::sci(r.norms.l2()),
                     detail::rate_cell(i == 0, r.norms.l2(), r.l2_rate),
                     detail::sci(r.norms.h1_minus), detail::sci(r.norms.h1_plus),
                     detail::sci(r.norms.h1()),
                     detail::rate_cell(i == 0, r.norms.h1(), r.h1_rate)});
  }
  std::vector<size_t> w(head.size());
  for (size_t c = 0; c < head.size(); ++c) {
    w[c] = head[c].size();
    for (const auto& row : cells) w[c] = std::max(w[c], row[c].size());
  }
  auto pad = [&](const std::string& s, size_t width) {
    return s + std::string(width - s.size(), ' ');
  };
  os << "|";
  for (size_t c = 0; c < head.size(); ++c) os << " " << pad(head[c], w[c]) << " |";
  os << "\n|";
  for (size_t c = 0; c < head.size(); ++c) os << " " << std::string(w[c], '-') << " |";
  os << "\n";
  for (const auto& row : cells) {
    os << "|";
    for (size_t c = 0; c < head.size(); ++c) os << " " << pad(row[c], w[c]) << " |";
    os << "\n";
  }
  return os.str();
}

inline std::string emit_report(const convergence_report& rep, const std::string& format) {
  if (rep.rows.empty()) throw config_error("report holds no rows to emit");
  if (format == "csv") return emit_csv(rep);
  if (format == "md") return emit_md(rep);
  throw config_error("format must be csv or md");
}

// parsed csv for the round-trip check: header + raw data cells, comments skipped
struct parsed_csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline parsed_csv parse_report_csv(const std::string& text) {
  parsed_csv out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) cells.push_back(tok);
    if (line.back() == ',') cells.push_back("");
    if (out.header.empty())
      out.header = cells;
    else
      out.rows.push_back(cells);
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot open output path: " + path);
  out << text;
  if (!out) throw config_error("failed writing output path: " + path);
}

}  // namespace ife
