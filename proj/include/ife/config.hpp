#pragma once

#include "ife/core.hpp"
#include "ife/local_fe.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace ife {

struct run_config {
  std::string mode = "interp";  // interp | solve | verify
  std::string element = "q1";   // p1 | cr | q1 | rq1
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  std::string curve_kind = "circle";
  double curve_cx = 0, curve_cy = 0;
  double curve_r = std::numbers::pi / 6.28;
  double curve_a = 0.5, curve_b = 0.3;  // ellipse semi-axes
  double beta_minus = 1, beta_plus = 1;
  std::vector<int> mesh_sizes{40, 80, 160};
  double epsilon = 0.4;      // interface-band width parameter in the geometry bounds
  double kappa_bar = 0.031;  // normal-deviation allowance
  double lambda = 0.5;       // slack factor in the skew-harmonic admissibility gate
  int quad_degree = 5;
  double sigma = -1;         // penalty weight; negative selects 10*max(beta)
  int epsilon_flag = -1;     // -1 symmetric, 0 incomplete, +1 nonsymmetric
  unsigned long long seed = 12345;
  std::string output;        // report path; empty writes to stdout
  std::string format = "csv";
  double cg_tol = 1e-10;
  std::string dump_solution, dump_mesh, dump_ife;

  poly_space_tag tag() const { return tag_from_name(element); }
  double resolved_sigma() const {
    return sigma < 0 ? 10.0 * std::max(beta_minus, beta_plus) : sigma;
  }
};

inline std::string join_sizes(const std::vector<int>& v) {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

inline std::vector<int> parse_sizes(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok));
  }
  return out;
}

inline void validate_config(const run_config& c) {
  auto fail = [](const std::string& m) { throw config_error(m); };
  if (c.mode != "interp" && c.mode != "solve" && c.mode != "verify")
    fail("mode must be interp, solve or verify");
  tag_from_name(c.element);
  if (c.format != "csv" && c.format != "md") fail("format must be csv or md");
  if (c.x1 <= c.x0 || c.y1 <= c.y0) fail("domain box must have positive extent");
  if (c.curve_kind != "circle" && c.curve_kind != "ellipse")
    fail("curve kind must be circle or ellipse");
  if (c.curve_kind == "circle" && c.curve_r <= 0) fail("circle radius must be positive");
  if (c.curve_kind == "ellipse" && (c.curve_a <= 0 || c.curve_b <= 0))
    fail("ellipse semi-axes must be positive");
  if (c.beta_minus <= 0 || c.beta_plus <= 0) fail("diffusion coefficients must be positive");
  if (c.mode != "verify") {
    if (c.mesh_sizes.empty()) fail("mesh size list must not be empty");
    for (size_t i = 0; i < c.mesh_sizes.size(); ++i) {
      if (c.mesh_sizes[i] <= 0) fail("mesh sizes must be positive");
      if (i > 0 && c.mesh_sizes[i] <= c.mesh_sizes[i - 1])
        fail("mesh sizes must be strictly increasing");
    }
  }
  if (!(c.epsilon > 0) || !(2 * c.epsilon * c.epsilon < 1))
    fail("epsilon must lie in (0, 1/sqrt(2))");
  if (c.kappa_bar <= 0) fail("kappa_bar must be positive");
  if (!(c.lambda > 0 && c.lambda < 1)) fail("lambda must lie in (0,1)");
  if (c.quad_degree < 1 || c.quad_degree > 30) fail("quadrature degree must lie in [1,30]");
  if (c.epsilon_flag != -1 && c.epsilon_flag != 0 && c.epsilon_flag != 1)
    fail("epsilon flag must be -1, 0 or +1");
  if (c.mode == "solve" && c.epsilon_flag == -1 && c.resolved_sigma() <= 0)
    fail("the symmetric scheme needs a positive penalty");
  if (c.cg_tol <= 0) fail("solver tolerance must be positive");
}

// flat key-value config file; keys are spelled exactly like the CLI flags
inline void apply_json(run_config& c, const nlohmann::json& j) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const nlohmann::json& v = it.value();
    if (k == "mode") c.mode = v.get<std::string>();
    else if (k == "element") c.element = v.get<std::string>();
    else if (k == "x0") c.x0 = v.get<double>();
    else if (k == "x1") c.x1 = v.get<double>();
    else if (k == "y0") c.y0 = v.get<double>();
    else if (k == "y1") c.y1 = v.get<double>();
    else if (k == "curve-kind") c.curve_kind = v.get<std::string>();
    else if (k == "curve-cx") c.curve_cx = v.get<double>();
    else if (k == "curve-cy") c.curve_cy = v.get<double>();
    else if (k == "curve-r") c.curve_r = v.get<double>();
    else if (k == "curve-a") c.curve_a = v.get<double>();
    else if (k == "curve-b") c.curve_b = v.get<double>();
    else if (k == "beta-minus") c.beta_minus = v.get<double>();
    else if (k == "beta-plus") c.beta_plus = v.get<double>();
    else if (k == "mesh-sizes")
      c.mesh_sizes = v.is_string() ? parse_sizes(v.get<std::string>()) : v.get<std::vector<int>>();
    else if (k == "epsilon") c.epsilon = v.get<double>();
    else if (k == "kappa-bar") c.kappa_bar = v.get<double>();
    else if (k == "lambda") c.lambda = v.get<double>();
    else if (k == "quad-degree") c.quad_degree = v.get<int>();
    else if (k == "sigma") c.sigma = v.get<double>();
    else if (k == "epsilon-flag") c.epsilon_flag = v.get<int>();
    else if (k == "seed") c.seed = v.get<unsigned long long>();
    else if (k == "output") c.output = v.get<std::string>();
    else if (k == "format") c.format = v.get<std::string>();
    else if (k == "cg-tol") c.cg_tol = v.get<double>();
    else if (k == "dump-solution") c.dump_solution = v.get<std::string>();
    else if (k == "dump-mesh") c.dump_mesh = v.get<std::string>();
    else if (k == "dump-ife") c.dump_ife = v.get<std::string>();
    else throw config_error("unknown config key: " + k);
  }
}

inline run_config load_config_file(const std::string& path, run_config base = {}) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error(std::string("config parse failure: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config file must hold a flat JSON object");
  apply_json(base, j);
  return base;
}

// deterministic config echo for report metadata
inline std::vector<std::pair<std::string, std::string>> config_echo(const run_config& c) {
  auto num = [](double x) {
    std::ostringstream os;
    os << x;
    return os.str();
  };
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("mode", c.mode);
  kv.emplace_back("element", c.element);
  kv.emplace_back("box", num(c.x0) + "," + num(c.x1) + "," + num(c.y0) + "," + num(c.y1));
  kv.emplace_back("curve", c.curve_kind);
  if (c.curve_kind == "circle") {
    kv.emplace_back("curve-center", num(c.curve_cx) + "," + num(c.curve_cy));
    kv.emplace_back("curve-r", num(c.curve_r));
  } else {
    kv.emplace_back("curve-center", num(c.curve_cx) + "," + num(c.curve_cy));
    kv.emplace_back("curve-ab", num(c.curve_a) + "," + num(c.curve_b));
  }
  kv.emplace_back("beta-minus", num(c.beta_minus));
  kv.emplace_back("beta-plus", num(c.beta_plus));
  kv.emplace_back("mesh-sizes", join_sizes(c.mesh_sizes));
  kv.emplace_back("epsilon", num(c.epsilon));
  kv.emplace_back("kappa-bar", num(c.kappa_bar));
  kv.emplace_back("lambda", num(c.lambda));
  kv.emplace_back("quad-degree", num(c.quad_degree));
  if (c.mode == "solve") {
    kv.emplace_back("sigma", num(c.resolved_sigma()));
    kv.emplace_back("epsilon-flag", num(c.epsilon_flag));
    kv.emplace_back("cg-tol", num(c.cg_tol));
  }
  kv.emplace_back("seed", std::to_string(c.seed));
  return kv;
}

}  // namespace ife
