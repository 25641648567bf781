#include "cascade/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cascade/grid.hpp"
#include "cascade/io.hpp"
#include "cascade/ode.hpp"
#include "cascade/quadrature.hpp"
#include "cascade/solver.hpp"

namespace cascade {

namespace {

// Lists every (section, key, field) once; used for reading, writing and overrides.
template <class Config, class V>
void visit_fields(Config& c, V&& v) {
  v("general", "out_dir", c.general.out_dir);
  v("general", "sign", c.general.sign);

  v("coeffs", "j_max", c.coeffs.j_max);
  v("coeffs", "lambda", c.coeffs.lambda);
  v("coeffs", "arithmetic", c.coeffs.arithmetic);
  v("coeffs", "corrupt_parity", c.coeffs.corrupt_parity);

  v("ode", "mode", c.ode.mode);
  v("ode", "j_max", c.ode.j_max);
  v("ode", "K", c.ode.K);
  v("ode", "t_end", c.ode.t_end);
  v("ode", "dt", c.ode.dt);
  v("ode", "scheme", c.ode.scheme);
  v("ode", "store_every", c.ode.store_every);
  v("ode", "c", c.ode.c);
  v("ode", "c_high", c.ode.c_high);
  v("ode", "delta", c.ode.delta);
  v("ode", "k_check", c.ode.k_check);
  v("ode", "k_export", c.ode.k_export);
  v("ode", "K_list", c.ode.K_list);

  v("growth", "mode", c.growth.mode);
  v("growth", "t_list", c.growth.t_list);
  v("growth", "p_list", c.growth.p_list);
  v("growth", "equation", c.growth.equation);
  v("growth", "dt", c.growth.dt);
  v("growth", "half_width", c.growth.half_width);
  v("growth", "n_points", c.growth.n_points);
  v("growth", "smooth_width", c.growth.smooth_width);
  v("growth", "window", c.growth.window);

  v("solve", "equation", c.solve.equation);
  v("solve", "initial", c.solve.initial);
  v("solve", "t_end", c.solve.t_end);
  v("solve", "dt", c.solve.dt);
  v("solve", "half_width", c.solve.half_width);
  v("solve", "n_points", c.solve.n_points);
  v("solve", "const_a", c.solve.const_a);
  v("solve", "smooth_width", c.solve.smooth_width);
  v("solve", "snapshot_times", c.solve.snapshot_times);
  v("solve", "p_list", c.solve.p_list);
  v("solve", "window", c.solve.window);
  v("solve", "export_window", c.solve.export_window);
  v("solve", "export_stride", c.solve.export_stride);

  v("compare", "t", c.compare.t);
  v("compare", "t_list", c.compare.t_list);
  v("compare", "J_list", c.compare.J_list);
  v("compare", "dt", c.compare.dt);
  v("compare", "half_width", c.compare.half_width);
  v("compare", "n_points", c.compare.n_points);
  v("compare", "window", c.compare.window);
  v("compare", "exclusion", c.compare.exclusion);
  v("compare", "tolerance", c.compare.tolerance);
  v("compare", "figure_times", c.compare.figure_times);
  v("compare", "export_stride", c.compare.export_stride);

  v("verify", "half_width", c.verify.half_width);
  v("verify", "n_points", c.verify.n_points);
  v("verify", "dt", c.verify.dt);
  v("verify", "j_max", c.verify.j_max);
  v("verify", "corrupt_parity", c.verify.corrupt_parity);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string to_text(const std::string& v) { return v; }
std::string to_text(int v) { return std::to_string(v); }
std::string to_text(double v) { return format_double(v); }
std::string to_text(bool v) { return v ? "true" : "false"; }
template <class T>
std::string to_text(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + to_text(v[i]);
  return out;
}

void parse_into(const std::string& text, std::string& out) { out = text; }

void parse_into(const std::string& text, int& out) {
  const std::string s = trim(text);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::invalid_argument("expected an integer");
}

void parse_into(const std::string& text, double& out) {
  const std::string s = trim(text);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::invalid_argument("expected a number");
}

void parse_into(const std::string& text, bool& out) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") out = true;
  else if (s == "false" || s == "0" || s == "no") out = false;
  else throw std::invalid_argument("expected true or false");
}

template <class T>
void parse_into(const std::string& text, std::vector<T>& out) {
  out.clear();
  if (trim(text).empty()) return;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    T v{};
    parse_into(item, v);
    out.push_back(v);
  }
}

using Setters = std::map<std::string, std::function<void(const std::string&)>>;

Setters setters_for(RunConfig& c) {
  Setters s;
  visit_fields(c, [&s](const char* section, const char* key, auto& field) {
    const std::string name = std::string(section) + "." + key;
    s[name] = [&field, name](const std::string& text) {
      try {
        parse_into(text, field);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("config: " + name + ": " + e.what() + " (got '" + text + "')");
      }
    };
  });
  return s;
}

[[noreturn]] void fail(const std::string& field, const std::string& why, const std::string& got) {
  throw ConfigError("config: " + field + " " + why + " (got " + got + ")");
}

void require(bool ok, const std::string& field, const std::string& why, const std::string& got) {
  if (!ok) fail(field, why, got);
}

void positive(double v, const std::string& field) { require(v > 0.0 && std::isfinite(v), field, "must be > 0", to_text(v)); }
void non_negative(double v, const std::string& field) {
  require(v >= 0.0 && std::isfinite(v), field, "must be >= 0", to_text(v));
}

void grid_fields(double half_width, int n_points, const std::string& section) {
  positive(half_width, section + ".half_width");
  require(n_points >= 16 && is_power_of_two(static_cast<std::size_t>(n_points)), section + ".n_points",
          "must be a power of two >= 16", to_text(n_points));
}

void multiple_of(double t, double dt, const std::string& field) {
  const double m = t / dt;
  require(std::abs(m - std::round(m)) <= 1e-6, field, "must be a multiple of the time step", to_text(t));
}

void window_field(const std::string& text, const std::string& field) {
  try {
    parse_window(text);
  } catch (const std::invalid_argument& e) {
    fail(field, std::string("is not a window: ") + e.what(), "'" + text + "'");
  }
}

void equation_field(const std::string& text, const std::string& field) {
  try {
    parse_equation(text);
  } catch (const std::invalid_argument&) {
    fail(field, "must name an equation", "'" + text + "'");
  }
}

void p_list_field(const std::vector<double>& p, const std::string& field) {
  for (double v : p) require(v >= 1.0 && std::isfinite(v), field, "entries must be >= 1", to_text(v));
}

}  // namespace

void RunConfig::validate() const {
  require(!general.out_dir.empty(), "general.out_dir", "must not be empty", "''");
  require(general.sign == 1 || general.sign == -1, "general.sign", "must be 1 or -1", to_text(general.sign));

  require(coeffs.j_max >= 1 && coeffs.j_max <= 400, "coeffs.j_max", "must lie in [1, 400]", to_text(coeffs.j_max));
  require(std::isfinite(coeffs.lambda) && coeffs.lambda != 0.0, "coeffs.lambda", "must be finite and nonzero",
          to_text(coeffs.lambda));
  require(coeffs.arithmetic == "exact" || coeffs.arithmetic == "float", "coeffs.arithmetic",
          "must be exact or float", "'" + coeffs.arithmetic + "'");

  const bool ode_uses_table = ode.mode == "theorem1" || ode.mode == "msystem";
  require(ode_uses_table || ode.mode == "decoupled" || ode.mode == "mmodel", "ode.mode",
          "must be theorem1, decoupled, msystem or mmodel", "'" + ode.mode + "'");
  require(ode.j_max >= 1 && ode.j_max <= 400, "ode.j_max", "must lie in [1, 400]", to_text(ode.j_max));
  require(ode.K >= 1, "ode.K", "must be >= 1", to_text(ode.K));
  if (ode_uses_table) require(ode.K <= ode.j_max, "ode.K", "must not exceed ode.j_max", to_text(ode.K));
  non_negative(ode.t_end, "ode.t_end");
  positive(ode.dt, "ode.dt");
  multiple_of(ode.t_end, ode.dt, "ode.t_end");
  try {
    parse_scheme(ode.scheme);
  } catch (const std::invalid_argument&) {
    fail("ode.scheme", "must be rk4 or expEuler", "'" + ode.scheme + "'");
  }
  require(ode.store_every >= 1, "ode.store_every", "must be >= 1", to_text(ode.store_every));
  require(ode.c > 0.0 && ode.c <= 1.0, "ode.c", "must lie in (0, 1]", to_text(ode.c));
  require(ode.c_high >= 1.0 && std::isfinite(ode.c_high), "ode.c_high", "must be >= 1", to_text(ode.c_high));
  non_negative(ode.delta, "ode.delta");
  require(ode.k_check >= 0 && ode.k_check <= ode.K, "ode.k_check", "must lie in [0, ode.K]", to_text(ode.k_check));
  require(ode.k_export >= 0 && ode.k_export <= ode.K, "ode.k_export", "must lie in [0, ode.K]",
          to_text(ode.k_export));
  require(ode.K_list.empty() || ode.K_list.size() >= 2, "ode.K_list", "needs at least two entries",
          to_text(ode.K_list));
  for (int k : ode.K_list)
    require(k >= 1 && (!ode_uses_table || k <= ode.j_max), "ode.K_list", "entries must lie in [1, ode.j_max]",
            to_text(k));

  require(growth.mode == "G" || growth.mode == "solver", "growth.mode", "must be G or solver",
          "'" + growth.mode + "'");
  require(!growth.t_list.empty(), "growth.t_list", "must not be empty", "''");
  require(!growth.p_list.empty(), "growth.p_list", "must not be empty", "''");
  for (double t : growth.t_list) non_negative(t, "growth.t_list");
  p_list_field(growth.p_list, "growth.p_list");
  equation_field(growth.equation, "growth.equation");
  positive(growth.dt, "growth.dt");
  if (growth.mode == "solver")
    for (double t : growth.t_list) multiple_of(t, growth.dt, "growth.t_list");
  grid_fields(growth.half_width, growth.n_points, "growth");
  require(growth.smooth_width > 0.0 && growth.smooth_width < 1.0, "growth.smooth_width", "must lie in (0, 1)",
          to_text(growth.smooth_width));
  window_field(growth.window, "growth.window");

  equation_field(solve.equation, "solve.equation");
  require(solve.initial == "indicator" || solve.initial == "mollified" || solve.initial == "bump", "solve.initial",
          "must be indicator, mollified or bump", "'" + solve.initial + "'");
  non_negative(solve.t_end, "solve.t_end");
  positive(solve.dt, "solve.dt");
  multiple_of(solve.t_end, solve.dt, "solve.t_end");
  grid_fields(solve.half_width, solve.n_points, "solve");
  require(std::isfinite(solve.const_a), "solve.const_a", "must be finite", to_text(solve.const_a));
  require(solve.smooth_width > 0.0 && solve.smooth_width < 1.0, "solve.smooth_width", "must lie in (0, 1)",
          to_text(solve.smooth_width));
  for (double t : solve.snapshot_times) {
    require(t >= 0.0 && t <= solve.t_end, "solve.snapshot_times", "entries must lie in [0, solve.t_end]", to_text(t));
    multiple_of(t, solve.dt, "solve.snapshot_times");
  }
  p_list_field(solve.p_list, "solve.p_list");
  window_field(solve.window, "solve.window");
  window_field(solve.export_window, "solve.export_window");
  require(solve.export_stride >= 1, "solve.export_stride", "must be >= 1", to_text(solve.export_stride));

  non_negative(compare.t, "compare.t");
  require(!compare.t_list.empty(), "compare.t_list", "must not be empty", "''");
  require(!compare.J_list.empty(), "compare.J_list", "must not be empty", "''");
  positive(compare.dt, "compare.dt");
  multiple_of(compare.t, compare.dt, "compare.t");
  for (double t : compare.t_list) {
    non_negative(t, "compare.t_list");
    multiple_of(t, compare.dt, "compare.t_list");
  }
  for (int j : compare.J_list) require(j >= 0 && j <= 400, "compare.J_list", "entries must lie in [0, 400]", to_text(j));
  grid_fields(compare.half_width, compare.n_points, "compare");
  window_field(compare.window, "compare.window");
  non_negative(compare.exclusion, "compare.exclusion");
  positive(compare.tolerance, "compare.tolerance");
  for (double t : compare.figure_times) {
    non_negative(t, "compare.figure_times");
    multiple_of(t, compare.dt, "compare.figure_times");
  }
  require(compare.export_stride >= 1, "compare.export_stride", "must be >= 1", to_text(compare.export_stride));

  grid_fields(verify.half_width, verify.n_points, "verify");
  positive(verify.dt, "verify.dt");
  require(verify.j_max >= 12 && verify.j_max <= 400, "verify.j_max", "must lie in [12, 400]", to_text(verify.j_max));
}

std::string RunConfig::to_ini() const {
  boost::property_tree::ptree pt;
  visit_fields(*this, [&pt](const char* section, const char* key, const auto& field) {
    pt.put(boost::property_tree::ptree::path_type(std::string(section) + "|" + key, '|'), to_text(field));
  });
  std::ostringstream os;
  boost::property_tree::write_ini(os, pt);
  return os.str();
}

RunConfig RunConfig::from_ini(const std::string& text) {
  boost::property_tree::ptree pt;
  std::istringstream is(text);
  try {
    boost::property_tree::read_ini(is, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config: cannot parse: " + e.message() + " at line " + std::to_string(e.line()));
  }
  RunConfig c;
  auto setters = setters_for(c);
  for (const auto& [section, body] : pt) {
    if (body.empty()) {
      if (!body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
      continue;
    }
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      auto it = setters.find(name);
      if (it == setters.end()) throw ConfigError("config: unknown key " + name);
      it->second(value.get_value<std::string>());
    }
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_ini(ss.str());
}

void RunConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override: expected section.key=value, got '" + assignment + "'");
  const std::string name = trim(assignment.substr(0, eq));
  auto setters = setters_for(*this);
  auto it = setters.find(name);
  if (it == setters.end()) throw ConfigError("override: unknown key " + name);
  it->second(assignment.substr(eq + 1));
}

}  // namespace cascade
