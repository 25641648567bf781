#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace cascade {

/// Bad configuration or command-line input (exit status 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parameters of every subcommand, stored in an INI file with one section per
/// subcommand plus [general]. Doubles are written in shortest round-trip form,
/// lists comma separated, so save/load is lossless.
struct RunConfig {
  struct General {
    std::string out_dir = "out";
    int sign = 1;
    bool operator==(const General&) const = default;
  } general;

  struct Coeffs {
    int j_max = 40;
    double lambda = 1.0;
    std::string arithmetic = "exact";  // exact | float
    bool corrupt_parity = false;       // test hook: flips one parity zero
    bool operator==(const Coeffs&) const = default;
  } coeffs;

  struct Ode {
    std::string mode = "theorem1";  // theorem1 | decoupled | msystem | mmodel
    int j_max = 40;
    int K = 40;
    double t_end = 0.05;
    double dt = 1e-4;
    std::string scheme = "expEuler";
    int store_every = 10;
    double c = 0.01;          // lower band constant
    double c_high = 100.0;    // upper band constant (msystem)
    double delta = 0.0;       // 0: 1/(20 sqrt C) from the table
    int k_check = 20;
    int k_export = 20;
    std::vector<int> K_list{};  // truncation study; empty skips it
    bool operator==(const Ode&) const = default;
  } ode;

  struct Growth {
    std::string mode = "G";  // G | solver
    std::vector<double> t_list{0.05, 0.1};
    std::vector<double> p_list{2, 4, 8, 16, 32};
    std::string equation = "hilbert_chi";
    double dt = 1e-4;
    double half_width = 32.0;
    int n_points = 65536;
    double smooth_width = 0.1;
    std::string window = "[-8,9]";
    bool operator==(const Growth&) const = default;
  } growth;

  struct Solve {
    std::string equation = "hilbert_chi";
    std::string initial = "indicator";  // indicator | mollified | bump
    double t_end = 0.1;
    double dt = 1e-4;
    double half_width = 32.0;
    int n_points = 65536;
    double const_a = 1.0;
    double smooth_width = 0.1;
    std::vector<double> snapshot_times{0.05};
    std::vector<double> p_list{2, 4, 8};
    std::string window = "[-8,9]";
    std::string export_window = "[-2,3]";
    int export_stride = 8;
    bool operator==(const Solve&) const = default;
  } solve;

  struct Compare {
    double t = 0.01;
    std::vector<double> t_list{0.005, 0.01, 0.02, 0.04};
    std::vector<int> J_list{0, 1, 2, 4, 20};
    double dt = 1e-4;
    double half_width = 32.0;
    int n_points = 65536;
    std::string window = "[-2,3]";
    double exclusion = 0.05;
    double tolerance = 0.02;
    std::vector<double> figure_times{0.0, 0.1, 0.3};
    int export_stride = 8;
    bool operator==(const Compare&) const = default;
  } compare;

  struct Verify {
    double half_width = 32.0;
    int n_points = 65536;
    double dt = 1e-4;
    int j_max = 40;
    bool corrupt_parity = false;
    bool operator==(const Verify&) const = default;
  } verify;

  bool operator==(const RunConfig&) const = default;

  /// Range checks; throws ConfigError naming "section.key".
  void validate() const;

  std::string to_ini() const;
  static RunConfig from_ini(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);

  /// Applies "section.key=value".
  void apply_override(const std::string& assignment);
};

}  // namespace cascade
