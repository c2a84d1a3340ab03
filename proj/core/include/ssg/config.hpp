#pragma once

// Run configuration: flat key=value text with '#' comments. Every key of
// SolverConfig has a textual name; command line flags are applied as extra
// key=value pairs on top of the file.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "ssg/error.hpp"
#include "ssg/fields.hpp"
#include "ssg/nd_map.hpp"

namespace ssg {

/// Malformed or out-of-range configuration (a usage error).
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class DtPolicy { Cfl, Fixed };

/// Initial datum: file:PATH, mode:k1,k2,amp (amp cos(2 pi (k1 x1 + k2 x2)))
/// or random:seed,band,amp (random_band_limited).
struct Theta0Spec {
  enum class Kind { File, Mode, Random } kind = Kind::Mode;
  std::string path;
  int k1 = 1, k2 = 0;
  double amplitude = 0.0;
  std::uint64_t seed = 1;
  int band = 2;

  static Theta0Spec parse(const std::string& text);
  std::string to_string() const;
};

struct SolverConfig {
  int n1 = 64, n2 = 64, n3 = 17;
  DtPolicy dt_policy = DtPolicy::Cfl;
  double dt = 0.01;   // fixed step, or the cap under the CFL policy
  double cfl = 0.5;   // target |w|_inf dt / h
  double t_end = 1.0;
  int picard_iters_per_step = 2;
  double ctilde = 0.0;  // stability constant for the ball radii; 0 = measured default
  double nd_tolerance = 1e-10;
  int nd_max_iter = 50;
  double alpha = 0.5;
  double beta = 0.5;  // time Holder exponent; recorded, not used by the discrete scheme
  std::size_t pair_budget = 4096;
  std::uint64_t norm_seed = 0x5eed;
  double bound_tolerance = 1e-6;  // accepted margins are >= -bound_tolerance
  bool check_bounds = true;
  int snapshot_every = 10;
  int threads = 0;  // 0 keeps the OpenMP default
  Theta0Spec theta0{};

  TorusGrid grid() const { return TorusGrid(n1, n2); }
  PairSampling sampling() const { return {alpha, pair_budget, norm_seed}; }
  NDOptions nd_options() const;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
  /// key=value lines that parse back to the same configuration.
  std::string to_text() const;
};

using ConfigMap = std::map<std::string, std::string>;

/// Parses key=value lines; later duplicates win.
ConfigMap parse_config_text(const std::string& text);
ConfigMap read_config_file(const std::filesystem::path& path);

/// Applies the entries on top of `base`; unknown keys are errors.
SolverConfig apply_config(const ConfigMap& entries, SolverConfig base = {});

/// amp cos(2 pi (k1 x1 + k2 x2)), random field or file contents on `grid`.
SpectralField2D make_theta0(const Theta0Spec& spec, const TorusGrid& grid);

}  // namespace ssg
