#include "ssg/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ssg/snapshot_io.hpp"

namespace ssg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
  Int x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Theta0Spec Theta0Spec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("theta0: expected file:, mode: or random:, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  Theta0Spec s;
  if (kind == "file") {
    if (rest.empty()) throw ConfigError("theta0: empty file name");
    s.kind = Kind::File;
    s.path = rest;
    return s;
  }
  const auto parts = split(rest, ',');
  if (parts.size() != 3) throw ConfigError("theta0: " + kind + " takes three comma separated values");
  if (kind == "mode") {
    s.kind = Kind::Mode;
    s.k1 = to_int<int>("theta0 k1", parts[0]);
    s.k2 = to_int<int>("theta0 k2", parts[1]);
    s.amplitude = to_double("theta0 amplitude", parts[2]);
    if (s.k1 == 0 && s.k2 == 0 && s.amplitude != 0.0)
      throw ConfigError("theta0: the (0,0) mode would give nonzero mean");
    return s;
  }
  if (kind == "random") {
    s.kind = Kind::Random;
    s.seed = to_int<std::uint64_t>("theta0 seed", parts[0]);
    s.band = to_int<int>("theta0 band", parts[1]);
    s.amplitude = to_double("theta0 amplitude", parts[2]);
    if (s.band < 1) throw ConfigError("theta0: band must be >= 1");
    if (s.amplitude < 0.0) throw ConfigError("theta0: amplitude must be >= 0");
    return s;
  }
  throw ConfigError("theta0: unknown kind '" + kind + "'");
}

std::string Theta0Spec::to_string() const {
  switch (kind) {
    case Kind::File: return "file:" + path;
    case Kind::Mode: return "mode:" + std::to_string(k1) + "," + std::to_string(k2) + "," + fmt(amplitude);
    case Kind::Random:
      return "random:" + std::to_string(seed) + "," + std::to_string(band) + "," + fmt(amplitude);
  }
  return {};
}

NDOptions SolverConfig::nd_options() const {
  NDOptions o;
  o.ball = BallParams::from_constant(ctilde > 0.0 ? ctilde : default_stability_constant());
  o.tolerance = nd_tolerance;
  o.max_iter = nd_max_iter;
  o.sampling = sampling();
  return o;
}

void SolverConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  need(n1 >= 8 && n2 >= 8 && n1 % 2 == 0 && n2 % 2 == 0, "resolution: n1, n2 must be even and >= 8");
  need(n3 >= 9 && n3 % 2 == 1, "resolution: n3 must be odd and >= 9");
  need(dt > 0.0, "dt must be > 0");
  need(cfl > 0.0, "cfl must be > 0");
  need(t_end >= 0.0, "t_end must be >= 0");
  need(picard_iters_per_step >= 1, "picard must be >= 1");
  need(ctilde >= 0.0, "ctilde must be >= 0");
  need(nd_tolerance > 0.0, "nd_tolerance must be > 0");
  need(nd_max_iter >= 1, "nd_max_iter must be >= 1");
  need(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  need(beta > 0.0 && beta < 1.0, "beta must lie in (0,1)");
  need(std::isfinite(bound_tolerance), "bound_tolerance must be finite");
  need(snapshot_every >= 1, "snapshot_every must be >= 1");
  need(threads >= 0, "threads must be >= 0");
  if (theta0.kind == Theta0Spec::Kind::Mode)
    need(std::abs(theta0.k1) <= n1 / 2 && std::abs(theta0.k2) <= n2 / 2, "theta0: mode outside the grid");
  if (theta0.kind == Theta0Spec::Kind::Random)
    need(3 * theta0.band < std::min(n1, n2), "theta0: band must satisfy 3*band < min(n1, n2)");
}

std::string SolverConfig::to_text() const {
  std::ostringstream os;
  os << "resolution=" << n1 << 'x' << n2 << 'x' << n3 << '\n'
     << "dt_policy=" << (dt_policy == DtPolicy::Cfl ? "cfl" : "fixed") << '\n'
     << "dt=" << fmt(dt) << '\n'
     << "cfl=" << fmt(cfl) << '\n'
     << "t_end=" << fmt(t_end) << '\n'
     << "picard=" << picard_iters_per_step << '\n'
     << "ctilde=" << fmt(ctilde) << '\n'
     << "nd_tolerance=" << fmt(nd_tolerance) << '\n'
     << "nd_max_iter=" << nd_max_iter << '\n'
     << "alpha=" << fmt(alpha) << '\n'
     << "beta=" << fmt(beta) << '\n'
     << "pair_budget=" << pair_budget << '\n'
     << "norm_seed=" << norm_seed << '\n'
     << "bound_tolerance=" << fmt(bound_tolerance) << '\n'
     << "check_bounds=" << (check_bounds ? "true" : "false") << '\n'
     << "snapshot_every=" << snapshot_every << '\n'
     << "threads=" << threads << '\n'
     << "theta0=" << theta0.to_string() << '\n';
  return os.str();
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

SolverConfig apply_config(const ConfigMap& entries, SolverConfig c) {
  // theta0 first, so that a seed override applies to the datum it names
  if (const auto it = entries.find("theta0"); it != entries.end()) c.theta0 = Theta0Spec::parse(it->second);
  for (const auto& [key, v] : entries) {
    if (key == "theta0") continue;
    if (key == "resolution") {
      const auto parts = split(v, 'x');
      if (parts.size() != 3) throw ConfigError("resolution: expected N1xN2xN3, got '" + v + "'");
      c.n1 = to_int<int>(key, parts[0]);
      c.n2 = to_int<int>(key, parts[1]);
      c.n3 = to_int<int>(key, parts[2]);
    } else if (key == "n1") {
      c.n1 = to_int<int>(key, v);
    } else if (key == "n2") {
      c.n2 = to_int<int>(key, v);
    } else if (key == "n3") {
      c.n3 = to_int<int>(key, v);
    } else if (key == "dt_policy") {
      if (v == "cfl") c.dt_policy = DtPolicy::Cfl;
      else if (v == "fixed") c.dt_policy = DtPolicy::Fixed;
      else throw ConfigError("dt_policy: expected cfl or fixed, got '" + v + "'");
    } else if (key == "dt") {
      c.dt = to_double(key, v);
    } else if (key == "cfl") {
      c.cfl = to_double(key, v);
    } else if (key == "t_end") {
      c.t_end = to_double(key, v);
    } else if (key == "picard") {
      c.picard_iters_per_step = to_int<int>(key, v);
    } else if (key == "ctilde") {
      c.ctilde = to_double(key, v);
    } else if (key == "nd_tolerance") {
      c.nd_tolerance = to_double(key, v);
    } else if (key == "nd_max_iter") {
      c.nd_max_iter = to_int<int>(key, v);
    } else if (key == "alpha") {
      c.alpha = to_double(key, v);
    } else if (key == "beta") {
      c.beta = to_double(key, v);
    } else if (key == "pair_budget") {
      c.pair_budget = to_int<std::size_t>(key, v);
    } else if (key == "norm_seed") {
      c.norm_seed = to_int<std::uint64_t>(key, v);
    } else if (key == "bound_tolerance") {
      c.bound_tolerance = to_double(key, v);
    } else if (key == "check_bounds") {
      c.check_bounds = to_bool(key, v);
    } else if (key == "snapshot_every") {
      c.snapshot_every = to_int<int>(key, v);
    } else if (key == "threads") {
      c.threads = to_int<int>(key, v);
    } else if (key == "seed") {
      if (c.theta0.kind != Theta0Spec::Kind::Random)
        throw ConfigError("seed: only meaningful with a random: initial datum");
      c.theta0.seed = to_int<std::uint64_t>(key, v);
    } else {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  }
  return c;
}

SpectralField2D make_theta0(const Theta0Spec& spec, const TorusGrid& grid) {
  switch (spec.kind) {
    case Theta0Spec::Kind::File: {
      const SpectralField2D f = read_spectral_field(spec.path);
      return f.grid() == grid ? f : resample(f, grid);
    }
    case Theta0Spec::Kind::Random:
      return random_band_limited(grid, spec.seed, spec.band, spec.amplitude);
    case Theta0Spec::Kind::Mode: {
      SpectralField2D f(grid);
      if (spec.amplitude == 0.0) return f;
      // Self-conjugate modes (each index 0 or Nyquist) carry the full amplitude.
      const bool self = (spec.k1 == 0 || std::abs(spec.k1) * 2 == grid.n1()) &&
                        (spec.k2 == 0 || std::abs(spec.k2) * 2 == grid.n2());
      f.set_coeff(spec.k1, spec.k2, self ? spec.amplitude : 0.5 * spec.amplitude);
      return f;
    }
  }
  return SpectralField2D(grid);
}

}  // namespace ssg
