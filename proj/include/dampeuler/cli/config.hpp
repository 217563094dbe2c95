#pragma once

// Experiment configuration. JSON in, JSON out; lambda and mu are decimal
// strings so a config survives a round trip unchanged.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dampeuler/core/damping.hpp"
#include "dampeuler/core/errors.hpp"

namespace dampeuler::cli {

using nlohmann::json;

enum class Mode { Burgers, Euler2d, Diagnose, Testbench, SpecfunCheck, Sweep };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::Burgers: return "burgers";
    case Mode::Euler2d: return "euler2d";
    case Mode::Diagnose: return "diagnose";
    case Mode::Testbench: return "testbench";
    case Mode::SpecfunCheck: return "specfun-check";
    case Mode::Sweep: return "sweep";
  }
  return "?";
}

inline Mode mode_from_string(const std::string& s, const std::string& path = "mode") {
  for (Mode m : {Mode::Burgers, Mode::Euler2d, Mode::Diagnose, Mode::Testbench,
                 Mode::SpecfunCheck, Mode::Sweep}) {
    if (to_string(m) == s) return m;
  }
  throw UsageError(path, "unknown mode '" + s + "'");
}

/// A number given as decimal text, e.g. "0.5" or "1e-3".
struct Decimal {
  std::string text = "1";
  double value = 1.0;

  static Decimal parse(const std::string& s, const std::string& path) {
    static const std::regex pattern(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
    if (!std::regex_match(s, pattern)) {
      throw UsageError(path, "expected a decimal string, got '" + s + "'");
    }
    double v = 0.0;
    const char* first = s.data() + (s[0] == '+' ? 1 : 0);
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw UsageError(path, "decimal '" + s + "' is out of range");
    }
    return {s, v};
  }

  bool operator==(const Decimal&) const = default;
};

struct LawConfig {
  Decimal lambda{"1", 1.0};
  Decimal mu{"1", 1.0};
  DampingLaw law() const { return DampingLaw(mu.value, lambda.value); }
  bool operator==(const LawConfig&) const = default;
};

struct GasConfig {
  double gamma = 2.0;
  double rho_bar = 1.0;
  GasLaw gas() const { return GasLaw(gamma, rho_bar); }
  bool operator==(const GasConfig&) const = default;
};

struct DataConfig {
  /// euler2d family: zero | rotational | irrotational | outflow.
  std::string family = "rotational";
  /// Burgers profile: bump | poly4 | skew-bump.
  std::string profile = "bump";
  double M = 1.0;
  double M_tilde = 0.0;
  double rho_amplitude = 1.0;
  double u_amplitude = 1.0;
  double Lambda = 3.0;
  bool operator==(const DataConfig&) const = default;
};

struct GridConfig {
  double L = 8.0;
  int n = 128;
  int nx = 4096;
  bool operator==(const GridConfig&) const = default;
};

struct SolverConfig {
  double hyperviscosity = 0.01;
  double cfl = 0.4;
  double blowup_threshold = 1e3;
  std::vector<double> extra_thresholds;
  double sample_every = 0.5;
  std::vector<double> snapshot_times;
  bool energies = true;
  bool operator==(const SolverConfig&) const = default;
};

struct DiagnoseConfig {
  /// Snapshot to analyse instead of running a simulation.
  std::string snapshot;
  /// Bound checks stop at this fraction of the detected blowup time.
  double window_fraction = 0.9;
  bool operator==(const DiagnoseConfig&) const = default;
};

struct TestbenchConfig {
  std::vector<double> times{0.0, 5.0, 20.0};
  double catalog_M = 50.0;
  int samples = 256;
  int divcurl_n = 512;
  int random_fields = 20;
  double stability_ratio = 1.5;
  bool operator==(const TestbenchConfig&) const = default;
};

struct SpecfunConfig {
  int psi_samples = 100;
  int adjoint_points = 20;
  std::vector<Decimal> lambdas{{"1", 1.0}, {"1.5", 1.5}, {"2", 2.0}};
  bool operator==(const SpecfunConfig&) const = default;
};

struct SweepConfig {
  std::vector<Decimal> lambda;
  std::vector<Decimal> mu;
  std::vector<double> eps;
  /// burgers | euler2d
  std::string cell_mode = "burgers";
  int budget = 64;
  bool operator==(const SweepConfig&) const = default;
};

struct ExperimentConfig {
  Mode mode = Mode::Burgers;
  LawConfig law;
  GasConfig gas;
  double eps = 0.1;
  double t_end = 10.0;
  std::uint64_t seed = 1;
  DataConfig data;
  GridConfig grid;
  SolverConfig solver;
  DiagnoseConfig diagnose;
  TestbenchConfig testbench;
  SpecfunConfig specfun;
  SweepConfig sweep;
  std::string output = "out";
  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

/// Reads members of one JSON object, remembering which keys were used so that
/// misspelt keys are reported instead of silently ignored.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw UsageError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void get(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw UsageError(at(key), "expected a number");
      out = v->get<double>();
    }
  }
  void get(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw UsageError(at(key), "expected an integer");
      const auto x = v->get<std::int64_t>();
      if (x < INT32_MIN || x > INT32_MAX) throw UsageError(at(key), "integer out of range");
      out = static_cast<int>(x);
    }
  }
  void get(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) throw UsageError(at(key), "expected a nonnegative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void get(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw UsageError(at(key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw UsageError(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void get(const std::string& key, Decimal& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) {
        throw UsageError(at(key), "expected a decimal string such as \"0.5\"");
      }
      out = Decimal::parse(v->get<std::string>(), at(key));
    }
  }
  void get(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw UsageError(at(key), "expected an array of numbers");
      out.clear();
      for (std::size_t k = 0; k < v->size(); ++k) {
        if (!(*v)[k].is_number()) {
          throw UsageError(at(key) + "[" + std::to_string(k) + "]", "expected a number");
        }
        out.push_back((*v)[k].get<double>());
      }
    }
  }
  void get(const std::string& key, std::vector<Decimal>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw UsageError(at(key), "expected an array of decimal strings");
      out.clear();
      for (std::size_t k = 0; k < v->size(); ++k) {
        const std::string p = at(key) + "[" + std::to_string(k) + "]";
        if (!(*v)[k].is_string()) throw UsageError(p, "expected a decimal string");
        out.push_back(Decimal::parse((*v)[k].get<std::string>(), p));
      }
    }
  }
  template <class F>
  void object(const std::string& key, F&& read) {
    if (const json* v = find(key)) {
      Reader sub(*v, at(key));
      read(sub);
      sub.finish();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw UsageError(at(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

inline json decimals(const std::vector<Decimal>& v) {
  json a = json::array();
  for (const auto& d : v) a.push_back(d.text);
  return a;
}

inline void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw UsageError(path, what);
}

}  // namespace detail

/// Field-by-field domain checks; the first violation is reported with its path.
inline void validate(const ExperimentConfig& c) {
  using detail::require;
  require(c.law.lambda.value >= 0.0, "law.lambda", "must be >= 0");
  require(c.law.mu.value > 0.0, "law.mu", "must be > 0");
  require(c.gas.gamma > 1.0, "gas.gamma", "must exceed 1");
  require(c.gas.rho_bar > 0.0, "gas.rho_bar", "must be > 0");
  require(c.eps > 0.0 && std::isfinite(c.eps), "eps", "must be positive and finite");
  require(c.t_end > 0.0 && std::isfinite(c.t_end), "t_end", "must be positive and finite");
  require(c.data.M > 0.0, "data.M", "must be > 0");
  require(c.data.M_tilde >= 0.0 && c.data.M_tilde < c.data.M, "data.M_tilde",
          "must satisfy 0 <= M_tilde < M");
  require(c.data.Lambda >= 0.0, "data.Lambda", "must be >= 0");
  require(std::isfinite(c.data.rho_amplitude), "data.rho_amplitude", "must be finite");
  require(std::isfinite(c.data.u_amplitude), "data.u_amplitude", "must be finite");
  require(c.data.family == "zero" || c.data.family == "rotational" ||
              c.data.family == "irrotational" || c.data.family == "outflow",
          "data.family", "unknown data family '" + c.data.family + "'");
  require(c.data.profile == "bump" || c.data.profile == "poly4" || c.data.profile == "skew-bump",
          "data.profile", "unknown profile '" + c.data.profile + "'");
  require(c.grid.L > 0.0, "grid.L", "must be > 0");
  require(c.grid.n >= 8, "grid.n", "must be >= 8");
  require(c.grid.nx >= 64, "grid.nx", "must be >= 64");
  require(c.solver.hyperviscosity >= 0.0, "solver.hyperviscosity", "must be >= 0");
  require(c.solver.cfl > 0.0 && c.solver.cfl <= 1.0, "solver.cfl", "must lie in (0, 1]");
  require(c.solver.blowup_threshold > 1.0, "solver.blowup_threshold", "must exceed 1");
  for (std::size_t k = 0; k < c.solver.extra_thresholds.size(); ++k) {
    require(c.solver.extra_thresholds[k] > 1.0,
            "solver.extra_thresholds[" + std::to_string(k) + "]", "must exceed 1");
  }
  require(c.solver.sample_every > 0.0, "solver.sample_every", "must be > 0");
  for (std::size_t k = 0; k < c.solver.snapshot_times.size(); ++k) {
    const double t = c.solver.snapshot_times[k];
    require(t >= 0.0 && t <= c.t_end, "solver.snapshot_times[" + std::to_string(k) + "]",
            "must lie in [0, t_end]");
  }
  require(c.diagnose.window_fraction > 0.0 && c.diagnose.window_fraction <= 1.0,
          "diagnose.window_fraction", "must lie in (0, 1]");
  require(!c.testbench.times.empty(), "testbench.times", "must not be empty");
  for (std::size_t k = 0; k < c.testbench.times.size(); ++k) {
    require(c.testbench.times[k] >= 0.0, "testbench.times[" + std::to_string(k) + "]",
            "must be >= 0");
  }
  require(c.testbench.catalog_M > 16.0, "testbench.catalog_M", "must exceed 16");
  require(c.testbench.samples >= 32, "testbench.samples", "must be >= 32");
  require(c.testbench.divcurl_n >= 32, "testbench.divcurl_n", "must be >= 32");
  require(c.testbench.random_fields >= 0, "testbench.random_fields", "must be >= 0");
  require(c.testbench.stability_ratio >= 1.0, "testbench.stability_ratio", "must be >= 1");
  require(c.specfun.psi_samples >= 0, "specfun.psi_samples", "must be >= 0");
  require(c.specfun.adjoint_points >= 0, "specfun.adjoint_points", "must be >= 0");
  for (std::size_t k = 0; k < c.specfun.lambdas.size(); ++k) {
    require(c.specfun.lambdas[k].value >= 1.0, "specfun.lambdas[" + std::to_string(k) + "]",
            "must be >= 1");
  }
  require(c.sweep.cell_mode == "burgers" || c.sweep.cell_mode == "euler2d", "sweep.cell_mode",
          "must be 'burgers' or 'euler2d'");
  require(c.sweep.budget > 0, "sweep.budget", "must be > 0");
  if (c.mode == Mode::Sweep) {
    require(!c.sweep.lambda.empty(), "sweep.lambda", "must not be empty");
    require(!c.sweep.mu.empty(), "sweep.mu", "must not be empty");
    require(!c.sweep.eps.empty(), "sweep.eps", "must not be empty");
    const std::size_t cells = c.sweep.lambda.size() * c.sweep.mu.size() * c.sweep.eps.size();
    require(cells <= static_cast<std::size_t>(c.sweep.budget), "sweep",
            std::to_string(cells) + " cells exceed the budget of " +
                std::to_string(c.sweep.budget));
  }
  for (std::size_t k = 0; k < c.sweep.lambda.size(); ++k) {
    require(c.sweep.lambda[k].value >= 0.0, "sweep.lambda[" + std::to_string(k) + "]",
            "must be >= 0");
  }
  for (std::size_t k = 0; k < c.sweep.mu.size(); ++k) {
    require(c.sweep.mu[k].value > 0.0, "sweep.mu[" + std::to_string(k) + "]", "must be > 0");
  }
  for (std::size_t k = 0; k < c.sweep.eps.size(); ++k) {
    require(c.sweep.eps[k] > 0.0, "sweep.eps[" + std::to_string(k) + "]", "must be > 0");
  }
}

/// Parses and validates. Missing keys keep their defaults; `mode` may be
/// omitted when the caller supplies it.
inline ExperimentConfig config_from_json(const json& j, std::optional<Mode> forced = {}) {
  ExperimentConfig c;
  detail::Reader r(j, "");
  std::string mode;
  r.get("mode", mode);
  if (!mode.empty()) c.mode = mode_from_string(mode);
  if (forced) {
    if (!mode.empty() && c.mode != *forced) {
      throw UsageError("mode", "config says '" + mode + "' but the subcommand is '" +
                                   to_string(*forced) + "'");
    }
    c.mode = *forced;
  } else if (mode.empty()) {
    throw UsageError("mode", "missing");
  }
  r.object("law", [&](detail::Reader& s) {
    s.get("lambda", c.law.lambda);
    s.get("mu", c.law.mu);
  });
  r.object("gas", [&](detail::Reader& s) {
    s.get("gamma", c.gas.gamma);
    s.get("rho_bar", c.gas.rho_bar);
  });
  r.get("eps", c.eps);
  r.get("t_end", c.t_end);
  r.get("seed", c.seed);
  r.object("data", [&](detail::Reader& s) {
    s.get("family", c.data.family);
    s.get("profile", c.data.profile);
    s.get("M", c.data.M);
    s.get("M_tilde", c.data.M_tilde);
    s.get("rho_amplitude", c.data.rho_amplitude);
    s.get("u_amplitude", c.data.u_amplitude);
    s.get("Lambda", c.data.Lambda);
  });
  r.object("grid", [&](detail::Reader& s) {
    s.get("L", c.grid.L);
    s.get("n", c.grid.n);
    s.get("nx", c.grid.nx);
  });
  r.object("solver", [&](detail::Reader& s) {
    s.get("hyperviscosity", c.solver.hyperviscosity);
    s.get("cfl", c.solver.cfl);
    s.get("blowup_threshold", c.solver.blowup_threshold);
    s.get("extra_thresholds", c.solver.extra_thresholds);
    s.get("sample_every", c.solver.sample_every);
    s.get("snapshot_times", c.solver.snapshot_times);
    s.get("energies", c.solver.energies);
  });
  r.object("diagnose", [&](detail::Reader& s) {
    s.get("snapshot", c.diagnose.snapshot);
    s.get("window_fraction", c.diagnose.window_fraction);
  });
  r.object("testbench", [&](detail::Reader& s) {
    s.get("times", c.testbench.times);
    s.get("catalog_M", c.testbench.catalog_M);
    s.get("samples", c.testbench.samples);
    s.get("divcurl_n", c.testbench.divcurl_n);
    s.get("random_fields", c.testbench.random_fields);
    s.get("stability_ratio", c.testbench.stability_ratio);
  });
  r.object("specfun", [&](detail::Reader& s) {
    s.get("psi_samples", c.specfun.psi_samples);
    s.get("adjoint_points", c.specfun.adjoint_points);
    s.get("lambdas", c.specfun.lambdas);
  });
  r.object("sweep", [&](detail::Reader& s) {
    s.get("lambda", c.sweep.lambda);
    s.get("mu", c.sweep.mu);
    s.get("eps", c.sweep.eps);
    s.get("cell_mode", c.sweep.cell_mode);
    s.get("budget", c.sweep.budget);
  });
  r.get("output", c.output);
  r.finish();
  validate(c);
  return c;
}

/// Every field, defaults included, so the result parses back to an equal config.
inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["law"] = {{"lambda", c.law.lambda.text}, {"mu", c.law.mu.text}};
  j["gas"] = {{"gamma", c.gas.gamma}, {"rho_bar", c.gas.rho_bar}};
  j["eps"] = c.eps;
  j["t_end"] = c.t_end;
  j["seed"] = c.seed;
  j["data"] = {{"family", c.data.family},
               {"profile", c.data.profile},
               {"M", c.data.M},
               {"M_tilde", c.data.M_tilde},
               {"rho_amplitude", c.data.rho_amplitude},
               {"u_amplitude", c.data.u_amplitude},
               {"Lambda", c.data.Lambda}};
  j["grid"] = {{"L", c.grid.L}, {"n", c.grid.n}, {"nx", c.grid.nx}};
  j["solver"] = {{"hyperviscosity", c.solver.hyperviscosity},
                 {"cfl", c.solver.cfl},
                 {"blowup_threshold", c.solver.blowup_threshold},
                 {"extra_thresholds", c.solver.extra_thresholds},
                 {"sample_every", c.solver.sample_every},
                 {"snapshot_times", c.solver.snapshot_times},
                 {"energies", c.solver.energies}};
  j["diagnose"] = {{"snapshot", c.diagnose.snapshot},
                   {"window_fraction", c.diagnose.window_fraction}};
  j["testbench"] = {{"times", c.testbench.times},
                    {"catalog_M", c.testbench.catalog_M},
                    {"samples", c.testbench.samples},
                    {"divcurl_n", c.testbench.divcurl_n},
                    {"random_fields", c.testbench.random_fields},
                    {"stability_ratio", c.testbench.stability_ratio}};
  j["specfun"] = {{"psi_samples", c.specfun.psi_samples},
                  {"adjoint_points", c.specfun.adjoint_points},
                  {"lambdas", detail::decimals(c.specfun.lambdas)}};
  j["sweep"] = {{"lambda", detail::decimals(c.sweep.lambda)},
                {"mu", detail::decimals(c.sweep.mu)},
                {"eps", c.sweep.eps},
                {"cell_mode", c.sweep.cell_mode},
                {"budget", c.sweep.budget}};
  j["output"] = c.output;
  return j;
}

}  // namespace dampeuler::cli
