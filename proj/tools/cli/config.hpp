#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stit/functionals.hpp"
#include "stit/geometry.hpp"
#include "stit/measure.hpp"
#include "stit/mixing.hpp"

namespace stit::cli {

/// A configuration problem, with the JSON path of the offending field.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& path, const std::string& msg)
      : std::runtime_error((path.empty() ? std::string("config") : path) + ": " + msg) {}
};

/// Read-only view of a JSON object that remembers its path for diagnostics.
class Node {
public:
  Node(const nlohmann::json* j, std::string path) : j_(j), path_(std::move(path)) {}

  bool has(const std::string& key) const;
  Node at(const std::string& key) const;
  Node at(std::size_t index) const;
  std::size_t size() const;
  bool is_null() const { return j_ == nullptr || j_->is_null(); }
  const std::string& path() const { return path_; }
  const nlohmann::json& json() const { return *j_; }

  double number() const;
  std::int64_t integer() const;
  bool boolean() const;
  std::string string() const;
  std::vector<double> numbers() const;
  std::vector<int> integers() const;

  double number_or(const std::string& key, double fallback) const;
  std::int64_t integer_or(const std::string& key, std::int64_t fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_, msg); }

private:
  const nlohmann::json* j_;
  std::string path_;
};

struct SimulateBlock {
  CuboidRegion window;
  bool svg = true;
};

struct FunctionalsBlock {
  CuboidRegion window;
  std::vector<CuboidRegion> regions;
  std::optional<int> grid_n;
  std::vector<FunctionalSpec> functionals;
};

struct ScanBlock {
  FunctionalSpec functional;
  std::vector<int> n_values;
  double margin = 0.0;
  MomentParams moments;
  int bootstrap = 200;
};

struct BetaBlock {
  double a = 0.5;
  std::vector<double> b_values;
  BetaMode mode = BetaMode::Standard;
  ProbeLayout probes;  // empty: defaults per b
  int bootstrap = 200;
  double window_margin = 0.1;
};

struct AssumptionsBlock {
  double a = 1.0;
  double b = 2.0;
};

/// Everything a subcommand needs, validated before any simulation starts.
struct RunConfig {
  int dim = 2;
  HyperplaneMeasure measure{DirectionalDistribution::isotropic(2, 1.0)};
  nlohmann::json measure_json;
  double t = 1.0;
  std::uint64_t seed = 0;
  std::int64_t replicates = 100;
  unsigned threads = 1;
  std::string out_dir;  // empty: the --out-dir flag or "."
  nlohmann::json raw;  // the parsed document, for the plan hash

  SimulateBlock simulate;
  FunctionalsBlock functionals;
  ScanBlock variance_scan;
  ScanBlock ergodic_scan;
  BetaBlock beta;
  AssumptionsBlock assumptions;
};

/// Parses the document text; an empty string yields the defaults. Throws
/// ConfigError with a line number for syntax errors and a field path for bad
/// values.
RunConfig parse_config(const std::string& text);

/// Short text for a measure, e.g. "isotropic(mass=1)".
std::string describe_measure(const nlohmann::json& measure_json);

} // namespace stit::cli
