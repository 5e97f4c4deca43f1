#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>

#include "stit/harness.hpp"

namespace stit::cli {

using nlohmann::json;

bool Node::has(const std::string& key) const {
  return j_ && j_->is_object() && j_->contains(key) && !(*j_)[key].is_null();
}

Node Node::at(const std::string& key) const {
  if (!j_ || !j_->is_object()) fail("expected an object");
  auto it = j_->find(key);
  if (it == j_->end()) return {nullptr, path_ + "/" + key};
  return {&*it, path_ + "/" + key};
}

Node Node::at(std::size_t index) const {
  if (!j_ || !j_->is_array()) fail("expected an array");
  if (index >= j_->size()) fail("index " + std::to_string(index) + " out of range");
  return {&(*j_)[index], path_ + "/" + std::to_string(index)};
}

std::size_t Node::size() const {
  if (!j_ || !j_->is_array()) fail("expected an array");
  return j_->size();
}

double Node::number() const {
  if (!j_) fail("missing required number");
  if (!j_->is_number()) fail("expected a number");
  const double v = j_->get<double>();
  if (!std::isfinite(v)) fail("expected a finite number");
  return v;
}

std::int64_t Node::integer() const {
  if (!j_) fail("missing required integer");
  if (!j_->is_number_integer()) fail("expected an integer");
  return j_->get<std::int64_t>();
}

bool Node::boolean() const {
  if (!j_ || !j_->is_boolean()) fail("expected true or false");
  return j_->get<bool>();
}

std::string Node::string() const {
  if (!j_ || !j_->is_string()) fail("expected a string");
  return j_->get<std::string>();
}

std::vector<double> Node::numbers() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).number());
  return out;
}

std::vector<int> Node::integers() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto v = at(i).integer();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) at(i).fail("integer out of range");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

double Node::number_or(const std::string& key, double fallback) const {
  return has(key) ? at(key).number() : fallback;
}
std::int64_t Node::integer_or(const std::string& key, std::int64_t fallback) const {
  return has(key) ? at(key).integer() : fallback;
}
bool Node::boolean_or(const std::string& key, bool fallback) const {
  return has(key) ? at(key).boolean() : fallback;
}
std::string Node::string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? at(key).string() : fallback;
}

namespace {

// Unknown keys are usually typos, so they are rejected rather than ignored.
void check_keys(const Node& n, std::initializer_list<const char*> allowed) {
  if (n.is_null()) return;
  if (!n.json().is_object()) n.fail("expected an object");
  for (const auto& item : n.json().items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
    if (!known) n.at(item.key()).fail("unknown key");
  }
}

Vector vector_of(const Node& n, int dim) {
  const auto v = n.numbers();
  if (static_cast<int>(v.size()) != dim) n.fail("expected " + std::to_string(dim) + " coordinates");
  Vector out(dim);
  for (int r = 0; r < dim; ++r) out[r] = v[static_cast<std::size_t>(r)];
  return out;
}

CuboidRegion cuboid(const Node& n, int dim) {
  if (n.is_null()) n.fail("missing cuboid {\"lower\": [...], \"upper\": [...]}");
  check_keys(n, {"lower", "upper"});
  const Vector lo = vector_of(n.at("lower"), dim);
  const Vector hi = vector_of(n.at("upper"), dim);
  for (int r = 0; r < dim; ++r)
    if (!(lo[r] < hi[r])) n.fail("lower must be below upper in every coordinate");
  return {lo, hi};
}

CuboidRegion cuboid_or(const Node& parent, const std::string& key, int dim, const CuboidRegion& fallback) {
  return parent.has(key) ? cuboid(parent.at(key), dim) : fallback;
}

HyperplaneMeasure parse_measure(const Node& n, int dim) {
  check_keys(n, {"kind", "mass", "atoms"});
  const std::string kind = n.string_or("kind", "isotropic");
  try {
    if (kind == "isotropic") {
      const double mass = n.number_or("mass", 1.0);
      if (!(mass > 0.0)) n.at("mass").fail("mass must be positive");
      return HyperplaneMeasure(DirectionalDistribution::isotropic(dim, mass));
    }
    if (kind == "discrete") {
      const Node atoms = n.at("atoms");
      if (atoms.is_null() || atoms.size() == 0) atoms.fail("discrete measure needs at least one atom");
      std::vector<DirectionAtom> list;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const Node a = atoms.at(i);
        check_keys(a, {"weight", "angle", "direction"});
        const double w = a.at("weight").number();
        if (!(w > 0.0)) a.at("weight").fail("weight must be positive");
        if (a.has("angle")) {
          if (dim != 2) a.at("angle").fail("angles describe 2D directions only");
          list.push_back(DirectionAtom::from_angle(a.at("angle").number(), w));
        } else {
          const Vector u = vector_of(a.at("direction"), dim);
          if (!(norm(u) > 0.0)) a.at("direction").fail("direction must be nonzero");
          list.push_back({normalized(u), w});
        }
      }
      return HyperplaneMeasure(DirectionalDistribution::discrete(std::move(list)));
    }
  } catch (const std::invalid_argument& e) {
    n.fail(e.what());
  }
  n.at("kind").fail("kind must be \"isotropic\" or \"discrete\"");
}

FunctionalSpec parse_functional(const Node& n) {
  if (n.is_null()) n.fail("missing functional");
  check_keys(n, {"name", "alpha", "k", "phi", "negated"});
  FunctionalParams p;
  p.alpha = n.number_or("alpha", 0.5);
  const auto k = n.integer_or("k", 0);
  if (k < 0 || k > 2) n.at("k").fail("k must be 0, 1 or 2");
  p.k = static_cast<int>(k);
  p.negated = n.boolean_or("negated", false);
  try {
    if (n.has("phi")) p.phi = parse_cell_feature(n.at("phi").string());
  } catch (const std::invalid_argument& e) {
    n.at("phi").fail(e.what());
  }
  try {
    return make_functional(n.at("name").string(), p);
  } catch (const std::invalid_argument& e) {
    n.fail(e.what());
  }
}

ScanBlock parse_scan(const Node& n, std::vector<int> default_n) {
  check_keys(n, {"functional", "n_values", "margin", "delta", "theta", "kappa", "bootstrap"});
  ScanBlock s;
  s.functional = n.has("functional") ? parse_functional(n.at("functional")) : make_functional("boundary_mass");
  s.n_values = n.has("n_values") ? n.at("n_values").integers() : std::move(default_n);
  if (s.n_values.empty()) n.at("n_values").fail("needs at least one value");
  for (std::size_t i = 0; i < s.n_values.size(); ++i)
    if (s.n_values[i] < 1) n.at("n_values").at(i).fail("n must be >= 1");
  s.margin = n.number_or("margin", default_margin(s.functional));
  if (!(s.margin >= 0.0)) n.at("margin").fail("margin must be >= 0");
  s.moments.delta = n.number_or("delta", 2.0);
  s.moments.theta = n.number_or("theta", 0.9);
  s.moments.kappa = n.number_or("kappa", 0.25);
  try {
    s.moments.validate();
  } catch (const std::exception& e) {
    n.fail(e.what());
  }
  const auto b = n.integer_or("bootstrap", 200);
  if (b < 0 || b > 100000) n.at("bootstrap").fail("bootstrap must be in 0..100000");
  s.bootstrap = static_cast<int>(b);
  return s;
}

std::vector<CuboidRegion> cuboid_list(const Node& n, int dim) {
  std::vector<CuboidRegion> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(cuboid(n.at(i), dim));
  return out;
}

BetaBlock parse_beta(const Node& n, int dim) {
  check_keys(n, {"a", "b_values", "mode", "probes", "bootstrap", "window_margin"});
  BetaBlock b;
  b.a = n.number_or("a", 0.5);
  if (!(b.a > 0.0)) n.at("a").fail("a must be positive");
  b.b_values = n.has("b_values") ? n.at("b_values").numbers() : std::vector<double>{1, 2, 4, 8};
  if (b.b_values.empty()) n.at("b_values").fail("needs at least one value");
  for (std::size_t i = 0; i < b.b_values.size(); ++i)
    if (!(b.b_values[i] > b.a)) n.at("b_values").at(i).fail("every b must exceed a");
  const std::string mode = n.string_or("mode", "standard");
  if (mode == "standard")
    b.mode = BetaMode::Standard;
  else if (mode == "shuffled")
    b.mode = BetaMode::ShuffledOuter;
  else if (mode == "self-test")
    b.mode = BetaMode::SelfTest;
  else
    n.at("mode").fail("mode must be \"standard\", \"shuffled\" or \"self-test\"");
  if (n.has("probes")) {
    const Node p = n.at("probes");
    check_keys(p, {"inner", "outer"});
    b.probes.inner = cuboid_list(p.at("inner"), dim);
    b.probes.outer = cuboid_list(p.at("outer"), dim);
    for (double bv : b.b_values) {
      try {
        validate_probes(b.probes, b.a, bv);
      } catch (const std::exception& e) {
        p.fail(std::string(e.what()) + " (b = " + std::to_string(bv) + ")");
      }
    }
  }
  const auto boot = n.integer_or("bootstrap", 200);
  if (boot < 0 || boot > 100000) n.at("bootstrap").fail("bootstrap must be in 0..100000");
  b.bootstrap = static_cast<int>(boot);
  b.window_margin = n.number_or("window_margin", 0.1);
  if (!(b.window_margin > 0.0)) n.at("window_margin").fail("window_margin must be positive");
  return b;
}

} // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    cfg.raw = json::object();
  } else {
    try {
      cfg.raw = json::parse(text);
    } catch (const json::parse_error& e) {
      std::size_t line = 1;
      for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
        if (text[i] == '\n') ++line;
      throw ConfigError("", "syntax error at line " + std::to_string(line) + ": " + e.what());
    }
  }
  const Node root(&cfg.raw, "");
  if (!cfg.raw.is_object()) root.fail("top level must be an object");
  check_keys(root, {"dim", "measure", "t", "seed", "replicates", "threads", "out_dir", "simulate", "functionals",
                    "variance_scan", "ergodic_scan", "beta", "check_assumptions"});
  cfg.out_dir = root.string_or("out_dir", "");

  const auto dim = root.integer_or("dim", 2);
  if (dim != 2 && dim != 3) root.at("dim").fail("dim must be 2 or 3");
  cfg.dim = static_cast<int>(dim);
  cfg.measure_json = root.has("measure") ? cfg.raw["measure"] : json{{"kind", "isotropic"}, {"mass", 1.0}};
  cfg.measure = root.has("measure") ? parse_measure(root.at("measure"), cfg.dim)
                                    : HyperplaneMeasure(DirectionalDistribution::isotropic(cfg.dim, 1.0));
  cfg.t = root.number_or("t", 1.0);
  if (!(cfg.t > 0.0)) root.at("t").fail("t must be positive");
  if (root.has("seed")) {
    const Node s = root.at("seed");
    if (!s.json().is_number_integer() || (s.json().is_number_integer() && !s.json().is_number_unsigned() &&
                                          s.json().get<std::int64_t>() < 0))
      s.fail("seed must be a nonnegative integer");
    cfg.seed = s.json().get<std::uint64_t>();
  }
  cfg.replicates = root.integer_or("replicates", 100);
  if (cfg.replicates < 1) root.at("replicates").fail("replicates must be >= 1");
  const auto threads = root.integer_or("threads", 1);
  if (threads < 0 || threads > 1024) root.at("threads").fail("threads must be in 0..1024");
  cfg.threads = static_cast<unsigned>(threads);

  const CuboidRegion unit = CuboidRegion::cube(cfg.dim, -2.0, 2.0);
  {
    const Node s = root.has("simulate") ? root.at("simulate") : Node(nullptr, "/simulate");
    check_keys(s, {"window", "svg"});
    cfg.simulate.window = cuboid_or(s, "window", cfg.dim, unit);
    cfg.simulate.svg = s.boolean_or("svg", true);
  }
  {
    const Node f = root.has("functionals") ? root.at("functionals") : Node(nullptr, "/functionals");
    check_keys(f, {"window", "regions", "grid_n", "functionals"});
    if (f.has("grid_n")) {
      const auto n = f.at("grid_n").integer();
      if (n < 1 || n > 64) f.at("grid_n").fail("grid_n must be in 1..64");
      cfg.functionals.grid_n = static_cast<int>(n);
    }
    const double half = cfg.functionals.grid_n ? *cfg.functionals.grid_n : 1.0;
    cfg.functionals.window = cuboid_or(f, "window", cfg.dim, CuboidRegion::cube(cfg.dim, -half, half));
    if (f.has("regions")) cfg.functionals.regions = cuboid_list(f.at("regions"), cfg.dim);
    if (f.has("functionals")) {
      const Node list = f.at("functionals");
      for (std::size_t i = 0; i < list.size(); ++i) cfg.functionals.functionals.push_back(parse_functional(list.at(i)));
    } else {
      cfg.functionals.functionals.push_back(make_functional("boundary_mass"));
    }
    if (cfg.functionals.regions.empty() && !cfg.functionals.grid_n)
      cfg.functionals.regions.push_back(cfg.functionals.window);
    for (const auto& x : cfg.functionals.functionals)
      if (x.name == "segment_center_count" && cfg.dim != 2) f.fail("segment_center_count needs dim 2");
  }
  cfg.variance_scan = parse_scan(root.has("variance_scan") ? root.at("variance_scan") : Node(nullptr, "/variance_scan"),
                                 {1, 2, 4, 8});
  {
    const Node e = root.has("ergodic_scan") ? root.at("ergodic_scan") : Node(nullptr, "/ergodic_scan");
    cfg.ergodic_scan = parse_scan(e, {1, 2, 4, 8, 16});
    if (!e.has("functional")) {
      cfg.ergodic_scan.functional = make_functional("power");
      cfg.ergodic_scan.margin = e.number_or("margin", 0.0);
    }
  }
  cfg.beta = parse_beta(root.has("beta") ? root.at("beta") : Node(nullptr, "/beta"), cfg.dim);
  {
    const Node c = root.has("check_assumptions") ? root.at("check_assumptions") : Node(nullptr, "/check_assumptions");
    check_keys(c, {"a", "b"});
    cfg.assumptions.a = c.number_or("a", 1.0);
    cfg.assumptions.b = c.number_or("b", 2.0);
    if (!(cfg.assumptions.a > 0.0 && cfg.assumptions.b > cfg.assumptions.a))
      c.fail("need 0 < a < b");
  }
  return cfg;
}

std::string describe_measure(const json& m) {
  const std::string kind = m.value("kind", "isotropic");
  if (kind == "isotropic") return "isotropic(mass=" + m.value("mass", json(1.0)).dump() + ")";
  return "discrete(" + m.value("atoms", json::array()).dump() + ")";
}

} // namespace stit::cli
