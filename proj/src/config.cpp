#include "relax/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace relax {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"system",
       {"kind", "name", "reaction", "k", "d", "diffusion", "a1", "a2", "source_matrix", "transform",
        "conserved", "box_lower", "box_upper"}},
      {"grid", {"n", "nx", "ny", "length", "lx", "ly"}},
      {"solver",
       {"eps", "T", "cfl", "flux", "source_solve", "newton_tol", "newton_max_iter", "snapshot_stride"}},
      {"experiment",
       {"init", "mean", "amplitude", "well_prepared", "ladder", "reference", "reference_refinement",
        "directions", "sample_points"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

class Fields {
 public:
  Fields(std::map<std::string, Entry> entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string text(const std::string& key) const { return entries_.at(key).value; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const auto it = entries_.find(key);
    const std::string where = it == entries_.end() ? source_ : source_ + ":" + std::to_string(it->second.line);
    throw ConfigError(where + ": field '" + key + "': " + what);
  }

  std::string required(const std::string& key) const {
    if (!has(key)) throw ConfigError(source_ + ": missing required field '" + key + "'");
    return text(key);
  }

  double number(const std::string& key, const std::string& token) const {
    double v = 0.0;
    const char* first = token.data();
    const char* last = first + token.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(key, "expected a number, got '" + token + "'");
    return v;
  }

  double real(const std::string& key) const { return number(key, text(key)); }

  int integer(const std::string& key) const {
    const std::string t = text(key);
    int v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) fail(key, "expected an integer, got '" + t + "'");
    return v;
  }

  bool boolean(const std::string& key) const {
    const std::string t = text(key);
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    fail(key, "expected true or false, got '" + t + "'");
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) fail(key, "empty list element");
      out.push_back(number(key, item));
    }
    if (out.empty()) fail(key, "empty list");
    return out;
  }

  /// Rows separated by ';', entries by whitespace.
  Matrix matrix(const std::string& key) const {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(text(key));
    std::string row;
    while (std::getline(ss, row, ';')) {
      std::stringstream rs(row);
      std::string tok;
      std::vector<double> vals;
      while (rs >> tok) vals.push_back(number(key, tok));
      if (vals.empty()) fail(key, "empty matrix row");
      if (!rows.empty() && vals.size() != rows.front().size()) fail(key, "ragged matrix rows");
      rows.push_back(std::move(vals));
    }
    if (rows.empty()) fail(key, "empty matrix");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
  }

 private:
  std::map<std::string, Entry> entries_;
  std::string source_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::string section;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const std::string where = source + ":" + std::to_string(line);
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": malformed section header '" + body + "'");
      section = trim(body.substr(1, body.size() - 2));
      if (!known_keys().count(section)) throw ConfigError(where + ": unknown section '" + section + "'");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + body + "'");
    if (section.empty()) throw ConfigError(where + ": field outside of any section");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!known_keys().at(section).count(key))
      throw ConfigError(where + ": unknown field '" + section + "." + key + "'");
    const std::string full = section + "." + key;
    if (entries.count(full)) throw ConfigError(where + ": duplicate field '" + full + "'");
    if (value.empty()) throw ConfigError(where + ": field '" + full + "' has no value");
    entries[full] = {value, line};
  }

  const Fields f(std::move(entries), source);
  ExperimentConfig c;
  c.kind = f.required("system.kind");
  if (c.kind == "demo") {
    c.demo = f.required("system.name");
  } else if (c.kind == "reaction-diffusion" || c.kind == "sqrt-symbol") {
    c.k = f.has("system.k") ? f.integer("system.k") : 1;
    c.d = f.has("system.d") ? f.integer("system.d") : 1;
    f.required("system.diffusion");
    c.diffusion = f.matrix("system.diffusion");
    if (c.diffusion.rows() != c.k * c.d || c.diffusion.cols() != c.k * c.d)
      f.fail("system.diffusion", "must be (k*d) x (k*d)");
  } else if (c.kind == "raw") {
    f.required("system.a1");
    c.raw_coefficients.push_back(f.matrix("system.a1"));
    if (f.has("system.a2")) c.raw_coefficients.push_back(f.matrix("system.a2"));
    c.d = static_cast<int>(c.raw_coefficients.size());
    f.required("system.source_matrix");
    c.raw_source = f.matrix("system.source_matrix");
    f.required("system.transform");
    c.transform = f.matrix("system.transform");
    f.required("system.conserved");
    c.conserved = f.integer("system.conserved");
  } else {
    f.fail("system.kind", "expected demo, reaction-diffusion, sqrt-symbol or raw, got '" + c.kind + "'");
  }
  if (f.has("system.reaction")) {
    c.reaction = f.text("system.reaction");
    if (c.reaction != "none" && c.reaction != "logistic")
      f.fail("system.reaction", "expected none or logistic");
  }
  if (f.has("system.box_lower") != f.has("system.box_upper"))
    f.fail(f.has("system.box_lower") ? "system.box_upper" : "system.box_lower",
           "box_lower and box_upper must be given together");
  if (f.has("system.box_lower")) {
    const auto lo = f.list("system.box_lower");
    const auto hi = f.list("system.box_upper");
    if (lo.size() != hi.size()) f.fail("system.box_upper", "size differs from box_lower");
    StateBox box{Eigen::Map<const Vector>(lo.data(), lo.size()), Eigen::Map<const Vector>(hi.data(), hi.size())};
    if (!(box.upper.array() > box.lower.array()).all()) f.fail("system.box_upper", "must exceed box_lower");
    c.box = box;
  }

  if (f.has("grid.nx")) {
    c.cells = {f.integer("grid.nx")};
    if (f.has("grid.ny")) c.cells.push_back(f.integer("grid.ny"));
  } else {
    f.required("grid.n");
    c.cells = {f.integer("grid.n")};
  }
  const double length = f.has("grid.length") ? f.real("grid.length") : 1.0;
  c.lengths = {f.has("grid.lx") ? f.real("grid.lx") : length};
  if (c.cells.size() == 2) c.lengths.push_back(f.has("grid.ly") ? f.real("grid.ly") : length);
  for (int n : c.cells)
    if (n < 4) f.fail(f.has("grid.nx") ? "grid.nx" : "grid.n", "cell counts must be >= 4");
  for (double l : c.lengths)
    if (!(l > 0.0)) f.fail("grid.length", "periods must be positive");

  if (f.has("solver.eps")) c.eps = f.real("solver.eps");
  if (!(c.eps > 0.0)) f.fail("solver.eps", "must be positive");
  if (f.has("solver.T")) c.T = f.real("solver.T");
  if (!(c.T >= 0.0)) f.fail("solver.T", "must be >= 0");
  if (f.has("solver.cfl")) c.solver.cfl = f.real("solver.cfl");
  if (!(c.solver.cfl > 0.0 && c.solver.cfl <= 1.0)) f.fail("solver.cfl", "must lie in (0, 1]");
  if (f.has("solver.flux")) {
    try {
      c.solver.flux = parse_flux(f.text("solver.flux"));
    } catch (const PreconditionError& e) {
      f.fail("solver.flux", e.what());
    }
  }
  if (f.has("solver.source_solve")) {
    try {
      c.solver.source_solve = parse_source_solve(f.text("solver.source_solve"));
    } catch (const PreconditionError& e) {
      f.fail("solver.source_solve", e.what());
    }
  }
  if (f.has("solver.newton_tol")) c.solver.newton_tolerance = f.real("solver.newton_tol");
  if (!(c.solver.newton_tolerance > 0.0)) f.fail("solver.newton_tol", "must be positive");
  if (f.has("solver.newton_max_iter")) c.solver.newton_max_iterations = f.integer("solver.newton_max_iter");
  if (c.solver.newton_max_iterations < 1) f.fail("solver.newton_max_iter", "must be >= 1");
  if (f.has("solver.snapshot_stride")) c.solver.snapshot_stride = f.real("solver.snapshot_stride");
  if (!(c.solver.snapshot_stride >= 0.0)) f.fail("solver.snapshot_stride", "must be >= 0");

  if (f.has("experiment.init")) {
    c.init = f.text("experiment.init");
    if (c.init != "sine" && c.init != "constant") f.fail("experiment.init", "expected sine or constant");
  }
  if (f.has("experiment.mean")) c.mean = f.real("experiment.mean");
  if (f.has("experiment.amplitude")) c.amplitude = f.real("experiment.amplitude");
  if (f.has("experiment.well_prepared")) c.well_prepared = f.boolean("experiment.well_prepared");
  if (f.has("experiment.ladder")) c.ladder = f.list("experiment.ladder");
  if (f.has("experiment.reference")) c.reference = f.boolean("experiment.reference");
  if (f.has("experiment.reference_refinement")) c.reference_refinement = f.integer("experiment.reference_refinement");
  if (c.reference_refinement < 1) f.fail("experiment.reference_refinement", "must be >= 1");
  if (f.has("experiment.directions")) c.directions = f.integer("experiment.directions");
  if (c.directions < 4) f.fail("experiment.directions", "must be >= 4");
  if (f.has("experiment.sample_points")) c.sample_points = f.integer("experiment.sample_points");
  if (c.sample_points < 1) f.fail("experiment.sample_points", "must be >= 1");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.string());
}

Experiment build_experiment(const ExperimentConfig& config) {
  const SpatialGrid grid = config.cells.size() == 2
                               ? SpatialGrid(config.cells[0], config.cells[1], config.lengths[0], config.lengths[1])
                               : SpatialGrid(config.cells[0], config.lengths[0]);
  Experiment ex{config.kind, RelaxationSystem{}, std::nullopt, StateBox{}, grid, Matrix()};
  const bool logistic = config.reaction == "logistic";
  double mean = 0.0, amplitude = 1.0;

  if (config.kind == "demo") {
    Demo demo = make_demo(config.demo, grid, logistic);
    ex.name = demo.name;
    ex.system = std::move(demo.system);
    ex.target = std::move(demo.target);
    ex.box = demo.box;
    mean = demo.mean;
    amplitude = demo.amplitude;
  } else if (config.kind == "reaction-diffusion" || config.kind == "sqrt-symbol") {
    ReactionDiffusion t;
    t.k = config.k;
    t.d = config.d;
    const Matrix a = config.diffusion;
    t.diffusion = [a](const Point&) { return a; };
    if (logistic) t.reaction = logistic_reaction();
    ex.system = config.kind == "sqrt-symbol" ? from_sqrt_symbol(t, grid) : from_reaction_diffusion(t);
    ex.target = t;
    ex.box = logistic ? StateBox::uniform(t.k, 0.0, 1.0) : StateBox::uniform(t.k, -1.0, 1.0);
    if (logistic) {
      mean = 0.5;
      amplitude = 0.25;
    }
  } else {
    const int n = static_cast<int>(config.raw_source.rows());
    RawSystem raw;
    raw.name = "raw";
    raw.n = n;
    raw.d = config.d;
    for (const auto& a : config.raw_coefficients)
      if (a.rows() != n || a.cols() != n) throw ConfigError("system.a1/a2: coefficient matrices must be N x N");
    if (config.raw_source.cols() != n) throw ConfigError("system.source_matrix: must be N x N");
    const auto coeffs = config.raw_coefficients;
    raw.coefficients = [coeffs](const Point&, int axis) { return coeffs[axis]; };
    const Matrix s = config.raw_source;
    raw.source = [s](const Point&, const Vector& w) { return Vector(s * w); };
    raw.source_jacobian = [s](const Point&, const Vector&) { return s; };
    raw.probe_box = StateBox::uniform(n, -1.0, 1.0);
    ex.system = decouple(raw, DecouplingTransform{config.transform, config.conserved});
    ex.system.source_linear = true;
    ex.system.source_jacobian_constant = true;
    ex.box = StateBox::uniform(config.conserved, -1.0, 1.0);
  }
  if (config.box) {
    if (config.box->dim() != ex.system.k) throw ConfigError("system.box_lower: must have k components");
    ex.box = *config.box;
  }
  if (config.mean) mean = *config.mean;
  if (config.amplitude) amplitude = *config.amplitude;
  if (config.init == "constant") amplitude = 0.0;
  if (ex.system.d != grid.dim()) throw ConfigError("grid: dimension does not match the system");
  ex.initial_uI = sine_field(grid, ex.system.k, mean, amplitude);
  return ex;
}

}  // namespace relax
