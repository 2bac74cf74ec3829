#include "netgrad/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace netgrad {

ConfigParseError::ConfigParseError(std::string source, int line, const std::string& msg)
    : ConfigError(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + msg),
      source_(std::move(source)),
      line_(line) {}

double TomlValue::as_double() const {
  if (const auto* i = std::get_if<long long>(&data)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&data)) return *d;
  throw std::invalid_argument("expected a number");
}

long long TomlValue::as_int() const {
  if (const auto* i = std::get_if<long long>(&data)) return *i;
  if (const auto* d = std::get_if<double>(&data)) {
    if (std::floor(*d) == *d && std::abs(*d) < 9.2e18) return static_cast<long long>(*d);
  }
  throw std::invalid_argument("expected an integer");
}

const std::string& TomlValue::as_string() const {
  if (const auto* s = std::get_if<std::string>(&data)) return *s;
  throw std::invalid_argument("expected a string");
}

const TomlValue::Array& TomlValue::as_array() const {
  if (const auto* a = std::get_if<Array>(&data)) return *a;
  throw std::invalid_argument("expected an array");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (std::size_t i = 0; i < key.size(); ++i) {
    const char c = key[i];
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
                    (c == '.' && key[i - 1] != '.');
    if (!ok) return false;
  }
  return true;
}

/// Recursive-descent reader over one value.
class ValueReader {
 public:
  ValueReader(const std::string& text, const std::string& source, int line)
      : text_(text), source_(source), line_(line) {}

  TomlValue read_all() {
    TomlValue v = read();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing characters '" + text_.substr(pos_) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigParseError(source_, line_, msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  TomlValue read() {
    skip_ws();
    if (pos_ >= text_.size()) fail("missing value");
    TomlValue v;
    v.line = line_;
    const char c = text_[pos_];
    if (c == '"') {
      v.data = read_string();
    } else if (c == '[') {
      v.data = read_array();
    } else {
      const auto end = text_.find_first_of(",] \t", pos_);
      const std::string tok = text_.substr(pos_, end == std::string::npos ? end : end - pos_);
      pos_ = end == std::string::npos ? text_.size() : end;
      v.data = read_scalar(tok);
    }
    return v;
  }

  std::string read_string() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') {
        if (++pos_ >= text_.size()) break;
        switch (text_[pos_]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape '\\") + text_[pos_] + "'");
        }
      } else {
        out += text_[pos_];
      }
      ++pos_;
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  TomlValue::Array read_array() {
    ++pos_;
    TomlValue::Array out;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return out;
    }
    while (true) {
      out.push_back(read());
      skip_ws();
      if (pos_ >= text_.size()) fail("unterminated array");
      if (text_[pos_] == ',') {
        ++pos_;
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ']') {
          ++pos_;
          return out;
        }
        continue;
      }
      if (text_[pos_] == ']') {
        ++pos_;
        return out;
      }
      fail("expected ',' or ']' in array");
    }
  }

  std::variant<bool, long long, double, std::string, TomlValue::Array> read_scalar(
      const std::string& tok) {
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
    if (tok == "-inf") return -std::numeric_limits<double>::infinity();
    std::string clean;
    for (char c : tok)
      if (c != '_') clean += c;
    if (clean.empty()) fail("missing value");
    const bool looks_float = clean.find_first_of(".eE") != std::string::npos;
    const char* first = clean.data();
    const char* last = clean.data() + clean.size();
    if (*first == '+') ++first;
    if (!looks_float) {
      long long v = 0;
      const auto [p, ec] = std::from_chars(first, last, v);
      if (ec == std::errc() && p == last) return v;
      if (ec == std::errc::result_out_of_range) fail("integer '" + tok + "' is out of range");
    } else {
      errno = 0;
      char* end = nullptr;
      const std::string s(first, last);
      const double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str() + s.size() && errno != ERANGE) return v;
    }
    fail("cannot parse value '" + tok + "' (strings must be double-quoted)");
  }

  const std::string& text_;
  const std::string& source_;
  int line_;
  std::size_t pos_ = 0;
};

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

}  // namespace

TomlValue parse_toml_value(const std::string& text, const std::string& source, int line) {
  return ValueReader(text, source, line).read_all();
}

TomlDocument parse_toml(const std::string& text, const std::string& source) {
  TomlDocument doc;
  std::istringstream in(text);
  std::string raw;
  std::string table;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.size() < 3 || line.back() != ']' || line[1] == '[')
        throw ConfigParseError(source, line_no, "malformed table header '" + line + "'");
      table = trim(line.substr(1, line.size() - 2));
      if (!valid_key(table))
        throw ConfigParseError(source, line_no, "invalid table name '" + table + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigParseError(source, line_no, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    if (!valid_key(key)) throw ConfigParseError(source, line_no, "invalid key '" + key + "'");
    const std::string full = table.empty() ? key : table + "." + key;
    if (doc.count(full))
      throw ConfigParseError(source, line_no, "duplicate key '" + full + "'");
    doc[full] = parse_toml_value(trim(line.substr(eq + 1)), source, line_no);
  }
  return doc;
}

// -- ExperimentConfig -----------------------------------------------------------

Graph GraphSpec::build() const {
  if (kind == "cycle") return make_cycle(static_cast<std::size_t>(n));
  if (kind == "petersen") return make_petersen();
  if (kind == "complete") return make_complete(static_cast<std::size_t>(n));
  if (kind == "edges") return make_from_edges(static_cast<std::size_t>(n), edges);
  throw ConfigError("unknown graph kind '" + kind + "'");
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  if (anchors.size() != o.anchors.size()) return false;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (anchors[i].label != o.anchors[i].label) return false;
    if (anchors[i].point.size() != o.anchors[i].point.size() ||
        anchors[i].point != o.anchors[i].point)
      return false;
  }
  return graph == o.graph && objective == o.objective && split == o.split &&
         gradient == o.gradient && noise_scale == o.noise_scale && data == o.data &&
         weights.alpha == o.weights.alpha && weights.beta == o.weights.beta &&
         weights.gamma == o.weights.gamma && form == o.form && steps == o.steps &&
         record_every == o.record_every && divergence_radius == o.divergence_radius &&
         init == o.init && runs == o.runs && seed == o.seed && jobs == o.jobs &&
         validation == o.validation && ratio_floor == o.ratio_floor && radius == o.radius;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k = {
        "graph.kind", "graph.n", "graph.edges", "graph.edges_file",
        "objective.name", "objective.split",
        "gradient.source", "gradient.scale",
        "data.x_lo", "data.x_hi", "data.mix_p", "data.slope_major", "data.slope_minor",
        "data.noise_std",
        "run.form", "run.steps", "run.record_every", "run.divergence_radius",
        "init.kind", "init.lo", "init.hi", "init.point", "init.agents",
        "experiment.runs", "experiment.seed", "experiment.jobs", "experiment.validation",
        "experiment.ratio_floor",
        "analysis.radius", "analysis.anchors", "analysis.labels",
    };
    for (const char* w : {"alpha", "beta", "gamma"})
      for (const char* p : {"law", "c", "tau", "r", "k0"})
        k.insert(std::string("weights.") + w + "." + p);
    return k;
  }();
  return keys;
}

class DocReader {
 public:
  DocReader(const TomlDocument& doc, std::string source) : doc_(doc), source_(std::move(source)) {
    for (const auto& [key, value] : doc_)
      if (!known_keys().count(key))
        throw ConfigParseError(source_, value.line, "unknown key '" + key + "'");
  }

  bool has(const std::string& key) const { return doc_.count(key) > 0; }

  template <typename F>
  auto get(const std::string& key, F&& convert) const {
    const auto& v = doc_.at(key);
    try {
      return convert(v);
    } catch (const ConfigParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigParseError(source_, v.line, "'" + key + "': " + e.what());
    }
  }

  double number(const std::string& key, double fallback) const {
    return has(key) ? get(key, [](const TomlValue& v) { return v.as_double(); }) : fallback;
  }
  long long integer(const std::string& key, long long fallback) const {
    return has(key) ? get(key, [](const TomlValue& v) { return v.as_int(); }) : fallback;
  }
  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key, [](const TomlValue& v) { return v.as_string(); }) : fallback;
  }
  std::vector<double> vector(const std::string& key) const {
    return get(key, [](const TomlValue& v) {
      std::vector<double> out;
      for (const auto& e : v.as_array()) out.push_back(e.as_double());
      return out;
    });
  }
  std::vector<std::vector<double>> matrix(const std::string& key) const {
    return get(key, [](const TomlValue& v) {
      std::vector<std::vector<double>> out;
      for (const auto& row : v.as_array()) {
        out.emplace_back();
        for (const auto& e : row.as_array()) out.back().push_back(e.as_double());
      }
      return out;
    });
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const auto it = doc_.find(key);
    throw ConfigParseError(source_, it == doc_.end() ? 0 : it->second.line,
                           "'" + key + "': " + msg);
  }

  /// Runs `f`, re-labelling std::invalid_argument as an error on `key`.
  template <typename F>
  auto guard(const std::string& key, F&& f) const {
    try {
      return f();
    } catch (const ConfigParseError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      fail(key, e.what());
    }
  }

 private:
  const TomlDocument& doc_;
  std::string source_;
};

Schedule read_schedule(const DocReader& r, const std::string& name, const Schedule& fallback) {
  const std::string p = "weights." + name + ".";
  if (!r.has(p + "law") && !r.has(p + "c")) return fallback;
  const std::string law_name = r.string(p + "law", "constant");
  const Law law = r.guard(p + "law", [&] { return law_from_string(law_name); });
  const double c = r.number(p + "c", 0.0);
  if (c == 0.0) return Schedule::constant(0.0);
  const long default_k0 = law == Law::annealing ? 16 : 1;
  const double tau = r.number(p + "tau", 1.0);
  const double rr = r.number(p + "r", 1.0);
  const long k0 = static_cast<long>(r.integer(p + "k0", default_k0));
  return r.guard(p + "law", [&] { return Schedule::make(law, c, tau, rr, k0); });
}

}  // namespace

ExperimentConfig config_from_toml(const TomlDocument& doc, const std::string& source,
                                  const std::filesystem::path& base_dir) {
  const DocReader r(doc, source);
  ExperimentConfig cfg;

  cfg.graph.kind = r.string("graph.kind", "cycle");
  // shorthand: cycle4, cycle10, complete5
  for (const std::string prefix : {"cycle", "complete"}) {
    if (cfg.graph.kind.size() > prefix.size() && cfg.graph.kind.rfind(prefix, 0) == 0) {
      const std::string digits = cfg.graph.kind.substr(prefix.size());
      if (digits.find_first_not_of("0123456789") == std::string::npos) {
        cfg.graph.n = std::stol(digits);
        cfg.graph.kind = prefix;
      }
    }
  }
  if (r.has("graph.n")) cfg.graph.n = static_cast<long>(r.integer("graph.n", 4));
  if (cfg.graph.kind == "petersen") cfg.graph.n = 10;
  if (r.has("graph.edges_file")) {
    const std::filesystem::path file = base_dir / r.string("graph.edges_file", "");
    std::ifstream in(file);
    if (!in) r.fail("graph.edges_file", "cannot open '" + file.string() + "'");
    const Graph g = r.guard("graph.edges_file", [&] { return parse_edge_list(in); });
    cfg.graph.kind = "edges";
    cfg.graph.n = static_cast<long>(g.size());
    cfg.graph.edges = g.edges();
  }
  if (r.has("graph.edges")) {
    cfg.graph.kind = "edges";
    for (const auto& e : r.matrix("graph.edges")) {
      if (e.size() != 2 || e[0] < 0 || e[1] < 0)
        r.fail("graph.edges", "each edge must be a pair of non-negative indices");
      cfg.graph.edges.emplace_back(static_cast<std::size_t>(e[0]), static_cast<std::size_t>(e[1]));
    }
  }
  if (cfg.graph.kind != "cycle" && cfg.graph.kind != "petersen" &&
      cfg.graph.kind != "complete" && cfg.graph.kind != "edges")
    r.fail("graph.kind", "unknown graph kind '" + cfg.graph.kind + "'");
  if (cfg.graph.n < 1) r.fail("graph.n", "must be >= 1");
  r.guard(cfg.graph.kind == "edges" && r.has("graph.edges") ? "graph.edges" : "graph.kind",
          [&] { return cfg.graph.build(); });

  cfg.objective = r.string("objective.name", cfg.objective);
  r.guard("objective.name", [&] { return objective_from_spec(cfg.objective); });
  cfg.split = r.string("objective.split", cfg.split);
  if (cfg.split != "even" && cfg.split != "replicate")
    r.fail("objective.split", "expected \"even\" or \"replicate\"");

  cfg.gradient = r.string("gradient.source", cfg.gradient);
  if (cfg.gradient != "regression" && cfg.gradient != "none" && cfg.gradient != "gaussian" &&
      cfg.gradient != "uniform")
    r.fail("gradient.source", "expected regression, none, gaussian or uniform");
  cfg.noise_scale = r.number("gradient.scale", 0.0);
  if (!(cfg.noise_scale >= 0)) r.fail("gradient.scale", "must be >= 0");
  if (cfg.gradient == "regression" && cfg.objective != "robust_regression")
    r.fail("gradient.source", "regression sampling requires objective.name = \"robust_regression\"");

  cfg.data.x_lo = r.number("data.x_lo", cfg.data.x_lo);
  cfg.data.x_hi = r.number("data.x_hi", cfg.data.x_hi);
  cfg.data.mix_p = r.number("data.mix_p", cfg.data.mix_p);
  cfg.data.slope_major = r.number("data.slope_major", cfg.data.slope_major);
  cfg.data.slope_minor = r.number("data.slope_minor", cfg.data.slope_minor);
  cfg.data.noise_std = r.number("data.noise_std", cfg.data.noise_std);
  if (!(cfg.data.x_lo < cfg.data.x_hi)) r.fail("data.x_hi", "must exceed data.x_lo");
  if (!(cfg.data.mix_p >= 0 && cfg.data.mix_p <= 1)) r.fail("data.mix_p", "must lie in [0, 1]");

  cfg.weights.alpha = read_schedule(r, "alpha", Schedule::constant(0.0));
  cfg.weights.beta = read_schedule(r, "beta", Schedule::constant(0.0));
  cfg.weights.gamma = read_schedule(r, "gamma", Schedule::constant(0.0));

  cfg.form = r.guard("run.form", [&] {
    return update_form_from_string(r.string("run.form", "literal"));
  });
  cfg.steps = static_cast<long>(r.integer("run.steps", cfg.steps));
  if (cfg.steps < 1) r.fail("run.steps", "must be >= 1");
  cfg.record_every = static_cast<long>(r.integer("run.record_every", cfg.record_every));
  if (cfg.record_every < 1) r.fail("run.record_every", "must be >= 1");
  cfg.divergence_radius = r.number("run.divergence_radius", cfg.divergence_radius);
  if (!(cfg.divergence_radius > 0)) r.fail("run.divergence_radius", "must be positive");

  const std::string init_kind = r.string("init.kind", "fixed");
  if (init_kind == "fixed") {
    cfg.init.kind = Initializer::Kind::fixed;
  } else if (init_kind == "uniform_common") {
    cfg.init.kind = Initializer::Kind::uniform_common;
  } else if (init_kind == "uniform_independent") {
    cfg.init.kind = Initializer::Kind::uniform_independent;
  } else {
    r.fail("init.kind", "expected fixed, uniform_common or uniform_independent");
  }
  cfg.init.lo = r.number("init.lo", 0.0);
  cfg.init.hi = r.number("init.hi", 1.0);
  if (cfg.init.kind != Initializer::Kind::fixed && !(cfg.init.lo < cfg.init.hi))
    r.fail("init.hi", "must exceed init.lo");
  if (r.has("init.point")) cfg.init.point = r.vector("init.point");
  if (r.has("init.agents")) cfg.init.agents = r.matrix("init.agents");
  if (cfg.init.kind == Initializer::Kind::fixed && cfg.init.point.empty() && cfg.init.agents.empty())
    r.fail("init.kind", "fixed initialization needs init.point or init.agents");

  const long long runs = r.integer("experiment.runs", 1);
  if (runs < 1) r.fail("experiment.runs", "must be >= 1");
  cfg.runs = static_cast<int>(runs);
  const long long seed = r.integer("experiment.seed", 0);
  if (seed < 0) r.fail("experiment.seed", "must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  const long long jobs = r.integer("experiment.jobs", 1);
  if (jobs < 1) r.fail("experiment.jobs", "must be >= 1");
  cfg.jobs = static_cast<int>(jobs);
  const std::string mode = r.string("experiment.validation", "strict");
  if (mode == "strict") {
    cfg.validation = ValidationMode::strict;
  } else if (mode == "permissive") {
    cfg.validation = ValidationMode::permissive;
  } else {
    r.fail("experiment.validation", "expected \"strict\" or \"permissive\"");
  }
  cfg.ratio_floor = r.number("experiment.ratio_floor", 0.0);

  cfg.radius = r.number("analysis.radius", cfg.radius);
  if (!(cfg.radius > 0)) r.fail("analysis.radius", "must be positive");
  if (r.has("analysis.anchors")) {
    const auto points = r.matrix("analysis.anchors");
    std::vector<std::string> labels;
    if (r.has("analysis.labels")) {
      labels = r.get("analysis.labels", [](const TomlValue& v) {
        std::vector<std::string> out;
        for (const auto& e : v.as_array()) out.push_back(e.as_string());
        return out;
      });
    }
    if (labels.size() != points.size())
      r.fail("analysis.labels", "needs one label per anchor");
    for (std::size_t i = 0; i < points.size(); ++i) {
      Anchor a;
      a.point = Eigen::Map<const Eigen::VectorXd>(points[i].data(),
                                                  static_cast<Eigen::Index>(points[i].size()));
      a.label = r.guard("analysis.labels", [&] { return basin_from_string(labels[i]); });
      cfg.anchors.push_back(std::move(a));
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError(path.string(), 0, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_toml(parse_toml(ss.str(), path.string()), path.string(), path.parent_path());
}

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string vec(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
  return out + "]";
}

void write_schedule(std::ostringstream& out, const std::string& name, const Schedule& s) {
  out << "\n[weights." << name << "]\n";
  out << "law = " << quoted(to_string(s.law())) << "\n";
  out << "c = " << num(s.c()) << "\n";
  switch (s.law()) {
    case Law::power:
      out << "tau = " << num(s.tau()) << "\nk0 = " << s.k0() << "\n";
      break;
    case Law::exponential:
    case Law::exp_sqrt:
      out << "r = " << num(s.r()) << "\n";
      break;
    case Law::annealing:
      out << "k0 = " << s.k0() << "\n";
      break;
    case Law::constant:
      break;
  }
}

std::string init_kind_name(Initializer::Kind k) {
  switch (k) {
    case Initializer::Kind::fixed: return "fixed";
    case Initializer::Kind::uniform_common: return "uniform_common";
    case Initializer::Kind::uniform_independent: return "uniform_independent";
  }
  return "fixed";
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[graph]\nkind = " << quoted(cfg.graph.kind) << "\nn = " << cfg.graph.n << "\n";
  if (cfg.graph.kind == "edges") {
    out << "edges = [";
    for (std::size_t i = 0; i < cfg.graph.edges.size(); ++i)
      out << (i ? ", " : "") << "[" << cfg.graph.edges[i].first << ", "
          << cfg.graph.edges[i].second << "]";
    out << "]\n";
  }
  out << "\n[objective]\nname = " << quoted(cfg.objective) << "\nsplit = " << quoted(cfg.split)
      << "\n";
  out << "\n[gradient]\nsource = " << quoted(cfg.gradient) << "\nscale = " << num(cfg.noise_scale)
      << "\n";
  out << "\n[data]\nx_lo = " << num(cfg.data.x_lo) << "\nx_hi = " << num(cfg.data.x_hi)
      << "\nmix_p = " << num(cfg.data.mix_p) << "\nslope_major = " << num(cfg.data.slope_major)
      << "\nslope_minor = " << num(cfg.data.slope_minor)
      << "\nnoise_std = " << num(cfg.data.noise_std) << "\n";
  write_schedule(out, "alpha", cfg.weights.alpha);
  write_schedule(out, "beta", cfg.weights.beta);
  write_schedule(out, "gamma", cfg.weights.gamma);
  out << "\n[run]\nform = " << quoted(to_string(cfg.form)) << "\nsteps = " << cfg.steps
      << "\nrecord_every = " << cfg.record_every
      << "\ndivergence_radius = " << num(cfg.divergence_radius) << "\n";
  out << "\n[init]\nkind = " << quoted(init_kind_name(cfg.init.kind)) << "\nlo = "
      << num(cfg.init.lo) << "\nhi = " << num(cfg.init.hi) << "\n";
  if (!cfg.init.point.empty()) out << "point = " << vec(cfg.init.point) << "\n";
  if (!cfg.init.agents.empty()) {
    out << "agents = [";
    for (std::size_t i = 0; i < cfg.init.agents.size(); ++i)
      out << (i ? ", " : "") << vec(cfg.init.agents[i]);
    out << "]\n";
  }
  out << "\n[experiment]\nruns = " << cfg.runs << "\nseed = " << cfg.seed
      << "\njobs = " << cfg.jobs << "\nvalidation = "
      << quoted(cfg.validation == ValidationMode::strict ? "strict" : "permissive")
      << "\nratio_floor = " << num(cfg.ratio_floor) << "\n";
  out << "\n[analysis]\nradius = " << num(cfg.radius) << "\n";
  if (!cfg.anchors.empty()) {
    out << "anchors = [";
    for (std::size_t i = 0; i < cfg.anchors.size(); ++i) {
      const auto& p = cfg.anchors[i].point;
      out << (i ? ", " : "") << vec(std::vector<double>(p.data(), p.data() + p.size()));
    }
    out << "]\nlabels = [";
    for (std::size_t i = 0; i < cfg.anchors.size(); ++i)
      out << (i ? ", " : "") << quoted(to_string(cfg.anchors[i].label));
    out << "]\n";
  }
  return out.str();
}

std::uint64_t config_fingerprint(const ExperimentConfig& cfg) {
  // Thread count never changes results, so it stays out of the hash.
  ExperimentConfig canonical = cfg;
  canonical.jobs = 1;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_config(canonical)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

ExperimentConfig apply_overrides(const ExperimentConfig& cfg,
                                 const std::vector<std::string>& overrides) {
  if (overrides.empty()) return cfg;
  TomlDocument doc = parse_toml(serialize_config(cfg), "<canonical>");
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ConfigParseError("--set", 0, "override '" + item + "' is not path=value");
    const std::string path = trim(item.substr(0, eq));
    const std::string text = trim(item.substr(eq + 1));
    if (!known_keys().count(path))
      throw ConfigParseError("--set", 0, "unknown parameter path '" + path + "'");
    TomlValue v;
    try {
      v = parse_toml_value(text, "--set", 0);
    } catch (const ConfigParseError&) {
      v.data = text;  // bare words are strings
    }
    if (path.rfind("graph.", 0) == 0) {
      // a new topology replaces the old one wholesale
      doc.erase("graph.edges");
      if (path == "graph.kind") doc.erase("graph.n");
    }
    doc[path] = v;
  }
  return config_from_toml(doc, "--set");
}

BuiltConfig build_sim_config(const ExperimentConfig& cfg) {
  BuiltConfig out;
  SimConfig& sim = out.sim;
  sim.graph = cfg.graph.build();
  const int n = static_cast<int>(sim.graph.size());

  if (cfg.objective == "robust_regression") {
    sim.objectives = robust_regression(n, cfg.data);
  } else {
    const Objective F = objective_from_spec(cfg.objective);
    sim.objectives = cfg.split == "replicate" ? replicate(F, n) : split_evenly(F, n);
  }
  const Eigen::Index d = sim.objectives.dim();

  if (cfg.gradient == "regression") {
    sim.gradient = RegressionSampling{cfg.data};
  } else if (cfg.gradient == "gaussian") {
    sim.gradient = GradientNoiseModel::gaussian(cfg.noise_scale);
  } else if (cfg.gradient == "uniform") {
    sim.gradient = GradientNoiseModel::bounded_uniform(cfg.noise_scale);
  } else {
    sim.gradient = GradientNoiseModel::none();
  }

  sim.weights = cfg.weights;
  sim.form = cfg.form;
  sim.steps = cfg.steps;
  sim.record_every = cfg.record_every;
  sim.divergence_radius = cfg.divergence_radius;

  if (cfg.init.kind == Initializer::Kind::fixed) {
    Eigen::MatrixXd x0;
    if (!cfg.init.agents.empty()) {
      x0.resize(static_cast<Eigen::Index>(cfg.init.agents.front().size()),
                static_cast<Eigen::Index>(cfg.init.agents.size()));
      for (std::size_t j = 0; j < cfg.init.agents.size(); ++j) {
        if (static_cast<Eigen::Index>(cfg.init.agents[j].size()) != x0.rows())
          throw ConfigError("init.agents rows differ in length");
        for (Eigen::Index i = 0; i < x0.rows(); ++i)
          x0(i, static_cast<Eigen::Index>(j)) = cfg.init.agents[j][static_cast<std::size_t>(i)];
      }
    } else {
      x0 = Eigen::Map<const Eigen::VectorXd>(cfg.init.point.data(),
                                             static_cast<Eigen::Index>(cfg.init.point.size()));
    }
    sim.init = Initializer::at(std::move(x0));
  } else {
    sim.init = Initializer::uniform(cfg.init.lo, cfg.init.hi,
                                    cfg.init.kind == Initializer::Kind::uniform_common);
  }
  sim.fingerprint = config_fingerprint(cfg);

  for (const auto& a : cfg.anchors)
    if (a.point.size() != d)
      throw ConfigError("anchor dimension " + std::to_string(a.point.size()) +
                        " does not match objective dimension " + std::to_string(d));

  // Shape problems throw in every mode; connectivity is reported below.
  check_config(sim);

  if (cfg.weights.gamma.is_zero()) {
    out.report.merge(validate_dsgd(cfg.weights, cfg.validation));
  } else {
    out.report.merge(validate_annealing(cfg.weights, cfg.ratio_floor, AnnealingRatio::distributed,
                                        cfg.validation));
  }
  if (!is_connected(sim.graph)) {
    const std::string msg = "communication graph must be undirected and connected";
    if (cfg.validation == ValidationMode::strict)
      out.report.fail(msg);
    else
      out.report.warn(msg);
  }
  if (cfg.form == UpdateForm::literal) out.report.merge(check_consensus_weight(cfg.weights.beta, sim.graph));
  return out;
}

}  // namespace netgrad
