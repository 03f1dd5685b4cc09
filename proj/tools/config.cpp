#include "config.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "drsafe/error.hpp"

namespace drsafe::cli {

using nlohmann::json;

namespace {

// Records the line of every value of an already validated JSON text.
class LineIndex {
 public:
  LineIndex(const std::string& text, std::map<std::string, int>& lines)
      : text_(text), lines_(lines) {}

  void run() {
    skip_ws();
    value("");
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string_token() {
    std::string out;
    ++pos_;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') ++pos_;
      if (pos_ < text_.size()) out += text_[pos_++];
    }
    ++pos_;
    return out;
  }

  static std::string escape_token(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~') out += "~0";
      else if (c == '/') out += "~1";
      else out += c;
    }
    return out;
  }

  void value(const std::string& pointer) {
    lines_.emplace(pointer, line_);
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != '}') {
        const int key_line = line_;
        const std::string child = pointer + "/" + escape_token(string_token());
        skip_ws();
        ++pos_;  // ':'
        skip_ws();
        lines_[child] = key_line;
        value(child);
        lines_[child] = key_line;
        skip_ws();
        if (text_[pos_] == ',') ++pos_, skip_ws();
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      skip_ws();
      for (int i = 0; pos_ < text_.size() && text_[pos_] != ']'; ++i) {
        value(pointer + "/" + std::to_string(i));
        skip_ws();
        if (text_[pos_] == ',') ++pos_, skip_ws();
      }
      ++pos_;
    } else if (c == '"') {
      string_token();
    } else {
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
             text_[pos_] != ',' && text_[pos_] != '}' && text_[pos_] != ']')
        ++pos_;
    }
  }

  const std::string& text_;
  std::map<std::string, int>& lines_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

class Node {
 public:
  Node(const ConfigDocument& doc, const json& value, std::string pointer)
      : doc_(doc), value_(value), pointer_(std::move(pointer)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ConfigError,
                fmt::format("line {}: {}: {}", doc_.line_of(pointer_),
                            pointer_.empty() ? "/" : pointer_, msg));
  }

  const json& raw() const { return value_; }

  Node object(std::initializer_list<std::string_view> allowed) const {
    if (!value_.is_object()) fail("expected an object");
    for (const auto& [key, v] : value_.items()) {
      bool known = false;
      for (auto a : allowed) known = known || a == key;
      if (!known) at_key(key).fail("unknown key '" + key + "'");
    }
    return *this;
  }

  std::optional<Node> get(const std::string& key) const {
    if (!value_.contains(key)) return std::nullopt;
    return at_key(key);
  }

  Node require(const std::string& key) const {
    if (!value_.contains(key)) fail("missing key '" + key + "'");
    return at_key(key);
  }

  Node at(std::size_t i) const {
    return Node(doc_, value_[i], pointer_ + "/" + std::to_string(i));
  }
  std::size_t size() const { return value_.size(); }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    return value_.get<double>();
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be positive");
    return v;
  }
  double nonnegative() const {
    const double v = number();
    if (!(v >= 0.0)) fail("must be non-negative");
    return v;
  }
  long long integer(long long min = std::numeric_limits<long long>::min()) const {
    if (!value_.is_number_integer()) fail("expected an integer");
    const auto v = value_.get<long long>();
    if (v < min) fail(fmt::format("must be at least {}", min));
    if (v > std::numeric_limits<int>::max()) fail("integer too large");
    return v;
  }
  bool boolean() const {
    if (!value_.is_boolean()) fail("expected true or false");
    return value_.get<bool>();
  }
  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }
  Eigen::VectorXd vector(std::optional<int> length = std::nullopt) const {
    if (!value_.is_array()) fail("expected an array of numbers");
    if (length && static_cast<int>(value_.size()) != *length)
      fail(fmt::format("expected {} entries, got {}", *length, value_.size()));
    Eigen::VectorXd out(value_.size());
    for (std::size_t i = 0; i < value_.size(); ++i) out(i) = at(i).number();
    return out;
  }
  std::vector<int> int_list(int min) const {
    if (!value_.is_array() || value_.empty()) fail("expected a non-empty array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < value_.size(); ++i) out.push_back(at(i).integer(min));
    return out;
  }
  Eigen::MatrixXd matrix(std::optional<int> rows, std::optional<int> cols) const {
    if (!value_.is_array() || value_.empty()) fail("expected a non-empty array of rows");
    if (rows && static_cast<int>(value_.size()) != *rows)
      fail(fmt::format("expected {} rows, got {}", *rows, value_.size()));
    const int c = cols ? *cols : static_cast<int>(at(0).raw().size());
    Eigen::MatrixXd out(value_.size(), c);
    for (std::size_t i = 0; i < value_.size(); ++i) out.row(i) = at(i).vector(c).transpose();
    return out;
  }

 private:
  Node at_key(const std::string& key) const {
    std::string token;
    for (char c : key) token += c == '~' ? "~0" : c == '/' ? "~1" : std::string(1, c);
    return Node(doc_, value_.at(key), pointer_ + "/" + token);
  }

  const ConfigDocument& doc_;
  const json& value_;
  std::string pointer_;
};

template <typename T, typename F>
void maybe(const Node& obj, const std::string& key, T& target, F&& read) {
  if (auto n = obj.get(key)) target = read(*n);
}

void read_model(const Node& root, RunConfig& cfg) {
  const Node model = root.require("model").object({"kind", "offset", "m", "k", "constraints", "nominal"});
  const std::string kind = model.require("kind").string();
  if (kind == "unicycle") {
    cfg.model = ModelKind::Unicycle;
    for (const char* key : {"m", "k", "constraints", "nominal"})
      if (auto n = model.get(key)) n->fail("not used by the unicycle model");
    maybe(model, "offset", cfg.scenario.offset, [](const Node& n) { return n.positive(); });
    cfg.ambiguity.k = 3;
  } else if (kind == "explicit") {
    cfg.model = ModelKind::Explicit;
    if (auto n = model.get("offset")) n->fail("only used by the unicycle model");
    const int m = static_cast<int>(model.require("m").integer(1));
    const int k = static_cast<int>(model.require("k").integer(1));
    cfg.ambiguity.k = k;
    const Node cons = model.require("constraints");
    if (!cons.raw().is_array() || cons.size() == 0) cons.fail("expected a non-empty array");
    for (std::size_t l = 0; l < cons.size(); ++l) {
      const Node c = cons.at(l).object({"q", "R", "label"});
      model::ConstraintData data{c.require("q").vector(m + 1), c.require("R").matrix(m + 1, k),
                                 "c" + std::to_string(l)};
      if (auto label = c.get("label")) data.label = label->string();
      cfg.constraints.push_back(std::move(data));
    }
    cfg.nominal = Eigen::VectorXd::Zero(m);
    maybe(model, "nominal", cfg.nominal, [m](const Node& n) { return n.vector(m); });
  } else {
    model.require("kind").fail("expected \"unicycle\" or \"explicit\"");
  }
}

void read_certificates(const Node& root, RunConfig& cfg) {
  const auto block = root.get("certificates");
  if (!block) return;
  const Node certs =
      block->object({"goal", "clf_rate", "gain_v", "gain_omega", "obstacle", "slack"});
  if (cfg.model == ModelKind::Explicit)
    for (const char* key : {"goal", "clf_rate", "gain_v", "gain_omega", "obstacle"})
      if (auto n = certs.get(key)) n->fail("only used by the unicycle model");
  auto& s = cfg.scenario;
  maybe(certs, "goal", s.goal, [](const Node& n) { return Eigen::Vector2d(n.vector(2)); });
  maybe(certs, "clf_rate", s.clf_rate, [](const Node& n) { return n.positive(); });
  maybe(certs, "gain_v", s.gain_v, [](const Node& n) { return n.number(); });
  maybe(certs, "gain_omega", s.gain_omega, [](const Node& n) { return n.number(); });
  if (auto n = certs.get("obstacle")) {
    const Node o = n->object({"center", "radius", "rate"});
    s.obstacle = sim::Obstacle{Eigen::Vector2d(o.require("center").vector(2)),
                               o.require("radius").positive()};
    maybe(o, "rate", s.cbf_rate, [](const Node& r) { return r.positive(); });
  }
  if (auto n = certs.get("slack")) {
    const Node sl = n->object({"S", "B"});
    feasibility::SlackCertificate cert;
    const Eigen::VectorXd values = sl.require("S").vector();
    cert.S.assign(values.data(), values.data() + values.size());
    maybe(sl, "B", cert.B, [](const Node& b) { return b.number(); });
    try {
      cert.validate(static_cast<int>(cert.S.size()));
    } catch (const Error& e) {
      n->fail(e.what());
    }
    cfg.slack = cert;
  }
}

void read_ambiguity(const Node& root, RunConfig& cfg) {
  auto& a = cfg.ambiguity;
  if (cfg.model == ModelKind::Unicycle) {
    a = cfg.scenario.schedule;
    a.r = cfg.scenario.r0;
    a.eps = cfg.scenario.eps;
  }
  if (auto block = root.get("ambiguity")) {
    const Node amb = block->object({"r", "eps", "eps_bar", "c1", "c2", "a", "samples"});
    maybe(amb, "r", a.r, [](const Node& n) { return n.nonnegative(); });
    maybe(amb, "eps", a.eps, [](const Node& n) { return n.positive(); });
    maybe(amb, "eps_bar", a.eps_bar, [](const Node& n) { return n.positive(); });
    maybe(amb, "c1", a.c1, [](const Node& n) { return n.positive(); });
    maybe(amb, "c2", a.c2, [](const Node& n) { return n.positive(); });
    maybe(amb, "a", a.a, [](const Node& n) { return n.positive(); });
    if (auto n = amb.get("samples")) {
      if (n->raw().is_array()) {
        cfg.samples.rows = n->matrix(std::nullopt, a.k);
      } else {
        const Node src = n->object({"file", "draw"});
        if (src.get("file").has_value() == src.get("draw").has_value())
          src.fail("give exactly one of 'file' and 'draw'");
        if (auto f = src.get("file")) cfg.samples.file = f->string();
        if (auto d = src.get("draw")) cfg.samples.draw = static_cast<int>(d->integer(1));
      }
    }
  }
  auto& s = cfg.scenario;
  s.schedule = a;
  s.r0 = a.r;
  s.eps = a.eps;
}

void read_scenario(const Node& root, RunConfig& cfg) {
  const auto block = root.get("scenario");
  if (!block) return;
  const Node sc = block->object({"initial", "dt", "horizon", "n0", "batch", "redraw_period",
                                 "sampler", "run_necessary", "run_sufficient"});
  auto& s = cfg.scenario;
  maybe(sc, "initial", s.initial, [](const Node& n) { return StateVec(n.vector(3)); });
  maybe(sc, "dt", s.dt, [](const Node& n) { return n.positive(); });
  maybe(sc, "horizon", s.horizon, [](const Node& n) { return static_cast<int>(n.integer(0)); });
  maybe(sc, "n0", s.n0, [](const Node& n) { return static_cast<int>(n.integer(1)); });
  maybe(sc, "batch", s.batch, [](const Node& n) { return static_cast<int>(n.integer(1)); });
  maybe(sc, "redraw_period", s.redraw_period,
        [](const Node& n) { return static_cast<int>(n.integer(1)); });
  maybe(sc, "run_necessary", s.run_necessary, [](const Node& n) { return n.boolean(); });
  maybe(sc, "run_sufficient", s.run_sufficient, [](const Node& n) { return n.boolean(); });
  if (auto n = sc.get("sampler")) {
    const Node sp = n->object({"normal_mean", "normal_stddev", "uniform_low", "uniform_high",
                               "beta_alpha", "beta_beta"});
    auto& d = s.sampler;
    maybe(sp, "normal_mean", d.normal_mean, [](const Node& v) { return v.number(); });
    maybe(sp, "normal_stddev", d.normal_stddev, [](const Node& v) { return v.number(); });
    maybe(sp, "uniform_low", d.uniform_low, [](const Node& v) { return v.number(); });
    maybe(sp, "uniform_high", d.uniform_high, [](const Node& v) { return v.number(); });
    maybe(sp, "beta_alpha", d.beta_alpha, [](const Node& v) { return v.number(); });
    maybe(sp, "beta_beta", d.beta_beta, [](const Node& v) { return v.number(); });
    try {
      d.validate();
    } catch (const Error& e) {
      n->fail(e.what());
    }
  }
}

void read_bench(const Node& root, RunConfig& cfg) {
  auto& sw = cfg.sweep;
  sw.Ns = {10, 100, 1000};
  sw.Ms = {1};
  const auto block = root.get("bench");
  if (!block) return;
  const Node b =
      block->object({"name", "Ns", "Ms", "repeats", "min_run_time", "methods", "random"});
  maybe(b, "name", sw.scenario, [](const Node& n) { return n.string(); });
  maybe(b, "Ns", sw.Ns, [](const Node& n) { return n.int_list(1); });
  maybe(b, "Ms", sw.Ms, [](const Node& n) { return n.int_list(1); });
  maybe(b, "repeats", sw.repeats, [](const Node& n) { return static_cast<int>(n.integer(3)); });
  maybe(b, "min_run_time", sw.min_run_time, [](const Node& n) { return n.nonnegative(); });
  if (auto n = b.get("methods")) {
    if (!n->raw().is_array() || n->size() == 0) n->fail("expected a non-empty array of names");
    sw.methods.clear();
    for (std::size_t i = 0; i < n->size(); ++i) {
      try {
        sw.methods.push_back(bench::method_from_string(n->at(i).string()));
      } catch (const Error& e) {
        n->at(i).fail(e.what());
      }
    }
  }
  if (auto n = b.get("random")) {
    const Node r = n->object({"m", "k", "M", "instances"});
    RandomSuite suite;
    maybe(r, "m", suite.m, [](const Node& v) { return static_cast<int>(v.integer(1)); });
    maybe(r, "k", suite.k, [](const Node& v) { return static_cast<int>(v.integer(1)); });
    maybe(r, "M", suite.M, [](const Node& v) { return static_cast<int>(v.integer(1)); });
    maybe(r, "instances", suite.instances,
          [](const Node& v) { return static_cast<int>(v.integer(1)); });
    for (int big_m : sw.Ms)
      if (big_m > suite.M) b.require("Ms").fail("M exceeds the random problem's constraint count");
    cfg.random_suite = suite;
  }
}

void read_lipschitz(const Node& root, RunConfig& cfg) {
  const auto block = root.get("lipschitz");
  if (!block) return;
  const Node l = block->object({"radii", "directions"});
  if (auto n = l.get("radii")) {
    const Eigen::VectorXd r = n->vector();
    if (r.size() == 0) n->fail("expected at least one radius");
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      if (!(r(i) > 0.0)) n->at(i).fail("must be positive");
      if (i > 0 && !(r(i) < r(i - 1))) n->at(i).fail("radii must be strictly decreasing");
    }
    cfg.lipschitz_radii.assign(r.data(), r.data() + r.size());
  }
  maybe(l, "directions", cfg.lipschitz_directions,
        [](const Node& n) { return static_cast<int>(n.integer(1)); });
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  try {
    doc.root_ = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    if (const auto at = what.find("] "); at != std::string::npos) what = what.substr(at + 2);
    throw Error(ErrorCode::ConfigError, what);
  }
  LineIndex(text, doc.lines_).run();
  return doc;
}

int ConfigDocument::line_of(const std::string& pointer) const {
  std::string p = pointer;
  while (true) {
    if (const auto it = lines_.find(p); it != lines_.end()) return it->second;
    if (p.empty()) return 1;
    p.erase(p.rfind('/'));
  }
}

RunConfig read_config(const ConfigDocument& doc, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  const Node root = Node(doc, doc.root(), "").object(
      {"seed", "model", "certificates", "ambiguity", "scenario", "bench", "lipschitz", "output"});
  if (auto n = root.get("seed")) cfg.seed = static_cast<std::uint64_t>(n->integer(0));
  read_model(root, cfg);
  read_certificates(root, cfg);
  read_scenario(root, cfg);
  read_ambiguity(root, cfg);
  read_bench(root, cfg);
  read_lipschitz(root, cfg);
  if (auto n = root.get("output")) {
    const Node out = n->object({"dir"});
    if (auto d = out.get("dir")) cfg.out_dir = d->string();
  }

  if (cfg.slack && cfg.model == ModelKind::Unicycle &&
      static_cast<int>(cfg.slack->S.size()) != cfg.scenario.M())
    root.require("certificates").fail(
        fmt::format("slack needs {} values, one per constraint", cfg.scenario.M()));
  if (cfg.slack && cfg.model == ModelKind::Explicit && cfg.slack->S.size() != cfg.constraints.size())
    root.require("certificates").fail(
        fmt::format("slack needs {} values, one per constraint", cfg.constraints.size()));
  if (cfg.model == ModelKind::Unicycle) {
    cfg.scenario.slack = cfg.slack;
    try {
      cfg.scenario.validate();
    } catch (const Error& e) {
      root.fail(e.what());
    }
  }
  cfg.set_seed(cfg.seed);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return read_config(ConfigDocument::parse(ss.str()), path.parent_path());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConfigError) throw;
    std::string what = e.what();
    what = what.substr(what.find(": ") + 2);
    throw Error(ErrorCode::ConfigError, path.string() + ": " + what);
  }
}

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  scenario.seed = s;
  sweep.seed = s;
}

dro::SampleSet RunConfig::load_samples() const {
  if (samples.rows) return dro::SampleSet(*samples.rows);
  if (samples.file) {
    const auto path = samples.file->is_absolute() ? *samples.file : base_dir / *samples.file;
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open samples " + path.string());
    auto set = dro::read_samples_csv(in);
    if (set.dim() != k())
      throw Error(ErrorCode::DimensionMismatch,
                  fmt::format("samples in {} have {} columns, expected {}", path.string(),
                              set.dim(), k()));
    return set;
  }
  const int count = samples.draw ? *samples.draw
                                 : (model == ModelKind::Unicycle ? scenario.n0 : 1);
  return sample_draw()(count, seed);
}

bench::SampleDraw RunConfig::sample_draw() const {
  if (model == ModelKind::Unicycle) {
    const auto spec = scenario.sampler;
    return [spec](int count, std::uint64_t s) { return sim::sample_uncertainty(spec, count, s); };
  }
  return bench::gaussian_samples(k());
}

dro::SynthesisProblem RunConfig::problem(std::shared_ptr<const dro::SampleSet> set) const {
  if (model == ModelKind::Unicycle)
    return sim::scenario_problem(scenario, std::move(set), ambiguity.r, ambiguity.eps);
  dro::SynthesisProblem p = dro::SynthesisProblem::constant(
      constraints, model::ExtControl::from_input(nominal), ambiguity, dro::SampleSet(set->rows()));
  return p;
}

dro::SynthesisProblem RunConfig::problem() const {
  return problem(std::make_shared<const dro::SampleSet>(load_samples()));
}

}  // namespace drsafe::cli
