#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "qfhc/errors.hpp"

namespace qfhc::cli {

namespace {

std::size_t line_of_offset(const std::string& src, std::size_t offset) {
  offset = std::min(offset, src.size());
  return 1 + static_cast<std::size_t>(std::count(src.begin(), src.begin() + static_cast<long>(offset), '\n'));
}

// Line of the first occurrence of "key" in the source; 0 if not found.
std::size_t line_of_key(const std::string& src, const std::string& key) {
  const auto pos = src.find("\"" + key + "\"");
  return pos == std::string::npos ? 0 : line_of_offset(src, pos);
}

class Reader {
 public:
  Reader(const Json& j, std::string path, const std::string& src)
      : j_(j), path_(std::move(path)), src_(src) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const std::string leaf = key.substr(key.rfind('.') == std::string::npos ? 0 : key.rfind('.') + 1);
    const std::size_t line = line_of_key(src_, leaf);
    std::ostringstream os;
    if (line > 0) os << "line " << line << ": ";
    os << key << ": " << msg;
    throw ConfigError(os.str());
  }

  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void get(const std::string& key, T& out) {
    const Json* v = find(key);
    if (!v) return;
    read(*v, full(key), out);
  }

  Reader sub(const std::string& key) {
    const Json* v = find(key);
    static const Json empty = Json::object();
    return Reader(v ? *v : empty, full(key), src_);
  }
  bool has(const std::string& key) const { return j_.contains(key); }
  const Json& raw() const { return j_; }
  const std::string& src() const { return src_; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(full(it.key()), "unknown key");
    }
  }

  void read(const Json& v, const std::string& where, std::string& out) const {
    if (!v.is_string()) fail(where, "expected a string");
    out = v.get<std::string>();
  }
  void read(const Json& v, const std::string& where, bool& out) const {
    if (!v.is_boolean()) fail(where, "expected true or false");
    out = v.get<bool>();
  }
  void read(const Json& v, const std::string& where, double& out) const {
    if (!v.is_number()) fail(where, "expected a number");
    out = v.get<double>();
  }
  void read(const Json& v, const std::string& where, int& out) const {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < INT32_MIN || x > INT32_MAX) fail(where, "integer out of range");
    out = static_cast<int>(x);
  }
  void read(const Json& v, const std::string& where, std::int64_t& out) const {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    out = v.get<std::int64_t>();
  }
  void read(const Json& v, const std::string& where, std::uint64_t& out) const {
    if (!v.is_number_unsigned()) fail(where, "expected a nonnegative integer");
    out = v.get<std::uint64_t>();
  }
  void read(const Json& v, const std::string& where, Scalar& out) const {
    if (v.is_number()) {
      out = v.get<double>();
      return;
    }
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(where, "expected a number or [re, im]");
    }
    out = Scalar(v[0].get<double>(), v[1].get<double>());
  }
  void read(const Json& v, const std::string& where, std::tuple<Index, double, double>& out) const {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number_integer() || !v[1].is_number() ||
        !v[2].is_number()) {
      fail(where, "expected [index, re, im]");
    }
    out = {v[0].get<Index>(), v[1].get<double>(), v[2].get<double>()};
  }
  void read(const Json& v, const std::string& where, VectorSpec& out) const {
    read(v, where, out.entries);
  }
  template <class T>
  void read(const Json& v, const std::string& where, std::vector<T>& out) const {
    if (!v.is_array()) fail(where, "expected an array");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      T x{};
      read(v[i], where + "[" + std::to_string(i) + "]", x);
      out.push_back(x);
    }
  }

 private:
  const Json& j_;
  std::string path_;
  const std::string& src_;
  std::set<std::string> seen_;
};

Json scalar_json(Scalar z) { return Json::array({z.real(), z.imag()}); }

Json vector_json(const VectorSpec& v) {
  Json a = Json::array();
  for (const auto& [i, re, im] : v.entries) a.push_back(Json::array({i, re, im}));
  return a;
}

template <class T>
Json list_json(const std::vector<T>& xs) {
  Json a = Json::array();
  for (const auto& x : xs) {
    if constexpr (std::is_same_v<T, Scalar>) {
      a.push_back(scalar_json(x));
    } else if constexpr (std::is_same_v<T, VectorSpec>) {
      a.push_back(vector_json(x));
    } else {
      a.push_back(x);
    }
  }
  return a;
}

void require_one_of(const std::string& what, const std::string& value,
                    std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw ConfigError(what + ": '" + value + "' is not one of " + list);
}

}  // namespace

CoeffVector VectorSpec::build() const {
  std::vector<CoeffVector::Entry> e;
  for (const auto& [i, re, im] : entries) e.push_back({i, Scalar(re, im)});
  return CoeffVector::from_entries(Domain::Unilateral, std::move(e));
}

WeightSeq WeightConfig::build() const {
  if (family == "constant") return WeightSeq::constant(lambda);
  if (family == "bergman") return WeightSeq::bergman();
  if (family == "log") return WeightSeq::log_weight();
  if (family == "root") return WeightSeq::root_weight(p);
  if (family == "tmu") return WeightSeq::tmu(mu);
  if (family == "table") return WeightSeq::table(values, fallback);
  if (family == "bilateral_table") {
    std::map<Index, Scalar> m;
    for (const auto& [i, re, im] : bilateral) m[i] = Scalar(re, im);
    return WeightSeq::bilateral_table(std::move(m), positive, nonpositive);
  }
  throw ConfigError("weights.family: unknown family '" + family + "'");
}

SpaceSpec SpaceConfig::build() const {
  require_one_of("space.domain", domain, {"unilateral", "bilateral"});
  const Domain d = domain == "bilateral" ? Domain::Bilateral : Domain::Unilateral;
  if (kind == "lp") return SpaceSpec::lp(p, d);
  if (kind == "c0") return SpaceSpec::c0(d);
  if (kind == "entire") {
    if (d != Domain::Unilateral) throw ConfigError("space: entire requires the unilateral domain");
    return SpaceSpec::entire(rmax);
  }
  if (kind == "linf_weakstar") return SpaceSpec::linf_weakstar(d);
  throw ConfigError("space.kind: unknown kind '" + kind + "'");
}

Config parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("line " + std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) +
                      ": malformed JSON (" + e.what() + ")");
  }
  Config c;
  Reader r(j, "", text);
  r.get("scenario", c.scenario);
  r.get("seed", c.seed);
  r.get("workers", c.workers);
  r.get("out", c.out);
  r.get("q", c.q);
  r.get("horizon", c.horizon);
  r.get("tol", c.tol);
  r.get("divergence_threshold", c.divergence_threshold);
  r.get("max_exp", c.max_exp);
  {
    Reader s = r.sub("space");
    s.get("kind", c.space.kind);
    s.get("p", c.space.p);
    s.get("rmax", c.space.rmax);
    s.get("domain", c.space.domain);
    s.finish();
  }
  {
    Reader w = r.sub("weights");
    w.get("family", c.weights.family);
    w.get("lambda", c.weights.lambda);
    w.get("mu", c.weights.mu);
    w.get("p", c.weights.p);
    w.get("values", c.weights.values);
    w.get("fallback", c.weights.fallback);
    w.get("bilateral", c.weights.bilateral);
    w.get("positive", c.weights.positive);
    w.get("nonpositive", c.weights.nonpositive);
    w.finish();
  }
  {
    Reader s = r.sub("criterion");
    s.get("check", c.criterion.check);
    s.get("indices", c.criterion.indices);
    s.get("kmax", c.criterion.kmax);
    s.finish();
  }
  {
    Reader s = r.sub("construct");
    s.get("canonical", c.construct.canonical);
    s.get("vectors", c.construct.vectors);
    s.get("epsilon", c.construct.epsilon);
    s.get("support_cap", c.construct.support_cap);
    s.get("scan_limit", c.construct.scan_limit);
    s.finish();
  }
  {
    Reader s = r.sub("density");
    s.get("times", c.density.times);
    s.get("hits_file", c.density.hits_file);
    s.get("burn_in", c.density.burn_in);
    s.finish();
  }
  {
    Reader s = r.sub("jsets");
    s.get("nseq", c.jsets.nseq);
    s.finish();
  }
  {
    Reader s = r.sub("orbit");
    s.get("source", c.orbit.source);
    s.get("x", c.orbit.x);
    s.get("target", c.orbit.target);
    s.get("target_index", c.orbit.target_index);
    s.get("center", c.orbit.center);
    s.get("radius", c.orbit.radius);
    s.get("coordinate", c.orbit.coordinate);
    s.get("mode", c.orbit.mode);
    s.get("rotation", c.orbit.rotation);
    s.get("power", c.orbit.power);
    s.get("log_events", c.orbit.log_events);
    s.finish();
  }
  {
    Reader s = r.sub("weakstar");
    s.get("functionals", c.weakstar.functionals);
    s.get("eps", c.weakstar.eps);
    s.get("targets", c.weakstar.targets);
    s.finish();
  }
  {
    Reader s = r.sub("sweep");
    s.get("family", c.sweep.family);
    s.get("p", c.sweep.p);
    s.get("lambda", c.sweep.lambda);
    s.get("mu", c.sweep.mu);
    s.get("q", c.sweep.q);
    s.get("check", c.sweep.check);
    s.get("indices", c.sweep.indices);
    s.get("max_points", c.sweep.max_points);
    s.finish();
  }
  r.finish();
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(path + ": cannot read config");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

Json to_json(const Config& c) {
  Json j;
  j["scenario"] = c.scenario;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["out"] = c.out;
  j["q"] = c.q;
  j["horizon"] = c.horizon;
  j["tol"] = c.tol;
  j["divergence_threshold"] = c.divergence_threshold;
  j["max_exp"] = c.max_exp;
  j["space"] = {{"kind", c.space.kind}, {"p", c.space.p}, {"rmax", c.space.rmax}, {"domain", c.space.domain}};
  Json bil = Json::array();
  for (const auto& [i, re, im] : c.weights.bilateral) bil.push_back(Json::array({i, re, im}));
  j["weights"] = {{"family", c.weights.family},
                  {"lambda", scalar_json(c.weights.lambda)},
                  {"mu", scalar_json(c.weights.mu)},
                  {"p", c.weights.p},
                  {"values", list_json(c.weights.values)},
                  {"fallback", scalar_json(c.weights.fallback)},
                  {"bilateral", bil},
                  {"positive", scalar_json(c.weights.positive)},
                  {"nonpositive", scalar_json(c.weights.nonpositive)}};
  j["criterion"] = {{"check", c.criterion.check},
                    {"indices", c.criterion.indices},
                    {"kmax", c.criterion.kmax}};
  j["construct"] = {{"canonical", c.construct.canonical},
                    {"vectors", list_json(c.construct.vectors)},
                    {"epsilon", c.construct.epsilon},
                    {"support_cap", c.construct.support_cap},
                    {"scan_limit", c.construct.scan_limit}};
  j["density"] = {{"times", c.density.times},
                  {"hits_file", c.density.hits_file},
                  {"burn_in", c.density.burn_in}};
  j["jsets"] = {{"nseq", c.jsets.nseq}};
  j["orbit"] = {{"source", c.orbit.source},
                {"x", vector_json(c.orbit.x)},
                {"target", c.orbit.target},
                {"target_index", c.orbit.target_index},
                {"center", vector_json(c.orbit.center)},
                {"radius", c.orbit.radius},
                {"coordinate", c.orbit.coordinate},
                {"mode", c.orbit.mode},
                {"rotation", scalar_json(c.orbit.rotation)},
                {"power", c.orbit.power},
                {"log_events", c.orbit.log_events}};
  j["weakstar"] = {{"functionals", c.weakstar.functionals},
                   {"eps", c.weakstar.eps},
                   {"targets", c.weakstar.targets}};
  j["sweep"] = {{"family", c.sweep.family},
                {"p", c.sweep.p},
                {"lambda", list_json(c.sweep.lambda)},
                {"mu", list_json(c.sweep.mu)},
                {"q", c.sweep.q},
                {"check", c.sweep.check},
                {"indices", c.sweep.indices},
                {"max_points", c.sweep.max_points}};
  return j;
}

void validate(const Config& c) {
  require_one_of("scenario", c.scenario,
                 {"density", "jsets", "criterion", "construct", "orbit", "weakstar", "sweep"});
  if (c.workers < 1) throw ConfigError("workers: must be >= 1");
  if (c.q < 1) throw ConfigError("q: must be >= 1");
  if (c.horizon < 1) throw ConfigError("horizon: must be >= 1");
  if (!(c.tol > 0.0)) throw ConfigError("tol: must be positive");
  if (!(c.divergence_threshold > 0.0)) throw ConfigError("divergence_threshold: must be positive");
  if (c.max_exp < 1 || c.max_exp > 40) throw ConfigError("max_exp: must lie in [1, 40]");
  require_one_of("criterion.check", c.criterion.check,
                 {"qfhc", "unilateral", "bilateral", "weakstar", "hc", "salas", "tmu"});
  require_one_of("orbit.source", c.orbit.source, {"construct", "vector"});
  require_one_of("orbit.target", c.orbit.target, {"ball", "modulus", "modulus_ball"});
  require_one_of("orbit.mode", c.orbit.mode, {"linear", "powers"});
  require_one_of("sweep.check", c.sweep.check, {"qfhc", "unilateral", "weakstar"});
  require_one_of("sweep.family", c.sweep.family, {"root", "constant", "tmu", "bergman", "log"});
  try {
    c.space.build();
    c.weights.build();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid space or weights: ") + e.what());
  }
}

}  // namespace qfhc::cli
