#include "qfhc/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "qfhc/errors.hpp"

namespace qfhc {

namespace {

Json complex_json(Scalar z) { return Json::array({z.real(), z.imag()}); }

// JSON has no infinities; they are spelled as strings.
Json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json to_json(const CoeffVector& v) {
  Json entries = Json::array();
  for (const auto& e : v.entries()) entries.push_back(Json::array({e.index, e.value.real(), e.value.imag()}));
  return {{"domain", to_string(v.domain())}, {"entries", entries}};
}

Json to_json(const SpaceSpec& s) {
  Json j;
  switch (s.kind) {
    case SpaceSpec::Kind::Lp: j["kind"] = "lp"; j["p"] = s.p; break;
    case SpaceSpec::Kind::C0: j["kind"] = "c0"; break;
    case SpaceSpec::Kind::Entire: j["kind"] = "entire"; j["rmax"] = s.rmax; break;
    case SpaceSpec::Kind::LInfWeakStar: j["kind"] = "linf_weakstar"; break;
  }
  j["domain"] = to_string(s.domain);
  return j;
}

Json to_json(const WeightSeq& w) {
  Json j{{"family", w.name()}, {"description", w.describe()}};
  switch (w.family()) {
    case WeightSeq::Family::Constant: j["lambda"] = complex_json(w.lambda()); break;
    case WeightSeq::Family::TMu: j["mu"] = complex_json(w.mu()); break;
    case WeightSeq::Family::RootWeight: j["p"] = w.root_p(); break;
    case WeightSeq::Family::Table: {
      Json vals = Json::array();
      for (Scalar v : w.table_values()) vals.push_back(complex_json(v));
      j["values"] = vals;
      j["fallback"] = complex_json(w.fallback());
      break;
    }
    case WeightSeq::Family::BilateralTable: {
      Json vals = Json::array();
      for (const auto& [i, v] : w.bilateral_values()) {
        vals.push_back(Json::array({i, v.real(), v.imag()}));
      }
      j["values"] = vals;
      j["positive"] = complex_json(w.positive_fallback());
      j["nonpositive"] = complex_json(w.nonpositive_fallback());
      break;
    }
    default: break;
  }
  return j;
}

Json to_json(const SeriesProbe& p) {
  Json cps = Json::array();
  for (const auto& c : p.checkpoints) {
    cps.push_back({{"m", c.m}, {"partial", num(c.partial)}, {"block", num(c.block)}});
  }
  Json subsets = Json::array();
  for (const auto& s : p.random_subset_sums) {
    subsets.push_back({{"subset", s.descriptor}, {"norm", num(s.norm)}});
  }
  Json j{{"path", p.path}, {"checkpoints", cps}};
  j["tail_estimate"] = p.tail_estimate ? num(*p.tail_estimate) : Json(nullptr);
  j["random_subset_sums"] = subsets;
  return j;
}

Json to_json(const Verdict& v) {
  Json j{{"kind", to_string(v.kind)}, {"rule", v.rule}, {"evidence", v.evidence}};
  if (v.kind == VerdictKind::Converges) j["tail_bound"] = num(v.tail_bound);
  j["sum_estimate"] = num(v.sum_estimate);
  j["probe"] = to_json(v.probe);
  return j;
}

Json to_json(const CriterionReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) entries.push_back({{"label", e.label}, {"verdict", to_json(e.verdict)}});
  return {{"description", r.description},
          {"q", r.q},
          {"overall", to_string(r.overall)},
          {"notes", r.notes},
          {"entries", entries}};
}

Json to_json(const SalasReport& r) {
  Json cps = Json::array();
  for (const auto& [n, v] : r.checkpoints) cps.push_back(Json::array({n, num(v)}));
  return {{"limsup_infinite", r.limsup_infinite},
          {"max_log_product", num(r.max_log_product)},
          {"argmax", r.argmax},
          {"rule", r.rule},
          {"checkpoints", cps}};
}

Json to_json(const DensityEstimate& d, bool with_profile) {
  Json j{{"q", d.q}, {"value", num(d.value)}, {"diverging", d.diverging}, {"burn_in", d.burn_in}};
  if (with_profile) {
    Json prof = Json::array();
    for (const auto& s : d.profile) prof.push_back(Json::array({s.n, s.count, num(s.ratio)}));
    j["profile"] = prof;
  }
  return j;
}

Json to_json(const GrowthBound& g) {
  Json prof = Json::array();
  for (const auto& [k, v] : g.profile) prof.push_back(Json::array({k, num(v)}));
  return {{"bounded", g.bounded}, {"constant", num(g.constant)}, {"profile", prof}};
}

Json to_json(const JSetFamily& f, bool with_classes) {
  Json sizes = Json::array();
  for (const auto& c : f.classes) sizes.push_back(c.size());
  Json j{{"nseq", f.nseq}, {"horizon", f.horizon}, {"class_sizes", sizes}, {"warnings", f.warnings}};
  if (with_classes) j["classes"] = f.classes;
  return j;
}

Json to_json(const JSetReport& r) {
  Json td = Json::array(), ld = Json::array();
  for (double x : r.terminal_density) td.push_back(num(x));
  for (double x : r.lower_density) ld.push_back(num(x));
  return {{"passed", r.passed()},
          {"disjoint", r.disjoint},
          {"gaps_ok", r.gaps_ok},
          {"minimum_ok", r.minimum_ok},
          {"violations", r.violations},
          {"terminal_density", td},
          {"lower_density", ld}};
}

Json to_json(const NkSelection& s) {
  Json certs = Json::array();
  for (const auto& c : s.certificates) {
    certs.push_back({{"k", c.k},
                     {"target", c.target},
                     {"n", c.n},
                     {"bound", num(c.bound)},
                     {"majorant", c.majorant},
                     {"certified", c.certified}});
  }
  return {{"nseq", s.nseq},
          {"raw", s.raw},
          {"certificates", certs},
          {"criterion_overall", to_string(s.criterion.overall)},
          {"warnings", s.warnings}};
}

Json to_json(const ConstructionPlan& p) {
  Json targets = Json::array();
  for (const auto& t : p.targets.vectors()) targets.push_back(to_json(t));
  Json eps = Json::array(), alpha = Json::array(), norms = Json::array();
  for (int k = 1; k <= p.k_classes; ++k) {
    eps.push_back(p.schedule.eps(k));
    alpha.push_back(p.schedule.alpha(k));
  }
  for (double n : p.block_norms) norms.push_back(num(n));
  Json cand = Json::array();
  for (const auto& e : p.log_candidate) {
    cand.push_back(Json::array({e.index, e.value.logmag, e.value.phase}));
  }
  return {{"q", p.q},
          {"space", to_json(p.space)},
          {"weights", to_json(p.weights)},
          {"K", p.k_classes},
          {"horizon", p.horizon},
          {"epsilon", eps},
          {"alpha", alpha},
          {"targets", targets},
          {"selection", to_json(p.selection)},
          {"jsets", to_json(p.jsets, true)},
          {"block_norms", norms},
          {"norm_bound_ok", p.norm_bound_ok},
          {"candidate_support", p.log_candidate.size()},
          {"candidate_logpolar", cand},
          {"warnings", p.warnings}};
}

Json to_json(const OrbitBoundReport& r, bool with_checks) {
  Json j{{"passed", r.passed()},
         {"interior", r.interior},
         {"edge", r.edge},
         {"violations", r.violations}};
  double worst = 0.0;
  for (const auto& c : r.checks) {
    if (!c.edge) worst = std::max(worst, c.distance / c.bound);
  }
  j["worst_interior_ratio"] = num(worst);
  if (with_checks) {
    Json checks = Json::array();
    for (const auto& c : r.checks) {
      checks.push_back({{"k", c.k}, {"m", c.m}, {"exponent", c.exponent},
                        {"distance", num(c.distance)}, {"bound", num(c.bound)},
                        {"edge", c.edge}, {"ok", c.ok}});
    }
    j["checks"] = checks;
  }
  return j;
}

Json to_json(const HitResult& h) {
  return {{"hits", h.hits.size()},
          {"horizon", h.hits.horizon()},
          {"density", to_json(h.density)},
          {"growth", to_json(h.growth)}};
}

std::string checkpoints_csv(const SeriesProbe& p) {
  std::string out = "m,partial,block\n";
  for (const auto& c : p.checkpoints) {
    out += std::to_string(c.m) + "," + format_double(c.partial) + "," + format_double(c.block) + "\n";
  }
  return out;
}

std::string hit_set_csv(const HitSet& h) {
  std::string out = "n\n";
  for (Index t : h.times()) out += std::to_string(t) + "\n";
  return out;
}

std::string orbit_bound_csv(const OrbitBoundReport& r) {
  std::string out = "k,m,exponent,distance,bound,edge,ok\n";
  for (const auto& c : r.checks) {
    out += std::to_string(c.k) + "," + std::to_string(c.m) + "," + std::to_string(c.exponent) +
           "," + format_double(c.distance) + "," + format_double(c.bound) + "," +
           (c.edge ? "1" : "0") + "," + (c.ok ? "1" : "0") + "\n";
  }
  return out;
}

std::string orbit_jsonl(const std::vector<OrbitEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    Json j{{"n", e.n}, {"exponent", e.exponent}, {"distance", num(e.distance)}, {"hit", e.hit}};
    out += j.dump() + "\n";
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << content;
    if (!os.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

}  // namespace qfhc
