#include <chrono>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "cli.hpp"
#include "qfhc/errors.hpp"

namespace qfhc::cli {

namespace {

namespace fs = std::filesystem;

struct Run {
  const Config& cfg;
  std::ostream& log;
  Json results = Json::object();
  Json manifest = Json::array();

  void emit(const std::string& name, const std::string& content) {
    const fs::path p = fs::path(cfg.out) / name;
    write_atomic(p, content);
    manifest.push_back(name);
  }
};

ProbeOptions probe_options(const Config& c) {
  ProbeOptions o;
  o.tol = c.tol;
  o.divergence_threshold = c.divergence_threshold;
  o.max_exp = c.max_exp;
  o.seed = c.seed;
  return o;
}

std::string verdicts_csv(const CriterionReport& r) {
  std::string out = "label,kind,rule,sum_estimate,tail_bound\n";
  for (const auto& e : r.entries) {
    out += e.label + "," + to_string(e.verdict.kind) + "," + e.verdict.rule + "," +
           format_double(e.verdict.sum_estimate) + "," + format_double(e.verdict.tail_bound) + "\n";
  }
  return out;
}

CriterionReport run_check(const std::string& check, const SpaceSpec& space, const WeightSeq& w,
                          int q, const std::vector<Index>& indices, Index horizon, Index kmax,
                          const ProbeOptions& opts) {
  if (check == "qfhc") return qfhc_check(space, w, q, indices, opts);
  if (check == "unilateral") return unilateral_condition(w, space, q, indices, opts);
  if (check == "bilateral") return bilateral_condition(w, space, q, indices, opts);
  if (check == "weakstar") return weakstar_condition(w, q, indices, opts);
  if (check == "hc") return hc_check(space, w, indices, horizon, opts);
  if (check == "tmu") return tmu_fhc_check(w.mu(), kmax, space, opts);
  throw ConfigError("criterion.check: unsupported '" + check + "'");
}

int run_density(Run& r) {
  const Config& c = r.cfg;
  std::vector<Index> times = c.density.times;
  if (!c.density.hits_file.empty()) {
    std::ifstream is(c.density.hits_file);
    if (!is) throw ConfigError("density.hits_file: cannot read " + c.density.hits_file);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty() || line == "n") continue;
      try {
        times.push_back(std::stoll(line));
      } catch (const std::exception&) {
        throw ConfigError(c.density.hits_file + " line " + std::to_string(lineno) +
                          ": not an integer");
      }
    }
  }
  const HitSet hits(times, c.horizon);
  const DensityEstimate est = c.density.burn_in > 0 ? q_lower_density(hits, c.q, c.density.burn_in)
                                                    : q_lower_density(hits, c.q);
  r.results["density"] = to_json(est);
  if (!hits.empty()) {
    const DensityEstimate ranks = q_density_via_ranks(hits, c.q, est.burn_in);
    r.results["rank_density"] = to_json(ranks);
    r.results["growth"] = to_json(check_growth_bound(hits, c.q));
  }
  r.emit("density_profile.csv", density_profile_csv(est));
  r.log << "q-lower density (q=" << c.q << "): " << format_double(est.value)
        << (est.diverging ? " (diverging)" : "") << "\n";
  return 0;
}

int run_jsets(Run& r) {
  const Config& c = r.cfg;
  const auto fam = generate_jsets(c.jsets.nseq, static_cast<int>(c.jsets.nseq.size()), c.horizon);
  const auto rep = verify_jsets(fam);
  r.results["jsets"] = to_json(fam);
  r.results["verification"] = to_json(rep);
  std::string csv = "k,n\n";
  for (std::size_t k = 0; k < fam.classes.size(); ++k) {
    for (Index n : fam.classes[k]) csv += std::to_string(k + 1) + "," + std::to_string(n) + "\n";
  }
  r.emit("jsets.csv", csv);
  r.log << "J-sets: " << (rep.passed() ? "all properties hold" : "violations found") << "\n";
  return rep.passed() ? 0 : 2;
}

int run_criterion(Run& r) {
  const Config& c = r.cfg;
  const SpaceSpec space = c.space.build();
  const WeightSeq w = c.weights.build();
  if (c.criterion.check == "salas") {
    const auto rep = salas_check(w, c.horizon, c.divergence_threshold);
    r.results["salas"] = to_json(rep);
    r.log << "salas: " << (rep.limsup_infinite ? "limsup infinite" : "bounded") << " (" << rep.rule
          << ")\n";
    return 0;
  }
  const auto rep = run_check(c.criterion.check, space, w, c.q, c.criterion.indices, c.horizon,
                             c.criterion.kmax, probe_options(c));
  r.results["report"] = to_json(rep);
  r.emit("verdicts.csv", verdicts_csv(rep));
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    r.emit("checkpoints_" + std::to_string(i) + ".csv", checkpoints_csv(rep.entries[i].verdict.probe));
  }
  r.log << rep.description << ": " << to_string(rep.overall) << "\n";
  return 0;
}

ConstructionInputs construction_inputs(const Config& c, const SpaceSpec& space) {
  ConstructionInputs in;
  in.space = space;
  in.weights = c.weights.build();
  in.q = c.q;
  if (c.construct.vectors.empty()) {
    in.targets = TargetSet::canonical(c.construct.canonical);
  } else {
    std::vector<CoeffVector> v;
    for (const auto& s : c.construct.vectors) v.push_back(s.build());
    in.targets = TargetSet::user(std::move(v));
  }
  if (!c.construct.epsilon.empty()) in.schedule = EpsilonSchedule::table(c.construct.epsilon);
  in.horizon = c.horizon;
  in.support_cap = c.construct.support_cap;
  in.select.probe = probe_options(c);
  in.select.scan_limit = c.construct.scan_limit;
  return in;
}

// Builds the plan or records the refusal; nullopt means refused.
std::optional<ConstructionPlan> build_or_refuse(Run& r, const SpaceSpec& space) {
  try {
    return build_vector(construction_inputs(r.cfg, space));
  } catch (const ConstructionRefused& e) {
    r.results["refused"] = to_json(e.report());
    r.log << e.what() << "\n";
    return std::nullopt;
  }
}

int run_construct(Run& r) {
  const auto plan = build_or_refuse(r, r.cfg.space.build());
  if (!plan) return 2;
  const auto eq = verify_orbit_bound(*plan);
  r.results["plan"] = to_json(*plan);
  r.results["orbit_bound"] = to_json(eq);
  r.emit("orbit_bound.csv", orbit_bound_csv(eq));
  r.log << "N_k:";
  for (Index n : plan->selection.nseq) r.log << ' ' << n;
  r.log << "\ncandidate support " << plan->log_candidate.size() << ", orbit bound "
        << (eq.passed() ? "holds" : "violated") << " on " << eq.interior << " interior times ("
        << eq.edge << " edge)\n";
  return eq.passed() && plan->norm_bound_ok ? 0 : 2;
}

int run_orbit(Run& r) {
  const Config& c = r.cfg;
  const SpaceSpec space = c.space.build();
  const WeightSeq w = c.weights.build();
  LogVector x;
  CoeffVector center = c.orbit.center.build();
  if (c.orbit.source == "construct") {
    const auto plan = build_or_refuse(r, space);
    if (!plan) return 2;
    x = plan->log_candidate;
    if (c.orbit.center.entries.empty()) {
      const int k = c.orbit.target_index;
      if (k < 1 || k > plan->k_classes) throw ConfigError("orbit.target_index: out of range");
      center = plan->targets[static_cast<std::size_t>(k - 1)];
    }
  } else {
    x = to_log_vector(c.orbit.x.build());
  }
  HitTarget target;
  if (c.orbit.target == "ball") {
    target = HitTarget::ball(center, c.orbit.radius);
  } else if (c.orbit.target == "modulus") {
    target = HitTarget::modulus(c.orbit.coordinate, c.orbit.radius);
  } else {
    target = HitTarget::modulus_ball(center, c.orbit.radius);
  }
  OperatorSpec op = OperatorSpec::backward(w).rotated(c.orbit.rotation).powered(c.orbit.power);
  HitOptions ho;
  ho.mode = c.orbit.mode == "powers" ? HitOptions::Mode::Powers : HitOptions::Mode::Linear;
  ho.q = c.q;
  ho.horizon = c.horizon;
  ho.workers = c.workers;
  ho.log_events = c.orbit.log_events;
  const auto res = hit_experiment(space, op, x, target, ho);
  r.results["target"] = target.describe();
  r.results["hits"] = to_json(res);
  r.emit("hits.csv", hit_set_csv(res.hits));
  if (ho.log_events) r.emit("orbit.jsonl", orbit_jsonl(res.events));
  r.log << "hits: " << res.hits.size() << " up to " << c.horizon << ", " << c.q
        << "-lower density " << format_double(res.density.value) << "\n";
  return 0;
}

int run_weakstar(Run& r) {
  const Config& c = r.cfg;
  const SpaceSpec space = SpaceSpec::c0();
  const auto plan = build_or_refuse(r, space);
  if (!plan) return 2;
  const int nt = std::min(c.weakstar.targets, plan->k_classes);
  if (nt < 1) throw ConfigError("weakstar.targets: must be >= 1");
  std::vector<CoeffVector> targets(plan->targets.vectors().begin(),
                                   plan->targets.vectors().begin() + nt);
  HitOptions ho;
  ho.q = c.q;
  ho.horizon = c.horizon;
  ho.workers = c.workers;
  const auto fun = coordinate_functionals(c.weakstar.functionals);
  const auto weak = transfer_weakstar(plan->weights, plan->log_candidate, fun, targets,
                                      c.weakstar.eps, ho);
  const OperatorSpec op = OperatorSpec::backward(plan->weights);
  bool inclusion = true;
  Json per = Json::array();
  std::string csv = "target,n,c0_hit,weakstar_hit\n";
  for (int i = 0; i < nt; ++i) {
    const auto norm = hit_experiment(space, op, plan->log_candidate,
                                     HitTarget::ball(targets[static_cast<std::size_t>(i)], c.weakstar.eps), ho);
    const auto& wk = weak[static_cast<std::size_t>(i)].hits;
    bool inc = true;
    for (Index t : norm.hits.times()) inc = inc && wk.contains(t);
    inclusion = inclusion && inc;
    per.push_back({{"target", i + 1},
                   {"c0", to_json(norm)},
                   {"weakstar", to_json(weak[static_cast<std::size_t>(i)])},
                   {"c0_subset_of_weakstar", inc}});
    for (Index n = 1; n <= c.horizon; ++n) {
      const bool a = norm.hits.contains(n), b = wk.contains(n);
      if (a || b) {
        csv += std::to_string(i + 1) + "," + std::to_string(n) + "," + (a ? "1" : "0") + "," +
               (b ? "1" : "0") + "\n";
      }
    }
  }
  r.results["targets"] = per;
  r.emit("weakstar_hits.csv", csv);
  r.log << "weak* transfer: c0 hits " << (inclusion ? "contained in" : "NOT contained in")
        << " weak* hits\n";
  return inclusion ? 0 : 2;
}

struct GridPoint {
  std::string row;
  WeightSeq w;
  int q;
};

int run_sweep(Run& r) {
  const Config& c = r.cfg;
  const auto& s = c.sweep;
  std::vector<std::pair<std::string, WeightSeq>> rows;
  auto label = [](const char* name, Scalar z) {
    std::ostringstream os;
    os << name << "=" << format_double(z.real());
    if (z.imag() != 0.0) os << (z.imag() > 0 ? "+" : "") << format_double(z.imag()) << "i";
    return os.str();
  };
  if (s.family == "root") {
    for (int p : s.p) rows.emplace_back("root p=" + std::to_string(p), WeightSeq::root_weight(p));
  } else if (s.family == "constant") {
    for (Scalar l : s.lambda) rows.emplace_back("constant " + label("lambda", l), WeightSeq::constant(l));
  } else if (s.family == "tmu") {
    for (Scalar m : s.mu) rows.emplace_back("tmu " + label("mu", m), WeightSeq::tmu(m));
  } else if (s.family == "bergman") {
    rows.emplace_back("bergman", WeightSeq::bergman());
  } else {
    rows.emplace_back("log", WeightSeq::log_weight());
  }
  const std::uint64_t size = rows.size() * s.q.size();
  if (size == 0) throw ConfigError("sweep: empty grid");
  if (size > s.max_points) {
    r.results["refused"] = "grid of " + std::to_string(size) + " points exceeds max_points " +
                           std::to_string(s.max_points);
    r.log << "sweep refused: grid of " << size << " points exceeds " << s.max_points << "\n";
    return 2;
  }
  for (int q : s.q) {
    if (q < 1) throw ConfigError("sweep.q: entries must be >= 1");
  }
  std::vector<GridPoint> grid;
  for (const auto& [row, w] : rows) {
    for (int q : s.q) grid.push_back({row, w, q});
  }
  const SpaceSpec space = c.space.build();
  const ProbeOptions opts = probe_options(c);
  std::vector<std::optional<CriterionReport>> out(grid.size());
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next == grid.size()) return;
        i = next++;
      }
      out[i] = run_check(s.check, space, grid[i].w, grid[i].q, s.indices, c.horizon, 0, opts);
    }
  };
  std::vector<std::thread> pool;
  const int nw = std::min<int>(c.workers, static_cast<int>(grid.size()));
  for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::string csv = "weights";
  for (int q : s.q) csv += ",q=" + std::to_string(q);
  csv += "\n";
  Json cells = Json::array();
  for (std::size_t row = 0; row < rows.size(); ++row) {
    csv += rows[row].first;
    for (std::size_t col = 0; col < s.q.size(); ++col) {
      const auto& rep = *out[row * s.q.size() + col];
      csv += "," + to_string(rep.overall);
      Json kinds = Json::array();
      for (const auto& e : rep.entries) kinds.push_back({{"label", e.label}, {"kind", to_string(e.verdict.kind)}, {"rule", e.verdict.rule}});
      cells.push_back({{"weights", rows[row].first}, {"q", s.q[col]}, {"overall", to_string(rep.overall)}, {"entries", kinds}});
    }
    csv += "\n";
  }
  r.results["cells"] = cells;
  r.emit("verdict_matrix.csv", csv);
  r.log << csv;
  return 0;
}

}  // namespace

int run(const Config& c, std::ostream& log) {
  validate(c);
  Run r{c, log};
  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (c.scenario == "density") code = run_density(r);
    else if (c.scenario == "jsets") code = run_jsets(r);
    else if (c.scenario == "criterion") code = run_criterion(r);
    else if (c.scenario == "construct") code = run_construct(r);
    else if (c.scenario == "orbit") code = run_orbit(r);
    else if (c.scenario == "weakstar") code = run_weakstar(r);
    else code = run_sweep(r);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  } catch (const DomainMismatch& e) {
    throw ConfigError(e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string echoed = to_json(c).dump(2) + "\n";
  write_atomic(fs::path(c.out) / "config.json", echoed);
  r.manifest.push_back("config.json");
  Json report{{"config", to_json(c)},
              {"exit_code", code},
              {"results", r.results},
              {"artifacts", r.manifest},
              {"timings", {{"wall_seconds", secs}}}};
  write_atomic(fs::path(c.out) / "run_report.json", report.dump(2) + "\n");
  return code;
}

}  // namespace qfhc::cli
