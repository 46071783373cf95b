// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "qfhc/constructor.hpp"
#include "qfhc/criterion.hpp"
#include "qfhc/density.hpp"
#include "qfhc/report_io.hpp"
#include "qfhc/shiftops.hpp"

using namespace qfhc;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

HitSet squares(Index kmax, Index horizon) {
  std::vector<Index> t;
  for (Index k = 1; k <= kmax && k * k <= horizon; ++k) t.push_back(k * k);
  return HitSet(t, horizon);
}

void c1_density(Outcome& o) {
  const auto sq = q_lower_density(squares(100, 10000), 2);
  o.require(sq.value == 1.0, "{k^2 : k <= 100} at q=2 gives exactly 1");
  const auto lin = q_lower_density(squares(1000, 3000), 1, 100);
  o.require(lin.value <= 0.02, "{k^2 <= 3000} at q=1 below 0.02");
  std::mt19937_64 rng(kDefaultSeed);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index horizon = std::uniform_int_distribution<Index>(1000, 20000)(rng);
    const int q = std::uniform_int_distribution<int>(1, 3)(rng);
    const double p = std::uniform_real_distribution<double>(0.02, 0.6)(rng);
    std::bernoulli_distribution keep(p);
    std::vector<Index> times;
    for (Index n = 1; n <= horizon; ++n) {
      if (keep(rng)) times.push_back(n);
    }
    if (times.empty()) times.push_back(horizon);
    const HitSet a(times, horizon);
    const auto count = q_lower_density(a, q);
    const auto ranks = q_density_via_ranks(a, q, count.burn_in);
    // for q >= 2 values exceed 1 and the sandwich bound is max(1, value)/burnIn
    const double gap = std::abs(count.value - ranks.value) * static_cast<double>(count.burn_in) /
                       std::max(1.0, count.value);
    worst = std::max(worst, gap);
    o.require(gap <= 1.0, "rank/count agreement on random set " + std::to_string(t));
  }
  o.detail << "d_2({k^2})=" << sq.value << ", d_1({k^2<=3000})=" << lin.value
           << ", max |count-rank|*burnIn/max(1,d)=" << worst;
}

void c2_growth(Outcome& o) {
  std::vector<Index> t;
  for (Index k = 1; k <= 1000; ++k) t.push_back(5 * k * k);
  const auto g = check_growth_bound(HitSet(t, t.back()), 2);
  o.require(g.bounded && std::abs(g.constant - 5.0) <= 1e-12, "5k^2 bounded with C = 5");
  std::vector<Index> p;
  for (int k = 1; k <= 62; ++k) p.push_back(Index{1} << k);
  const HitSet pow2(p, p.back());
  for (int q = 1; q <= 5; ++q) {
    o.require(!check_growth_bound(pow2, q).bounded, "2^k unbounded at q=" + std::to_string(q));
  }
  o.detail << "5k^2: bounded C=" << format_double(g.constant) << "; 2^k unbounded for q=1..5";
}

void c3_jsets(Outcome& o) {
  const std::vector<Index> nseq = {10, 20, 30, 40, 50, 60, 70, 80};
  const Index horizon = 100000;
  const auto fam = generate_jsets(nseq, 8, horizon);
  const auto rep = verify_jsets(fam);
  o.require(rep.disjoint && rep.gaps_ok && rep.minimum_ok, "all three properties");
  double least = 1.0;
  for (double d : rep.lower_density) least = std::min(least, d);
  o.require(least > 0.0, "every class has positive density");
  const auto one = generate_jsets({7}, 1, horizon);
  const double d1 = static_cast<double>(one.classes[0].size()) / static_cast<double>(horizon);
  o.require(std::abs(d1 - 1.0 / 14.0) <= 1.0 / static_cast<double>(horizon), "K=1 density 1/(2N_1)");
  o.detail << "verify passed=" << rep.passed() << ", min class density " << format_double(least)
           << ", K=1 density " << format_double(d1) << " vs 1/14";
}

double bergman_oracle(Index j) {
  // sum_{n>=1} 1/(n^2+c), c = j+1: explicit part plus midpoint integral tail.
  const long double c = static_cast<long double>(j + 1);
  const Index m = 100000;
  long double s = 0.0L;
  for (Index n = m; n >= 1; --n) s += 1.0L / (static_cast<long double>(n) * n + c);
  const long double rc = std::sqrt(c);
  const long double tail =
      (std::numbers::pi_v<long double> / 2 - std::atan((m + 0.5L) / rc)) / rc;
  return static_cast<double>(s + tail);
}

void c4_calibration(Outcome& o) {
  ProbeOptions opts;
  const auto geo = classify_nonnegative_series([](Index n) { return std::pow(0.25, n); }, opts);
  o.require(geo.kind == VerdictKind::Converges && std::abs(geo.sum_estimate - 1.0 / 3.0) <= 1e-8,
            "sum 4^-n = 1/3");
  const auto rol = series_probe(
      SpaceSpec::lp(2), [](Index n) { return CoeffVector::basis(n, Domain::Unilateral, std::pow(0.5, n)); },
      opts);
  o.require(rol.kind == VerdictKind::Converges && std::abs(rol.sum_estimate - 1.0 / 3.0) <= 1e-8,
            "l^2 probe of 2^-n e_n");
  ProbeOptions wide = opts;
  wide.max_exp = 24;
  const auto harm = series_probe(
      SpaceSpec::lp(2),
      [](Index n) { return CoeffVector::basis(n, Domain::Unilateral, 1.0 / std::sqrt(n + 1.0)); },
      wide);
  o.require(harm.kind == VerdictKind::Diverges, "harmonic diverges by maxExp 24");

  const std::vector<Index> js = {0, 1, 2, 3, 4};
  const auto b2 = unilateral_condition(WeightSeq::bergman(), SpaceSpec::lp(2), 2, js, opts);
  double worst = 0.0;
  for (std::size_t i = 0; i < js.size(); ++i) {
    const auto& v = b2.entries[i].verdict;
    const double err = std::abs(v.sum_estimate - bergman_oracle(js[i]));
    worst = std::max(worst, err);
    o.require(v.kind == VerdictKind::Converges && err <= 1e-6, "Bergman q=2 sum at j=" + std::to_string(js[i]));
  }
  const double closed = (std::numbers::pi / std::tanh(std::numbers::pi) - 1.0) / 2.0;
  o.require(std::abs(b2.entries[0].verdict.sum_estimate - closed) <= 1e-6, "j=0 closed form");
  const auto b1 = unilateral_condition(WeightSeq::bergman(), SpaceSpec::lp(2), 1, js, opts);
  for (const auto& e : b1.entries) o.require(e.verdict.kind == VerdictKind::Diverges, "Bergman q=1 " + e.label);
  const auto q2 = qfhc_check(SpaceSpec::lp(2), WeightSeq::bergman(), 2, {1, 2, 3, 4, 5}, opts);
  const auto q1 = qfhc_check(SpaceSpec::lp(2), WeightSeq::bergman(), 1, {1, 2, 3, 4, 5}, opts);
  o.require(q2.overall == CriterionReport::Overall::SatisfiesCriterion, "qfhc Bergman q=2");
  o.require(q1.overall == CriterionReport::Overall::FailsNumerically, "qfhc Bergman q=1");
  o.detail << "geometric " << format_double(geo.sum_estimate) << ", harmonic "
           << to_string(harm.kind) << " (" << harm.rule << "), Bergman q=2 max err "
           << format_double(worst) << ", q=1 " << to_string(b1.overall);
}

void c5_matrix(Outcome& o) {
  const auto dir = std::filesystem::temp_directory_path() / "qfhc_acceptance_sweep";
  std::filesystem::remove_all(dir);
  cli::Config cfg;
  cfg.scenario = "sweep";
  cfg.out = dir.string();
  cfg.workers = 4;
  cfg.space.kind = "lp";
  cfg.space.p = 2.0;
  std::ostringstream log;
  const int code = cli::run(cfg, log);
  o.require(code == 0, "sweep exit code 0");
  std::ifstream is(dir / "run_report.json");
  const auto report = Json::parse(is);
  int cells = 0;
  for (const auto& cell : report["results"]["cells"]) {
    const std::string row = cell["weights"];
    const int p = std::stoi(row.substr(row.find("p=") + 2));
    const int q = cell["q"];
    const std::string want = q <= p ? "FailsNumerically" : "SatisfiesCriterion";
    o.require(cell["overall"] == want, row + " q=" + std::to_string(q));
    for (const auto& e : cell["entries"]) {
      const std::string kind = e["kind"];
      o.require(kind == (q <= p ? "Diverges" : "Converges"),
                row + " q=" + std::to_string(q) + " " + std::string(e["label"]));
    }
    ++cells;
  }
  o.require(cells == 15, "15 grid cells");
  o.detail << cells << " cells, pattern q<=p fails / q>=p+1 satisfies";
}

void c6_examples(Outcome& o) {
  long double h = 0.0L;
  const Index big = 100000;
  for (Index k = 1; k <= big; ++k) h += 1.0L / std::sqrt(static_cast<long double>(k) * k);
  const double oracle = std::log(static_cast<double>(big)) + std::numbers::egamma;
  o.require(h > 10.0L, "sum exceeds 10 at K=1e5");
  o.require(std::abs(static_cast<double>(h) - oracle) <= 1e-5, "matches ln K + gamma");
  std::mt19937_64 rng(kDefaultSeed);
  int with_hits = 0;
  for (int t = 0; t < 100; ++t) {
    std::uniform_int_distribution<Index> idx(1, 5000);
    std::exponential_distribution<double> mag(2.0);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
    std::vector<CoeffVector::Entry> e;
    const int support = std::uniform_int_distribution<int>(1, 300)(rng);
    for (int s = 0; s < support; ++s) e.push_back({idx(rng), std::polar(mag(rng), ph(rng))});
    const CoeffVector x = CoeffVector::from_entries(Domain::Unilateral, e);
    double lhs = 0.0;
    bool any = false;
    for (const auto& en : x.entries()) {
      // n_k + 1 is the coefficient index where sqrt(n_k+1)|x_{n_k+1}| > 1.
      if (std::sqrt(static_cast<double>(en.index)) * std::abs(en.value) > 1.0) {
        lhs += 1.0 / std::sqrt(static_cast<double>(en.index));
        any = true;
      }
    }
    with_hits += any;
    o.require(lhs <= fnorm(SpaceSpec::lp(1), x), "inequality on random vector " + std::to_string(t));
  }
  bool all_div = true;
  for (int q = 1; q <= 4; ++q) {
    const auto r = unilateral_condition(WeightSeq::log_weight(), SpaceSpec::lp(1), q, {0, 1, 2}, {});
    for (const auto& e : r.entries) all_div = all_div && e.verdict.kind == VerdictKind::Diverges;
  }
  o.require(all_div, "LogWeight diverges for q <= 4");
  o.detail << "H_1e5=" << format_double(static_cast<double>(h)) << " vs " << format_double(oracle)
           << ", inequality on 100 vectors (" << with_hits << " with hits), LogWeight Diverges q=1..4";
}

void c7_construction(Outcome& o) {
  struct Case {
    const char* name;
    WeightSeq w;
    int q;
  };
  for (const auto& c : {Case{"Constant(2) q=1", WeightSeq::constant(2.0), 1},
                        Case{"Bergman q=2", WeightSeq::bergman(), 2}}) {
    ConstructionInputs in;
    in.space = SpaceSpec::lp(2);
    in.weights = c.w;
    in.q = c.q;
    in.targets = TargetSet::canonical(3);
    in.horizon = 10000;
    const auto plan = build_vector(in);
    const auto eq = verify_orbit_bound(plan);
    o.require(eq.passed() && eq.interior > 0, std::string(c.name) + " orbit bound on interior times");
    for (int k = 1; k <= 3; ++k) {
      o.require(std::abs(plan.schedule.alpha(k) - (k + 1) * std::ldexp(1.0, -k)) < 1e-15, "alpha_k");
    }
    HitOptions ho;
    ho.q = c.q;
    ho.horizon = 10000;
    ho.workers = 4;
    const auto hits = hit_experiment(in.space, OperatorSpec::backward(c.w), plan.log_candidate,
                                     HitTarget::ball(plan.targets[0], 3.0 * plan.schedule.alpha(3)), ho);
    o.require(hits.density.value > 0.0, std::string(c.name) + " positive density");
    o.require(hits.growth.bounded, std::string(c.name) + " bounded growth");
    // The ball above contains 0 for the canonical targets; a ball that excludes 0 is also checked.
    const double x1 = fnorm(in.space, plan.targets[0]);
    const auto tight = hit_experiment(in.space, OperatorSpec::backward(c.w), plan.log_candidate,
                                      HitTarget::ball(plan.targets[0], 0.5 * x1), ho);
    o.require(tight.density.value > 0.0,
              std::string(c.name) + " ball excluding 0 still hit with positive density");
    double worst = 0.0;
    for (const auto& ch : eq.checks) {
      if (!ch.edge) worst = std::max(worst, ch.distance / ch.bound);
    }
    o.detail << c.name << ": N=";
    for (std::size_t i = 0; i < plan.selection.nseq.size(); ++i) {
      o.detail << (i ? "," : "") << plan.selection.nseq[i];
    }
    o.detail << " interior " << eq.interior << " edge " << eq.edge << " worst d/3a "
             << format_double(worst) << " density " << format_double(hits.density.value)
             << " C=" << format_double(hits.growth.constant) << " (ball holds 0: "
             << (x1 < 3.0 * plan.schedule.alpha(3)) << "), radius ||x_1||/2: density "
             << format_double(tight.density.value) << " growth "
             << (tight.growth.bounded ? "bounded" : "not bounded at this horizon") << "; ";
  }
}

bool close_rel(Scalar a, Scalar b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(b), 1e-300);
}

void c8_tmu(Outcome& o) {
  std::mt19937_64 rng(kDefaultSeed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const std::vector<Scalar> mus = {1.0, 1.5, 2.0, Scalar(1.0, 1.0)};
  int exact = 0;
  for (int t = 0; t < 100; ++t) {
    const Scalar mu = mus[static_cast<std::size_t>(t) % mus.size()];
    std::vector<Scalar> coeffs(static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 30)(rng)));
    for (auto& c : coeffs) c = Scalar(u(rng), u(rng));
    const CoeffVector f = CoeffVector::from_dense(Domain::Unilateral, 1, coeffs);
    exact += tmu_apply(mu, f) == apply(OperatorSpec::backward(WeightSeq::tmu(mu)), f);
  }
  o.require(exact == 100, "tmu_apply == TMu shift on 100 polynomials");
  double worst = 0.0;
  for (Scalar mu : mus) {
    for (Index k = 0; k <= 4; ++k) {
      // n-fold antiderivative S f = mu * int_0^{z/mu} f, applied coefficientwise.
      Scalar c = 1.0;
      Index deg = k;
      for (Index n = 1; n <= 10; ++n) {
        c = c / (static_cast<double>(deg + 1) * std::pow(mu, static_cast<double>(deg)));
        ++deg;
        const CoeffVector s = smu_power_basis(mu, k, n);
        const Scalar got = s[deg + 1];
        worst = std::max(worst, std::abs(got - c) / std::abs(c));
        o.require(close_rel(got, c, 1e-10) && s.support_size() == 1, "antiderivative oracle");
      }
    }
  }
  const auto f15 = tmu_fhc_check(1.5, 5);
  const auto f1 = tmu_fhc_check(1.0, 5);
  o.require(f15.overall == CriterionReport::Overall::SatisfiesCriterion, "fhc mu=1.5");
  o.require(f1.overall == CriterionReport::Overall::SatisfiesCriterion, "fhc mu=1");
  double pworst = 0.0;
  for (Scalar mu : mus) {
    const WeightSeq w = WeightSeq::tmu(mu);
    for (Index n = 1; n <= 200; ++n) {
      const double nd = static_cast<double>(n);
      const double e = nd * (nd - 1.0) / 2.0;
      const double lm = std::lgamma(nd + 1.0) + e * std::log(std::abs(mu));
      const double ph = e * std::arg(mu);
      const LogPolar p = w.prefix(n);
      const double err = std::max(std::abs(p.logmag - lm) / std::max(1.0, std::abs(lm)),
                                  std::abs(p.phase - ph) / std::max(1.0, std::abs(ph)));
      pworst = std::max(pworst, err);
    }
  }
  o.require(pworst <= 1e-9, "prefix identity n! mu^{n(n-1)/2}");
  o.detail << "exact " << exact << "/100, antiderivative rel err " << format_double(worst)
           << ", fhc mu=1.5 " << to_string(f15.overall) << ", mu=1 " << to_string(f1.overall)
           << ", prefix rel err " << format_double(pworst);
}

void c9_invariances(Outcome& o) {
  std::mt19937_64 rng(kDefaultSeed + 9);
  const std::vector<Scalar> rotations = {Scalar(0.0, 1.0),
                                         std::polar(1.0, std::numbers::pi / 7.0)};
  int same = 0;
  for (int t = 0; t < 20; ++t) {
    const WeightSeq w = (t % 2 == 0) ? WeightSeq::constant(2.0) : WeightSeq::bergman();
    std::vector<CoeffVector::Entry> e;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int s = 0; s < 40; ++s) {
      e.push_back({std::uniform_int_distribution<Index>(1, 400)(rng), Scalar(u(rng), u(rng))});
    }
    const CoeffVector x = CoeffVector::from_entries(Domain::Unilateral, e);
    const Index coord = std::uniform_int_distribution<Index>(1, 4)(rng);
    const double thr = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
    const HitTarget target = (t % 4 < 2) ? HitTarget::modulus(coord, thr)
                                         : HitTarget::modulus_ball(CoeffVector::basis(coord, Domain::Unilateral, thr), 0.3);
    HitOptions ho;
    ho.horizon = 300;
    const SpaceSpec space = SpaceSpec::lp(2);
    const auto base = hit_experiment(space, OperatorSpec::backward(w), x, target, ho);
    bool eq = true;
    for (Scalar lam : rotations) {
      const auto rot = hit_experiment(space, OperatorSpec::backward(w).rotated(lam), x, target, ho);
      eq = eq && rot.hits == base.hits;
    }
    same += eq;
  }
  o.require(same == 20, "rotation leaves modulus hit sets unchanged");

  int power_ok = 0, power_total = 0;
  for (int t = 0; t < 20; ++t) {
    const WeightSeq w = (t % 2 == 0) ? WeightSeq::bergman() : WeightSeq::constant(Scalar(0.0, 2.0));
    std::vector<CoeffVector::Entry> e;
    for (int s = 0; s < 30; ++s) {
      e.push_back({std::uniform_int_distribution<Index>(1, 1000)(rng), Scalar(1.0 + s, -0.5 * s)});
    }
    const CoeffVector x = CoeffVector::from_entries(Domain::Unilateral, e);
    for (int p = 2; p <= 4; ++p) {
      // p * n <= 1000 keeps 2^{pn} inside double range
      const Index n = std::uniform_int_distribution<Index>(1, 250)(rng);
      const OperatorSpec op = OperatorSpec::backward(w).rotated(rotations[1]);
      ++power_total;
      const CoeffVector a = iterate(op.powered(p), x, n);
      bool finite = true;
      for (const auto& en : a.entries()) finite = finite && std::isfinite(std::abs(en.value));
      power_ok += finite && a == iterate(op, x, p * n);
    }
  }
  o.require(power_ok == power_total, "iterate(power=p, N) == iterate(power=1, pN)");

  const Index horizon = 10000;
  const HitSet a = squares(1000, horizon);
  std::vector<ShiftBlock> blocks;
  std::vector<Index> cuts = {std::uniform_int_distribution<Index>(2, 4000)(rng),
                             std::uniform_int_distribution<Index>(4001, 8000)(rng)};
  const Index lo[3] = {1, cuts[0] + 1, cuts[1] + 1};
  const Index hi[3] = {cuts[0], cuts[1], horizon};
  for (int b = 0; b < 3; ++b) {
    blocks.push_back({IndexPredicate::interval(lo[b], hi[b]), std::uniform_int_distribution<Index>(0, 60)(rng)});
  }
  const HitSet u = shifted_union(a, blocks, horizon);
  std::set<Index> brute;
  for (Index n = 1; n <= horizon; ++n) {
    for (const auto& b : blocks) {
      const Index m = n - b.shift;
      if (m >= 1 && a.contains(m) && b.set.contains(m)) brute.insert(n);
    }
  }
  o.require(std::vector<Index>(brute.begin(), brute.end()) == u.times(), "union matches brute force");
  const auto d = q_lower_density(u, 2);
  o.require(d.value > 0.0, "2-density of shifted union positive");
  o.detail << "rotation " << same << "/20, power " << power_ok << "/" << power_total
           << ", shifted union size " << u.size() << " d_2=" << format_double(d.value);
}

void c10_weakstar(Outcome& o) {
  ConstructionInputs in;
  in.space = SpaceSpec::c0();
  in.weights = WeightSeq::constant(2.0);
  in.q = 1;
  in.targets = TargetSet::canonical(3);
  in.horizon = 4000;
  const auto plan = build_vector(in);
  HitOptions ho;
  ho.horizon = 4000;
  ho.workers = 4;
  const auto fun = coordinate_functionals(5);
  const auto weak = transfer_weakstar(in.weights, plan.log_candidate, fun, {plan.targets[0]}, 0.5, ho);
  const auto norm = hit_experiment(in.space, OperatorSpec::backward(in.weights), plan.log_candidate,
                                   HitTarget::ball(plan.targets[0], 0.5), ho);
  o.require(weak[0].density.value > 0.0, "weak* hit set has positive 1-density");
  bool subset = true;
  for (Index t : norm.hits.times()) subset = subset && weak[0].hits.contains(t);
  o.require(subset, "c0 ball hits contained in weak* hits");
  o.detail << "weak* hits " << weak[0].hits.size() << " d_1=" << format_double(weak[0].density.value)
           << ", c0 hits " << norm.hits.size() << " (subset=" << subset << ")";
}

}  // namespace

int main(int argc, char** argv) {
  // optional argument: run a single criterion by number
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"density exactness", c1_density},
      {"growth-bound dichotomy", c2_growth},
      {"J-set generator", c3_jsets},
      {"criterion calibration", c4_calibration},
      {"root-weight verdict matrix", c5_matrix},
      {"negative-example mechanics", c6_examples},
      {"construction bound", c7_construction},
      {"T_mu operator", c8_tmu},
      {"rotation/power/shift invariances", c9_invariances},
      {"weak* transfer", c10_weakstar},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 10.0) {
      o.pass = false;
      o.detail << " [took " << secs << " s]";
    }
    failures += !o.pass;
    std::cout << "criterion " << (i + 1) << " (" << criteria[i].first << "): "
              << (o.pass ? "PASS" : "FAIL") << " - " << o.detail.str() << " ("
              << std::fixed << std::setprecision(2) << secs << " s)" << std::defaultfloat << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
