#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "qfhc/constructor.hpp"
#include "qfhc/errors.hpp"

namespace qfhc {

namespace {

Index ipow(Index n, int q) {
  Index r = 1;
  for (int i = 0; i < q; ++i) r *= n;
  return r;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

void require_constructible(const SpaceSpec& space, const WeightSeq& w, int q) {
  space.validate();
  if (q < 1) throw InvalidArgument("q must be >= 1");
  if (space.kind != SpaceSpec::Kind::Lp && space.kind != SpaceSpec::Kind::C0) {
    throw InvalidArgument("construction supports l^p and c0 only");
  }
  if (space.domain != Domain::Unilateral) {
    throw InvalidArgument("construction supports the unilateral domain only");
  }
  if (!w.supports(Domain::Unilateral)) {
    throw DomainMismatch(w.describe() + " is not a unilateral weight");
  }
}

// Tail data of one scalar sequence a_n = |coef(n)|, n = 1..M, with a bound
// R on what lies beyond M (sum of a_n^p for l^p, sup of a_n for c0).
struct ScalarTail {
  std::vector<double> tail;  // tail[N] for N = 1..M+1, already a norm bound
  std::string majorant;
  bool certified = true;
};

ScalarTail finish_tail(const std::vector<double>& a, double beyond, bool lp, double p) {
  const std::size_t m = a.size() - 1;  // a[1..m]
  ScalarTail out;
  out.tail.assign(m + 2, 0.0);
  double acc = beyond;
  out.tail[m + 1] = lp ? std::pow(acc, 1.0 / p) : acc;
  for (std::size_t n = m; n >= 1; --n) {
    acc = lp ? acc + std::pow(a[n], p) : std::max(acc, a[n]);
    out.tail[n] = lp ? std::pow(acc, 1.0 / p) : acc;
  }
  return out;
}

ScalarTail s_series_tail(const SpaceSpec& space, const WeightSeq& w, int q, Index s, Index m) {
  const bool lp = space.kind == SpaceSpec::Kind::Lp;
  const double p = space.p;
  std::vector<double> a(static_cast<std::size_t>(m) + 1, 0.0);
  for (Index n = 1; n <= m; ++n) {
    a[static_cast<std::size_t>(n)] = forward_coefficient(w, s, ipow(n, q)).magnitude();
  }
  const double md = static_cast<double>(m);
  double beyond = 0.0;
  std::string majorant;
  bool certified = true;
  if (!lp) {
    if (w.moduli_at_least_one()) {
      // |coef| is nonincreasing in n, so the sup beyond M is the next term.
      beyond = forward_coefficient(w, s, ipow(m + 1, q)).magnitude();
      majorant = "monotone: sup = first term";
    } else {
      beyond = a.back();
      majorant = "empirical: last scanned term";
      certified = false;
    }
  } else if (w.family() == WeightSeq::Family::Bergman ||
             w.family() == WeightSeq::Family::RootWeight) {
    // coef <= (c/n^q)^{1/(2r)}: power law with exponent q p / (2r).
    const double r = w.family() == WeightSeq::Family::Bergman ? 1.0 : w.root_p();
    const double c = static_cast<double>(s) + (w.family() == WeightSeq::Family::Bergman ? 1.0 : 2.0);
    const double e = q * p / (2.0 * r);
    if (e > 1.0) {
      const double cc = std::pow(c, p / (2.0 * r));
      beyond = cc * std::pow(md, 1.0 - e) / (e - 1.0);
      majorant = "power-law: C=" + fmt(cc) + ", exponent " + fmt(e);
    } else {
      beyond = std::numeric_limits<double>::infinity();
      majorant = "power-law exponent " + fmt(e) + " <= 1";
      certified = false;
    }
  } else if (w.moduli_nondecreasing()) {
    // a_{n+1}/a_n is nonincreasing, so the tail is dominated geometrically.
    const double next = forward_coefficient(w, s, ipow(m + 1, q)).magnitude();
    const double last = a.back();
    const double rho = last > 0.0 ? std::pow(next / last, p) : 0.0;
    if (rho < 1.0) {
      beyond = std::pow(next, p) / (1.0 - rho);
      majorant = "ratio: rho=" + fmt(rho);
    } else {
      beyond = std::numeric_limits<double>::infinity();
      majorant = "ratio >= 1";
      certified = false;
    }
  } else {
    beyond = md * std::pow(a.back(), p);
    majorant = "empirical: M * last term";
    certified = false;
  }
  ScalarTail out = finish_tail(a, beyond, lp, p);
  out.majorant = majorant;
  out.certified = certified;
  return out;
}

// T^{n^q} e_s vanishes once n^q >= s, so this tail is an exact finite sum.
ScalarTail t_series_tail(const SpaceSpec& space, const WeightSeq& w, int q, Index s, Index m) {
  const bool lp = space.kind == SpaceSpec::Kind::Lp;
  std::vector<double> a(static_cast<std::size_t>(m) + 1, 0.0);
  for (Index n = 1; n <= m && ipow(n, q) < s; ++n) {
    a[static_cast<std::size_t>(n)] = backward_coefficient(w, s, ipow(n, q)).magnitude();
  }
  ScalarTail out = finish_tail(a, 0.0, lp, space.p);
  out.majorant = "finite";
  return out;
}

}  // namespace

ConstructionRefused::ConstructionRefused(CriterionReport report)
    : std::runtime_error("construction refused: " + report.description + " is " +
                         to_string(report.overall)),
      report_(std::move(report)) {}

NkSelection select_Nk(const SpaceSpec& space, const WeightSeq& w, int q, const TargetSet& targets,
                      const EpsilonSchedule& schedule, const SelectOptions& opts) {
  require_constructible(space, w, q);
  if (targets.size() == 0) throw InvalidArgument("no targets");
  const int kmax = static_cast<int>(targets.size());
  if (auto len = schedule.length(); len && *len < kmax) {
    throw InvalidArgument("epsilon table shorter than the target list");
  }
  std::set<Index> support;
  for (const auto& x : targets.vectors()) {
    for (const auto& e : x.entries()) support.insert(e.index);
  }
  NkSelection out;
  out.criterion = qfhc_check(space, w, q, {support.begin(), support.end()}, opts.probe);
  if (out.criterion.overall != CriterionReport::Overall::SatisfiesCriterion) {
    throw ConstructionRefused(out.criterion);
  }

  const Index m = std::min(opts.scan_limit, Index{1} << (60 / q));
  if (m < 2) throw InvalidArgument("scan_limit must be >= 2");
  // bound[i][N]: certified bound for target i and every F in [N, inf).
  std::vector<std::vector<double>> bound(static_cast<std::size_t>(kmax),
                                         std::vector<double>(static_cast<std::size_t>(m) + 2, 0.0));
  std::vector<std::string> majorant(static_cast<std::size_t>(kmax));
  std::vector<bool> certified(static_cast<std::size_t>(kmax), true);
  std::map<Index, std::pair<ScalarTail, ScalarTail>> per_index;
  for (Index s : support) {
    per_index.emplace(s, std::make_pair(t_series_tail(space, w, q, s, m),
                                        s_series_tail(space, w, q, s, m)));
  }
  for (int i = 0; i < kmax; ++i) {
    auto& b = bound[static_cast<std::size_t>(i)];
    for (const auto& e : targets[static_cast<std::size_t>(i)].entries()) {
      const auto& [t, s] = per_index.at(e.index);
      const double c = std::abs(e.value);
      for (std::size_t n = 1; n < b.size(); ++n) b[n] += c * (t.tail[n] + s.tail[n]);
      if (!s.certified) certified[static_cast<std::size_t>(i)] = false;
      majorant[static_cast<std::size_t>(i)] = s.majorant;
    }
  }
  for (std::size_t i = 0; i < certified.size(); ++i) {
    if (!certified[i]) {
      out.warnings.push_back("target " + std::to_string(i + 1) +
                             ": tail beyond the scan is empirical, not certified");
    }
  }

  for (int k = 1; k <= kmax; ++k) {
    const double eps = schedule.eps(k);
    Index nk = 1;
    for (int i = 0; i < k; ++i) {
      const auto& b = bound[static_cast<std::size_t>(i)];
      Index n = 1;
      while (n <= m + 1 && !(b[static_cast<std::size_t>(n)] < eps)) ++n;
      if (n > m + 1) {
        throw ResourceLimit("no N <= " + std::to_string(m + 1) + " brings the tail of target " +
                            std::to_string(i + 1) + " below eps_" + std::to_string(k) + " = " +
                            fmt(eps));
      }
      out.certificates.push_back({k, i + 1, n, b[static_cast<std::size_t>(n)],
                                  majorant[static_cast<std::size_t>(i)],
                                  certified[static_cast<std::size_t>(i)]});
      nk = std::max(nk, n);
    }
    out.raw.push_back(nk);
    out.nseq.push_back(out.nseq.empty() ? nk : std::max(nk, out.nseq.back() + 1));
  }
  return out;
}

ConstructionPlan build_vector(const ConstructionInputs& in) {
  require_constructible(in.space, in.weights, in.q);
  if (in.horizon < 1) throw InvalidArgument("horizon must be >= 1");
  ConstructionPlan plan;
  plan.q = in.q;
  plan.space = in.space;
  plan.weights = in.weights;
  plan.schedule = in.schedule;
  plan.targets = in.targets;
  plan.horizon = in.horizon;
  plan.selection = select_Nk(in.space, in.weights, in.q, in.targets, in.schedule, in.select);
  plan.warnings = plan.selection.warnings;
  plan.k_classes = static_cast<int>(in.targets.size());
  const Index top = max_scale(in.horizon, in.q);
  plan.jsets = generate_jsets(plan.selection.nseq, plan.k_classes, std::max<Index>(top, 1));
  for (const auto& wmsg : plan.jsets.warnings) plan.warnings.push_back(wmsg);

  std::size_t total = 0;
  for (int k = 0; k < plan.k_classes; ++k) {
    total += plan.jsets.classes[static_cast<std::size_t>(k)].size() *
             in.targets[static_cast<std::size_t>(k)].support_size();
  }
  if (total > in.support_cap) {
    throw ResourceLimit("candidate support " + std::to_string(total) + " exceeds the cap " +
                        std::to_string(in.support_cap));
  }

  std::map<Index, LogPolar> acc;
  std::set<Index> cancelled;
  plan.norm_bound_ok = true;
  double norm_sum = 0.0;
  for (int k = 1; k <= plan.k_classes; ++k) {
    const auto& jk = plan.jsets.classes[static_cast<std::size_t>(k - 1)];
    const auto& xk = in.targets[static_cast<std::size_t>(k - 1)];
    LogVector block;
    for (Index n : jk) {
      if (n > top) break;
      const Index e = ipow(n, in.q);
      for (const auto& c : xk.entries()) {
        const LogPolar v = LogPolar::from_complex(c.value) * forward_coefficient(in.weights, c.index, e);
        block.push_back({c.index + e, v});
      }
    }
    std::sort(block.begin(), block.end(),
              [](const LogEntry& a, const LogEntry& b) { return a.index < b.index; });
    if (block.empty()) {
      plan.warnings.push_back("J_" + std::to_string(k) + " has no element n with n^q <= horizon");
    }
    const double norm = fnorm(in.space, materialize(block));
    plan.block_norms.push_back(norm);
    norm_sum += norm;
    if (!(norm <= in.schedule.eps(k))) plan.norm_bound_ok = false;
    for (const auto& b : block) {
      auto [it, fresh] = acc.emplace(b.index, b.value);
      if (fresh) continue;
      if (auto sum = log_add(it->second, b.value)) {
        it->second = *sum;
      } else {
        acc.erase(it);
      }
    }
  }
  if (!(norm_sum <= in.schedule.eps_sum(plan.k_classes))) plan.norm_bound_ok = false;
  if (acc.empty()) plan.warnings.push_back("candidate is 0: horizon below every J-set element");
  plan.log_candidate.reserve(acc.size());
  for (const auto& [i, v] : acc) plan.log_candidate.push_back({i, v});
  plan.candidate = materialize(plan.log_candidate);
  return plan;
}

CoeffVector orbit_point(const OperatorSpec& op, const LogVector& x, Index e, Domain domain) {
  op.validate();
  if (e < 0) throw InvalidArgument("orbit exponent must be >= 0");
  const Index steps = e * op.power;
  const double rot_phase = static_cast<double>(steps) * std::arg(op.rotation);
  const bool unilateral = domain == Domain::Unilateral;
  const bool back = op.direction == Direction::Backward;
  auto first = x.begin();
  if (back && unilateral) {
    first = std::upper_bound(x.begin(), x.end(), steps,
                             [](Index s, const LogEntry& le) { return s < le.index; });
  }
  std::vector<CoeffVector::Entry> out;
  out.reserve(static_cast<std::size_t>(x.end() - first));
  for (auto it = first; it != x.end(); ++it) {
    const Index nat = op.base.natural_index(it->index);
    LogPolar v = it->value;
    Index target;
    if (back) {
      target = it->index - steps;
      v = v * op.base.prefix(nat) / op.base.prefix(nat - steps);
    } else {
      target = it->index + steps;
      v = v * op.base.prefix(nat) / op.base.prefix(nat + steps);
    }
    v.phase += rot_phase;
    out.push_back({target, v.to_complex()});
  }
  return CoeffVector::from_sorted(domain, std::move(out));
}

OrbitBoundReport verify_orbit_bound(const ConstructionPlan& plan) {
  OrbitBoundReport rep;
  const OperatorSpec op = OperatorSpec::backward(plan.weights);
  const Index top = max_scale(plan.horizon, plan.q);
  const auto& nseq = plan.selection.nseq;
  for (int k = 1; k <= plan.k_classes; ++k) {
    const double bound = 3.0 * plan.schedule.alpha(k);
    const auto& xk = plan.targets[static_cast<std::size_t>(k - 1)];
    for (Index m : plan.jsets.classes[static_cast<std::size_t>(k - 1)]) {
      if (m > top) break;
      const Index e = ipow(m, plan.q);
      const CoeffVector y = orbit_point(op, plan.log_candidate, e);
      const double d = fnorm(plan.space, subtract(y, xk));
      const bool edge = m + nseq[static_cast<std::size_t>(k - 1)] + nseq[0] > top;
      const bool ok = d <= bound;
      rep.checks.push_back({k, m, e, d, bound, edge, ok});
      if (edge) {
        ++rep.edge;
      } else {
        ++rep.interior;
        if (!ok) {
          rep.violations.push_back("k=" + std::to_string(k) + " m=" + std::to_string(m) +
                                   ": distance " + fmt(d) + " > " + fmt(bound));
        }
      }
    }
  }
  return rep;
}

}  // namespace qfhc
