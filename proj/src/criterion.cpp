#include "qfhc/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qfhc/errors.hpp"

namespace qfhc {

namespace {

constexpr Index kNoCap = std::numeric_limits<Index>::max();

Index ipow(Index n, int q) {
  Index r = 1;
  for (int i = 0; i < q; ++i) r *= n;
  return r;
}

ProbeOptions for_power(ProbeOptions opts, int q) {
  opts.max_exp = max_exp_for_power(q, opts.max_exp);
  return opts;
}

void require_q(int q) {
  if (q < 1) throw InvalidArgument("q must be >= 1");
}

std::string header(const std::string& what, const WeightSeq& w, int q, const std::string& space) {
  std::ostringstream os;
  os << what << ": " << w.describe() << " on " << space << ", q=" << q;
  return os.str();
}

void note_cap(CriterionReport& r, int q, const ProbeOptions& requested, const ProbeOptions& used) {
  if (used.max_exp < requested.max_exp) {
    r.notes.push_back("max_exp lowered from " + std::to_string(requested.max_exp) + " to " +
                      std::to_string(used.max_exp) + " so that n^" + std::to_string(q) +
                      " stays inside int64");
  }
}

}  // namespace

std::string to_string(CriterionReport::Overall o) {
  switch (o) {
    case CriterionReport::Overall::SatisfiesCriterion: return "SatisfiesCriterion";
    case CriterionReport::Overall::FailsNumerically: return "FailsNumerically";
    case CriterionReport::Overall::Inconclusive: return "Inconclusive";
  }
  return "?";
}

void CriterionReport::finalize() {
  if (entries.empty()) {
    overall = Overall::Inconclusive;
    return;
  }
  bool all = true;
  bool any_div = false;
  for (const auto& e : entries) {
    if (e.verdict.kind != VerdictKind::Converges) all = false;
    if (e.verdict.kind == VerdictKind::Diverges) any_div = true;
  }
  overall = all ? Overall::SatisfiesCriterion
                : (any_div ? Overall::FailsNumerically : Overall::Inconclusive);
}

CriterionReport qfhc_check(const SpaceSpec& space, const WeightSeq& w, int q,
                           const std::vector<Index>& dense_indices, const ProbeOptions& opts) {
  require_q(q);
  space.validate();
  const ProbeOptions used = for_power(opts, q);
  const OperatorSpec back = OperatorSpec::backward(w);
  CriterionReport report;
  report.description = header("qfhc", w, q, space.describe());
  report.q = q;
  note_cap(report, q, opts, used);
  if (space.domain == Domain::Unilateral) {
    report.notes.push_back(
        "T-series on e_j vanishes once n^q >= j (e_0 = 0), so it converges trivially");
  }
  for (Index j : dense_indices) {
    const CoeffVector ej = CoeffVector::basis(j, space.domain);
    auto t_terms = [&](Index n) { return iterate(back, ej, ipow(n, q), kNoCap); };
    auto s_terms = [&](Index n) { return forward_iterate(w, j, ipow(n, q), space.domain); };
    report.entries.push_back({"T e_" + std::to_string(j), series_probe(space, t_terms, used)});
    report.entries.push_back({"S e_" + std::to_string(j), series_probe(space, s_terms, used)});
  }
  report.finalize();
  return report;
}

CriterionReport unilateral_condition(const WeightSeq& w, const SpaceSpec& space, int q,
                                     const std::vector<Index>& j_range, const ProbeOptions& opts) {
  require_q(q);
  space.validate();
  if (space.kind != SpaceSpec::Kind::Lp && space.kind != SpaceSpec::Kind::C0) {
    throw InvalidArgument("unilateral_condition needs an l^p or c0 space");
  }
  const ProbeOptions used = for_power(opts, q);
  CriterionReport report;
  report.description = header("unilateral", w, q, space.describe());
  report.q = q;
  note_cap(report, q, opts, used);
  for (Index j : j_range) {
    if (j < 0) throw InvalidArgument("unilateral_condition needs j >= 0");
    const std::string label = "j=" + std::to_string(j);
    if (space.kind == SpaceSpec::Kind::Lp) {
      const double p = space.p;
      auto term = [&](Index n) { return std::exp(-p * w.prefix(ipow(n, q) + j).logmag); };
      report.entries.push_back({label, classify_nonnegative_series(term, used)});
    } else {
      auto value = [&](Index n) { return std::exp(-w.prefix(ipow(n, q) + j).logmag); };
      report.entries.push_back(
          {label, classify_null_sequence(value, Index{1} << used.max_exp, used)});
    }
  }
  report.finalize();
  return report;
}

CriterionReport bilateral_condition(const WeightSeq& w, const SpaceSpec& space, int q,
                                    const std::vector<Index>& j_range, const ProbeOptions& opts) {
  require_q(q);
  space.validate();
  if (!w.supports(Domain::Bilateral)) {
    throw DomainMismatch(w.describe() + " has no bilateral extension");
  }
  if (space.kind != SpaceSpec::Kind::Lp && space.kind != SpaceSpec::Kind::C0) {
    throw InvalidArgument("bilateral_condition needs an l^p or c0 space");
  }
  const ProbeOptions used = for_power(opts, q);
  CriterionReport report;
  report.description = header("bilateral", w, q, space.describe());
  report.q = q;
  note_cap(report, q, opts, used);
  const bool lp = space.kind == SpaceSpec::Kind::Lp;
  const double p = space.p;
  const Index count = Index{1} << used.max_exp;
  for (Index j : j_range) {
    const std::string suffix = " j=" + std::to_string(j);
    // |w_1 ... w_{n^q+j}| and |w_j ... w_{j-n^q+1}| in log form.
    auto up = [&](Index n) { return w.prefix(ipow(n, q) + j).logmag; };
    auto down = [&](Index n) { return w.product(j - ipow(n, q), j).logmag; };
    if (lp) {
      report.entries.push_back(
          {"forward" + suffix,
           classify_nonnegative_series([&](Index n) { return std::exp(-p * up(n)); }, used)});
      report.entries.push_back(
          {"backward" + suffix,
           classify_nonnegative_series([&](Index n) { return std::exp(p * down(n)); }, used)});
    } else {
      report.entries.push_back(
          {"forward" + suffix,
           classify_null_sequence([&](Index n) { return std::exp(-up(n)); }, count, used)});
      report.entries.push_back(
          {"backward" + suffix,
           classify_null_sequence([&](Index n) { return std::exp(down(n)); }, count, used)});
    }
  }
  report.finalize();
  return report;
}

CriterionReport weakstar_condition(const WeightSeq& w, int q, const std::vector<Index>& j_range,
                                   const ProbeOptions& opts) {
  require_q(q);
  const ProbeOptions used = for_power(opts, q);
  CriterionReport report;
  report.description = header("weakstar", w, q, "l^inf weak*");
  report.q = q;
  note_cap(report, q, opts, used);
  for (Index j : j_range) {
    if (j < 0) throw InvalidArgument("weakstar_condition needs j >= 0");
    auto term = [&](Index n) { return std::exp(-w.prefix(j + ipow(n, q)).logmag); };
    report.entries.push_back({"j=" + std::to_string(j), classify_nonnegative_series(term, used)});
  }
  report.finalize();
  return report;
}

CriterionReport hc_check(const SpaceSpec& space, const WeightSeq& w,
                         const std::vector<Index>& dense_indices, Index horizon,
                         const ProbeOptions& opts) {
  space.validate();
  if (horizon < 2) throw InvalidArgument("hc_check needs horizon >= 2");
  const OperatorSpec back = OperatorSpec::backward(w);
  CriterionReport report;
  report.description = header("hc", w, 1, space.describe());
  for (Index j : dense_indices) {
    const CoeffVector ej = CoeffVector::basis(j, space.domain);
    auto t_norm = [&](Index n) { return fnorm(space, iterate(back, ej, n, kNoCap)); };
    auto s_norm = [&](Index n) { return fnorm(space, forward_iterate(w, j, n, space.domain)); };
    report.entries.push_back(
        {"T^n e_" + std::to_string(j), classify_null_sequence(t_norm, horizon, opts)});
    report.entries.push_back(
        {"S^n e_" + std::to_string(j), classify_null_sequence(s_norm, horizon, opts)});
  }
  report.finalize();
  return report;
}

SalasReport salas_check(const WeightSeq& w, Index horizon, double threshold) {
  if (horizon < 2) throw InvalidArgument("salas_check needs horizon >= 2");
  if (!(threshold > 1.0)) throw InvalidArgument("salas_check threshold must exceed 1");
  SalasReport out;
  const double log_threshold = std::log(threshold);
  double best = -std::numeric_limits<double>::infinity();
  const Index dense_end = std::min(horizon, WeightSeq::kTableLimit);
  w.warm(dense_end);
  Index next_mark = 1;
  auto visit = [&](Index n) {
    const double lp = w.prefix(n).logmag;
    if (lp > best) {
      best = lp;
      out.argmax = n;
    }
    if (n == next_mark || n == horizon) {
      out.checkpoints.emplace_back(n, best);
      while (next_mark <= n) next_mark *= 2;
    }
  };
  for (Index n = 1; n <= dense_end; ++n) visit(n);
  // Past the table only dyadic points are sampled.
  for (Index n = next_mark; n < horizon; n *= 2) visit(n);
  if (horizon > dense_end) visit(horizon);
  out.max_log_product = best;

  if (best > log_threshold) {
    out.limsup_infinite = true;
    out.rule = "threshold";
    return out;
  }
  const auto& cp = out.checkpoints;
  constexpr std::size_t kLag = 6;
  if (cp.size() >= kLag + 2) {
    const std::size_t e = cp.size() - 1;
    const double last_inc = cp[e].second - cp[e - 1].second;
    const double earlier_inc = cp[e - kLag].second - cp[e - kLag - 1].second;
    if (last_inc > 1e-9 && last_inc >= 0.5 * earlier_inc) {
      out.limsup_infinite = true;
      out.rule = "sustained-growth";
      return out;
    }
  }
  out.rule = "bounded";
  return out;
}

CriterionReport fhc_check(const SpaceSpec& space, const IndexedTermGenerator& t_terms,
                          const IndexedTermGenerator& s_terms,
                          const std::vector<Index>& dense_indices, const ProbeOptions& opts,
                          std::string description) {
  space.validate();
  CriterionReport report;
  report.description = std::move(description);
  for (Index j : dense_indices) {
    report.entries.push_back(
        {"T e_" + std::to_string(j),
         series_probe(space, [&](Index n) { return t_terms(j, n); }, opts)});
    report.entries.push_back(
        {"S e_" + std::to_string(j),
         series_probe(space, [&](Index n) { return s_terms(j, n); }, opts)});
  }
  report.finalize();
  return report;
}

CriterionReport tmu_fhc_check(Scalar mu, Index kmax, const SpaceSpec& space,
                              const ProbeOptions& opts) {
  if (mu == Scalar(0.0)) throw InvalidArgument("mu must be nonzero");
  if (kmax < 0) throw InvalidArgument("kmax must be >= 0");
  const OperatorSpec back = OperatorSpec::backward(WeightSeq::tmu(mu));
  std::vector<Index> indices;
  for (Index k = 0; k <= kmax; ++k) indices.push_back(k + 1);
  auto t = [&](Index j, Index n) {
    return iterate(back, CoeffVector::basis(j, Domain::Unilateral), n, kNoCap);
  };
  auto s = [&](Index j, Index n) {
    const LogPolar c = smu_power_coefficient(mu, j - 1, n);
    // Underflowed terms carry nothing.
    if (c.logmag < -745.0) return CoeffVector(Domain::Unilateral);
    return CoeffVector::basis(j + n, Domain::Unilateral, c.to_complex());
  };
  std::ostringstream os;
  os << "fhc: T_mu f = f'(mu z), mu=" << mu.real() << (mu.imag() < 0 ? "" : "+") << mu.imag()
     << "i on " << space.describe();
  CriterionReport report = fhc_check(space, t, s, indices, opts, os.str());
  report.notes.push_back("basis index j carries z^(j-1); T-series vanishes once n > j-1");
  return report;
}

}  // namespace qfhc
