#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <unordered_set>

#include "qfhc/criterion.hpp"
#include "qfhc/errors.hpp"

namespace qfhc {

std::string to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Converges: return "Converges";
    case VerdictKind::Diverges: return "Diverges";
    case VerdictKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double block_ratio(double cur, double prev) {
  if (cur == 0.0) return 0.0;
  if (prev == 0.0) return kInf;
  return cur / prev;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Shared dyadic decision for nonnegative block data. `partials` are partial
// sums (or F-norms of partial sums) at the same checkpoints as `blocks`.
Verdict decide_series(SeriesProbe probe, const ProbeOptions& opts) {
  Verdict v;
  const auto& cp = probe.checkpoints;
  const std::size_t last = cp.size() - 1;
  for (const auto& c : cp) {
    if (!std::isfinite(c.partial) || c.partial > opts.divergence_threshold) {
      v.kind = VerdictKind::Diverges;
      v.rule = "threshold";
      v.evidence = "partial sum " + fmt(c.partial) + " at m=" + std::to_string(c.m) +
                   " exceeds " + fmt(opts.divergence_threshold);
      v.sum_estimate = c.partial;
      v.probe = std::move(probe);
      return v;
    }
  }
  const std::size_t window = std::min<std::size_t>(static_cast<std::size_t>(opts.window), last);
  std::vector<double> ratios;
  for (std::size_t i = last + 1 - window; i <= last; ++i) {
    ratios.push_back(block_ratio(cp[i].block, cp[i - 1].block));
  }
  const double b_last = cp[last].block;
  const double s_last = cp[last].partial;
  std::ostringstream ev;
  ev << "trailing block ratios:";
  for (double r : ratios) ev << ' ' << fmt(r);
  ev << "; last block " << fmt(b_last);

  const bool nondecaying =
      window > 0 && std::all_of(ratios.begin(), ratios.end(),
                                [&](double r) { return r >= opts.nondecay_ratio; });
  if (nondecaying && b_last > opts.tol) {
    v.kind = VerdictKind::Diverges;
    v.rule = "condensation";
    v.evidence = ev.str();
    v.sum_estimate = s_last;
    v.probe = std::move(probe);
    return v;
  }
  double tail = kInf;
  if (b_last == 0.0) {
    tail = 0.0;
  } else if (!ratios.empty() && ratios.back() < 1.0) {
    tail = b_last * ratios.back() / (1.0 - ratios.back());
  }
  if (b_last < opts.tol && tail < opts.tol) {
    v.kind = VerdictKind::Converges;
    v.rule = "tolerance";
    v.tail_bound = tail;
  } else if (window > 0 && std::all_of(ratios.begin(), ratios.end(),
                                       [&](double r) { return r <= opts.converge_ratio; })) {
    const double rmax = *std::max_element(ratios.begin(), ratios.end());
    v.kind = VerdictKind::Converges;
    v.rule = "dyadic-ratio";
    v.tail_bound = b_last * rmax / (1.0 - rmax);
  } else {
    v.kind = VerdictKind::Inconclusive;
    v.rule = "undecided";
  }
  v.evidence = ev.str();
  v.sum_estimate = s_last + (v.kind == VerdictKind::Converges ? v.tail_bound : 0.0);
  probe.tail_estimate = v.kind == VerdictKind::Converges ? std::optional<double>(v.tail_bound)
                                                         : std::nullopt;
  v.probe = std::move(probe);
  return v;
}

Verdict decide_null(SeriesProbe probe, const ProbeOptions& opts) {
  Verdict v;
  const auto& cp = probe.checkpoints;
  const std::size_t last = cp.size() - 1;
  for (const auto& c : cp) {
    if (!std::isfinite(c.block) || c.block > opts.divergence_threshold) {
      v.kind = VerdictKind::Diverges;
      v.rule = "threshold";
      v.evidence = "value " + fmt(c.block) + " near n=" + std::to_string(c.m);
      v.probe = std::move(probe);
      return v;
    }
  }
  const std::size_t window = std::min<std::size_t>(static_cast<std::size_t>(opts.window), last);
  const double v_last = cp[last].block;
  std::ostringstream ev;
  ev << "trailing block maxima:";
  for (std::size_t i = last - window; i <= last; ++i) ev << ' ' << fmt(cp[i].block);
  v.evidence = ev.str();
  bool nonincreasing = window > 0;
  bool nondecaying = window > 0;
  for (std::size_t i = last + 1 - window; i <= last; ++i) {
    if (cp[i].block > cp[i - 1].block) nonincreasing = false;
    if (block_ratio(cp[i].block, cp[i - 1].block) < opts.nondecay_ratio) nondecaying = false;
  }
  if (v_last < opts.tol) {
    v.kind = VerdictKind::Converges;
    v.rule = "tolerance";
    v.tail_bound = v_last;
  } else if (nonincreasing && v_last <= 0.9 * cp[last - window].block) {
    v.kind = VerdictKind::Converges;
    v.rule = "decreasing-to-zero";
    v.tail_bound = v_last;
  } else if (nondecaying) {
    v.kind = VerdictKind::Diverges;
    v.rule = "non-decaying";
  } else {
    v.kind = VerdictKind::Inconclusive;
    v.rule = "undecided";
  }
  v.sum_estimate = v_last;
  if (v.kind == VerdictKind::Converges) probe.tail_estimate = v.tail_bound;
  v.probe = std::move(probe);
  return v;
}

void require_exp(int e) {
  if (e < 1 || e > 62) throw InvalidArgument("max_exp must lie in [1, 62]");
}

}  // namespace

int max_exp_for_power(int q, int requested) {
  if (q < 1) throw InvalidArgument("q must be >= 1");
  return std::max(1, std::min(requested, 60 / q));
}

Verdict classify_nonnegative_series(const std::function<double(Index)>& term,
                                    const ProbeOptions& opts) {
  require_exp(opts.max_exp);
  SeriesProbe probe;
  probe.path = "scalar";
  double partial = 0.0;
  Index n = 1;
  for (int i = 0; i <= opts.max_exp; ++i) {
    const Index m = Index{1} << i;
    double block = 0.0;
    for (; n <= m; ++n) block += term(n);
    partial += block;
    probe.checkpoints.push_back({m, partial, block});
    if (!std::isfinite(partial) || partial > opts.divergence_threshold) break;
  }
  return decide_series(std::move(probe), opts);
}

Verdict classify_null_sequence(const std::function<double(Index)>& value, Index count,
                               const ProbeOptions& opts) {
  if (count < 2) throw InvalidArgument("null-sequence probe needs at least two values");
  SeriesProbe probe;
  probe.path = "null-sequence";
  Index n = 1;
  for (Index m = 1;; m = std::min(2 * m, count)) {
    double block = 0.0;
    for (; n <= m; ++n) block = std::max(block, value(n));
    probe.checkpoints.push_back({m, block, block});
    if (m == count) break;
  }
  return decide_null(std::move(probe), opts);
}

Verdict series_probe(const SpaceSpec& space, const TermGenerator& terms, const ProbeOptions& opts) {
  require_exp(opts.max_exp);
  const Index total = Index{1} << opts.max_exp;
  const bool reducible =
      !opts.force_fnorm_path &&
      (space.kind == SpaceSpec::Kind::Lp || space.kind == SpaceSpec::Kind::C0);

  if (reducible) {
    // Single pass: accumulate the scalar blocks while checking that every
    // term is a single basis vector on an index not used before.
    const bool lp = space.kind == SpaceSpec::Kind::Lp;
    SeriesProbe probe;
    probe.path = lp ? "scalar" : "null-sequence";
    bool distinct = true;
    bool monotone = true;
    Index last_index = std::numeric_limits<Index>::min();
    std::unordered_set<Index> seen;
    double partial = 0.0;
    Index n = 1;
    for (int i = 0; i <= opts.max_exp && distinct; ++i) {
      const Index m = Index{1} << i;
      double block = 0.0;
      for (; n <= m; ++n) {
        const CoeffVector t = terms(n);
        if (t.empty()) continue;
        if (t.support_size() > 1) {
          distinct = false;
          break;
        }
        const Index idx = t.min_index();
        if (monotone && idx > last_index) {
          last_index = idx;
        } else {
          if (monotone) {
            monotone = false;
            for (Index k = 1; k < n; ++k) {
              const CoeffVector s = terms(k);
              if (!s.empty()) seen.insert(s.min_index());
            }
          }
          if (!seen.insert(idx).second) {
            distinct = false;
            break;
          }
        }
        const double mag = std::abs(t.entries()[0].value);
        if (lp) {
          block += std::pow(mag, space.p);
        } else {
          block = std::max(block, mag);
        }
      }
      if (!distinct) break;
      partial = lp ? partial + block : block;
      probe.checkpoints.push_back({m, partial, block});
      if (!std::isfinite(partial) || partial > opts.divergence_threshold) break;
    }
    if (distinct) {
      return lp ? decide_series(std::move(probe), opts) : decide_null(std::move(probe), opts);
    }
  }

  SeriesProbe probe;
  probe.path = "fnorm";
  std::map<Index, Scalar> acc;
  auto to_vector = [&space](const std::map<Index, Scalar>& m) {
    std::vector<CoeffVector::Entry> e;
    e.reserve(m.size());
    for (const auto& [i, c] : m) e.push_back({i, c});
    return CoeffVector::from_sorted(space.domain, std::move(e));
  };
  Index n = 1;
  for (int i = 0; i <= opts.max_exp; ++i) {
    const Index m = Index{1} << i;
    std::map<Index, Scalar> block;
    for (; n <= m; ++n) {
      const CoeffVector t = terms(n);
      for (const auto& e : t.entries()) {
        acc[e.index] += e.value;
        block[e.index] += e.value;
      }
    }
    const double partial = fnorm(space, to_vector(acc));
    probe.checkpoints.push_back({m, partial, fnorm(space, to_vector(block))});
    if (!std::isfinite(partial) || partial > opts.divergence_threshold) break;
  }
  std::mt19937_64 rng(opts.seed);
  const Index lo = total / 2;
  std::uniform_int_distribution<Index> pick(lo, total);
  std::uniform_int_distribution<int> size(1, 256);
  double subset_max = 0.0;
  for (int s = 0; s < opts.random_subsets; ++s) {
    const int count = size(rng);
    std::vector<Index> f;
    for (int c = 0; c < count; ++c) f.push_back(pick(rng));
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    std::map<Index, Scalar> sum;
    for (Index k : f) {
      const CoeffVector t = terms(k);
      for (const auto& e : t.entries()) sum[e.index] += e.value;
    }
    const double norm = fnorm(space, to_vector(sum));
    subset_max = std::max(subset_max, norm);
    probe.random_subset_sums.push_back(
        {"|F|=" + std::to_string(f.size()) + " in [" + std::to_string(lo) + "," +
             std::to_string(total) + "]",
         norm});
  }
  Verdict v = decide_series(std::move(probe), opts);
  if (v.kind == VerdictKind::Converges) {
    v.tail_bound = std::max(v.tail_bound, subset_max);
    v.probe.tail_estimate = v.tail_bound;
    if (subset_max >= opts.tol && v.rule == "tolerance") {
      v.kind = VerdictKind::Inconclusive;
      v.rule = "subset-sums";
      v.evidence += "; random subset sum " + fmt(subset_max) + " >= tol";
    }
  }
  return v;
}

}  // namespace qfhc
