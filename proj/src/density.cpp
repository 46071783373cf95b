#include "qfhc/density.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "qfhc/errors.hpp"

namespace qfhc {

HitSet::HitSet(std::vector<Index> times, Index horizon)
    : times_(std::move(times)), horizon_(horizon) {
  if (horizon_ < 0) throw InvalidArgument("hit set horizon must be >= 0");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (times_[i] < 0) throw InvalidArgument("hit times must be nonnegative");
    if (i > 0 && times_[i] <= times_[i - 1]) {
      throw InvalidArgument("hit times must be strictly increasing");
    }
  }
  if (!times_.empty() && times_.back() > horizon_) {
    throw InvalidArgument("hit time beyond the horizon");
  }
}

bool HitSet::contains(Index n) const {
  return std::binary_search(times_.begin(), times_.end(), n);
}

std::size_t HitSet::count_up_to(Index n) const {
  return static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), n) -
                                  times_.begin());
}

namespace {

// base^q, saturating at the int64 maximum.
Index saturating_pow(Index base, int q) {
  Index r = 1;
  for (int i = 0; i < q; ++i) {
    if (base != 0 && r > std::numeric_limits<Index>::max() / base) {
      return std::numeric_limits<Index>::max();
    }
    r *= base;
  }
  return r;
}

void require_q(int q) {
  if (q < 1) throw InvalidArgument("q must be a positive integer");
}

}  // namespace

Index max_scale(Index horizon, int q) {
  require_q(q);
  if (horizon < 1) return 0;
  Index n = static_cast<Index>(std::floor(std::pow(static_cast<double>(horizon), 1.0 / q)));
  while (n > 0 && saturating_pow(n, q) > horizon) --n;
  while (saturating_pow(n + 1, q) <= horizon) ++n;
  return n;
}

Index default_burn_in(Index horizon, int q) {
  const Index nmax = max_scale(horizon, q);
  return std::max<Index>(1, static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(nmax)))));
}

DensityEstimate q_lower_density(const HitSet& a, int q, Index burn_in) {
  require_q(q);
  if (burn_in < 1) throw InvalidArgument("burn-in must be >= 1");
  const Index nmax = max_scale(a.horizon(), q);
  if (burn_in > nmax) {
    throw InvalidArgument("horizon " + std::to_string(a.horizon()) +
                          " is too small for burn-in " + std::to_string(burn_in) +
                          " at q=" + std::to_string(q));
  }
  DensityEstimate est;
  est.q = q;
  est.burn_in = burn_in;
  est.value = std::numeric_limits<double>::infinity();
  est.profile.reserve(static_cast<std::size_t>(nmax));
  const auto& t = a.times();
  std::size_t count = 0;
  for (Index n = 1; n <= nmax; ++n) {
    const Index limit = saturating_pow(n, q);
    while (count < t.size() && t[count] <= limit) ++count;
    const double ratio = static_cast<double>(count) / static_cast<double>(n);
    est.profile.push_back({n, count, ratio});
    if (n >= burn_in) est.value = std::min(est.value, ratio);
  }
  if (q >= 2) {
    bool nondecreasing = true;
    for (std::size_t i = static_cast<std::size_t>(burn_in); i < est.profile.size(); ++i) {
      if (est.profile[i].ratio < est.profile[i - 1].ratio) {
        nondecreasing = false;
        break;
      }
    }
    est.diverging = nondecreasing && est.profile.back().ratio >= 4.0 * est.value &&
                    est.profile.back().ratio > 0.0;
  }
  return est;
}

DensityEstimate q_lower_density(const HitSet& a, int q) {
  return q_lower_density(a, q, default_burn_in(a.horizon(), q));
}

DensityEstimate q_density_via_ranks(const HitSet& a, int q, Index burn_in) {
  require_q(q);
  if (a.empty()) throw InvalidArgument("rank form needs a nonempty hit set");
  if (burn_in < 1) throw InvalidArgument("burn-in must be >= 1");
  const Index nmax = max_scale(a.horizon(), q);
  if (nmax < 1) throw InvalidArgument("horizon too small for the rank form");
  const Index window_start = saturating_pow(burn_in, q);
  DensityEstimate est;
  est.q = q;
  est.burn_in = burn_in;
  est.value = std::numeric_limits<double>::infinity();
  const auto& t = a.times();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window_start || t[i] == 0) continue;
    const double k = static_cast<double>(i + 1);
    const double ratio = k / std::pow(static_cast<double>(t[i]), 1.0 / q);
    est.profile.push_back({static_cast<Index>(i + 1), static_cast<std::size_t>(t[i]), ratio});
    est.value = std::min(est.value, ratio);
  }
  // Censored stretch after the last hit: p_Nmax = K / Nmax.
  est.value = std::min(est.value, static_cast<double>(t.size()) / static_cast<double>(nmax));
  return est;
}

DensityEstimate q_density_via_ranks(const HitSet& a, int q) {
  return q_density_via_ranks(a, q, default_burn_in(a.horizon(), q));
}

GrowthBound check_growth_bound(const HitSet& a, int q, double slack) {
  require_q(q);
  if (a.empty()) throw InvalidArgument("growth bound needs a nonempty hit set");
  const auto& t = a.times();
  const std::size_t total = t.size();
  const std::size_t half = (total + 1) / 2;
  GrowthBound out;
  double running = 0.0;
  double first_half_max = 0.0;
  std::size_t next_report = 1;
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t k = i + 1;
    const double kq = std::pow(static_cast<double>(k), q);
    running = std::max(running, static_cast<double>(t[i]) / kq);
    if (k == half) first_half_max = running;
    if (k == next_report || k == total) {
      out.profile.emplace_back(k, running);
      if (k == next_report) next_report *= 2;
    }
  }
  out.constant = running;
  out.bounded = running <= first_half_max * (1.0 + slack);
  return out;
}

IndexPredicate IndexPredicate::residue(Index modulus, Index r) {
  return residue_set(modulus, {r});
}

IndexPredicate IndexPredicate::residue_set(Index modulus, std::vector<Index> rs) {
  if (modulus < 1) throw InvalidArgument("residue modulus must be >= 1");
  for (Index& r : rs) r = ((r % modulus) + modulus) % modulus;
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  IndexPredicate p;
  p.kind = Kind::Residues;
  p.modulus = modulus;
  p.residues = std::move(rs);
  return p;
}

IndexPredicate IndexPredicate::interval(Index lo, Index hi) {
  IndexPredicate p;
  p.kind = Kind::Interval;
  p.lo = lo;
  p.hi = hi;
  return p;
}

bool IndexPredicate::contains(Index n) const {
  switch (kind) {
    case Kind::All: return true;
    case Kind::Residues: {
      const Index r = ((n % modulus) + modulus) % modulus;
      return std::binary_search(residues.begin(), residues.end(), r);
    }
    case Kind::Interval: return n >= lo && n <= hi;
  }
  return false;
}

HitSet shifted_union(const HitSet& a, const std::vector<ShiftBlock>& blocks, Index horizon) {
  if (blocks.empty()) throw InvalidArgument("shifted_union needs at least one block");
  if (horizon > a.horizon()) {
    throw InvalidArgument("shifted_union horizon exceeds the hit set horizon");
  }
  for (const auto& b : blocks) {
    if (b.shift < 0) throw InvalidArgument("block shifts must be >= 0");
  }
  for (Index n = 1; n <= horizon; ++n) {
    const bool covered = std::any_of(blocks.begin(), blocks.end(),
                                     [n](const ShiftBlock& b) { return b.set.contains(n); });
    if (!covered) {
      throw InvalidArgument("blocks do not cover N: index " + std::to_string(n) + " is missing");
    }
  }
  std::vector<Index> out;
  for (Index x : a.times()) {
    for (const auto& b : blocks) {
      if (b.set.contains(x) && x + b.shift <= horizon) out.push_back(x + b.shift);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return HitSet(std::move(out), horizon);
}

JSetFamily generate_jsets(const std::vector<Index>& nseq, int k, Index horizon) {
  if (k < 1) throw InvalidArgument("generate_jsets needs K >= 1");
  if (static_cast<int>(nseq.size()) < k) {
    throw InvalidArgument("generate_jsets needs at least K values of N_k");
  }
  for (int i = 0; i < k; ++i) {
    if (nseq[static_cast<std::size_t>(i)] < 1) {
      throw InvalidArgument("N_k must be positive integers");
    }
    if (i > 0 && nseq[static_cast<std::size_t>(i)] <= nseq[static_cast<std::size_t>(i - 1)]) {
      throw InvalidArgument("N_k must be strictly increasing");
    }
  }
  JSetFamily fam;
  fam.nseq.assign(nseq.begin(), nseq.begin() + k);
  fam.classes.resize(static_cast<std::size_t>(k));
  fam.horizon = horizon;
  auto label = [k](std::uint64_t n) {
    return std::min(std::countr_zero(n) + 1, k);
  };
  auto big_n = [&fam](int cls) { return fam.nseq[static_cast<std::size_t>(cls - 1)]; };
  Index a = 2 * big_n(label(1));
  int prev = label(1);
  for (std::uint64_t n = 1; a <= horizon; ++n) {
    if (n > 1) {
      const int cur = label(n);
      a += big_n(cur) + big_n(prev);
      prev = cur;
      if (a > horizon) break;
    }
    fam.walk.push_back(a);
    fam.labels.push_back(prev);
    fam.classes[static_cast<std::size_t>(prev - 1)].push_back(a);
  }
  if (!fam.walk.empty()) {
    const double slope = static_cast<double>(fam.walk.back()) / static_cast<double>(fam.walk.size());
    if (slope > 10.0 * 2.0 * static_cast<double>(fam.nseq.front())) {
      std::ostringstream os;
      os << "walk growth a_n/n = " << slope << " exceeds 10*(2 N_1); class densities degraded";
      fam.warnings.push_back(os.str());
    }
  }
  return fam;
}

JSetReport verify_jsets(const JSetFamily& fam) {
  JSetReport rep;
  const std::size_t k = fam.classes.size();
  auto note = [&rep](std::string s) {
    if (rep.violations.size() < 64) rep.violations.push_back(std::move(s));
  };
  std::vector<std::pair<Index, std::size_t>> all;
  for (std::size_t c = 0; c < k; ++c) {
    const Index nk = fam.nseq.at(c);
    const auto& cls = fam.classes[c];
    for (std::size_t i = 0; i < cls.size(); ++i) {
      if (i > 0 && cls[i] <= cls[i - 1]) {
        rep.gaps_ok = false;
        note("J_" + std::to_string(c + 1) + " is not strictly increasing at " + std::to_string(cls[i]));
      }
      if (cls[i] < nk) {
        rep.minimum_ok = false;
        note("J_" + std::to_string(c + 1) + " element " + std::to_string(cls[i]) + " < N_" +
             std::to_string(c + 1) + " = " + std::to_string(nk));
      }
      all.emplace_back(cls[i], c);
    }
  }
  std::sort(all.begin(), all.end());
  // Pairwise gap condition |y - x| >= N(x) + N(y) for x < y is equivalent to
  // y - N(y) >= max_{x < y} (x + N(x)).
  Index reach = std::numeric_limits<Index>::min();
  std::size_t reach_at = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto [y, cy] = all[i];
    if (i > 0 && all[i - 1].first == y) {
      rep.disjoint = false;
      note("element " + std::to_string(y) + " lies in J_" + std::to_string(all[i - 1].second + 1) +
           " and J_" + std::to_string(cy + 1));
      continue;
    }
    const Index ny = fam.nseq[cy];
    if (i > 0 && y - ny < reach) {
      rep.gaps_ok = false;
      const auto [x, cx] = all[reach_at];
      note("gap |" + std::to_string(y) + " - " + std::to_string(x) + "| < N_" +
           std::to_string(cy + 1) + " + N_" + std::to_string(cx + 1));
    }
    const Index r = y + ny;
    if (i == 0 || r > reach) {
      reach = r;
      reach_at = i;
    }
  }
  const Index h = std::max<Index>(fam.horizon, 1);
  for (std::size_t c = 0; c < k; ++c) {
    const auto& cls = fam.classes[c];
    rep.terminal_density.push_back(static_cast<double>(cls.size()) / static_cast<double>(h));
    std::vector<Index> within;
    for (Index x : cls) {
      if (x <= h) within.push_back(x);
    }
    const HitSet hs(std::move(within), h);
    rep.lower_density.push_back(q_lower_density(hs, 1, std::max<Index>(1, (h + 1) / 2)).value);
  }
  return rep;
}

std::string density_profile_csv(const DensityEstimate& estimate) {
  std::string out = "N,count,p_N\n";
  char buf[96];
  for (const auto& s : estimate.profile) {
    std::snprintf(buf, sizeof buf, "%lld,%zu,%.17g\n", static_cast<long long>(s.n), s.count,
                  s.ratio);
    out += buf;
  }
  return out;
}

}  // namespace qfhc
