#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qfhc/seqspace.hpp"

namespace qfhc {

// Strictly increasing hit times; membership is known for every n <= horizon.
class HitSet {
 public:
  HitSet() = default;
  HitSet(std::vector<Index> times, Index horizon);

  const std::vector<Index>& times() const { return times_; }
  Index horizon() const { return horizon_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  bool contains(Index n) const;
  // Number of elements <= n.
  std::size_t count_up_to(Index n) const;

  bool operator==(const HitSet&) const = default;

 private:
  std::vector<Index> times_;
  Index horizon_ = 0;
};

struct DensitySample {
  Index n;
  std::size_t count;
  double ratio;
  bool operator==(const DensitySample&) const = default;
};

struct DensityEstimate {
  int q = 1;
  double value = 0.0;
  // Set for q >= 2 when the profile grows without levelling off.
  bool diverging = false;
  Index burn_in = 1;
  std::vector<DensitySample> profile;
};

// Largest N with N^q <= horizon.
Index max_scale(Index horizon, int q);
// ceil(sqrt(Nmax)).
Index default_burn_in(Index horizon, int q);

// min over N in [burn_in, Nmax] of card{n in A : n <= N^q} / N.
DensityEstimate q_lower_density(const HitSet& a, int q, Index burn_in);
DensityEstimate q_lower_density(const HitSet& a, int q);

// min of k / n_k^{1/q} over ranks k whose time lies in [burn_in^q, horizon],
// with the right-censored term K / Nmax for the stretch after the last hit.
// The count form lies within 1/burn_in of this on the same data.
DensityEstimate q_density_via_ranks(const HitSet& a, int q, Index burn_in);
DensityEstimate q_density_via_ranks(const HitSet& a, int q);

struct GrowthBound {
  bool bounded = false;
  double constant = 0.0;  // max_k n_k / k^q when bounded
  // (k, running max of n_k / k^q) at dyadic k and at the last rank.
  std::vector<std::pair<std::size_t, double>> profile;
};

// n_k <= C k^q test: bounded when the running max of n_k/k^q over the last
// half of the ranks exceeds the first-half max by at most `slack` (relative).
GrowthBound check_growth_bound(const HitSet& a, int q, double slack = 0.25);

// Index set used by shifted_union. Residue sets give finite descriptions of
// partitions of N.
struct IndexPredicate {
  enum class Kind { All, Residues, Interval };
  Kind kind = Kind::All;
  Index modulus = 1;
  std::vector<Index> residues;
  Index lo = 0, hi = 0;

  static IndexPredicate all() { return {}; }
  static IndexPredicate residue(Index modulus, Index r);
  static IndexPredicate residue_set(Index modulus, std::vector<Index> rs);
  static IndexPredicate interval(Index lo, Index hi);

  bool contains(Index n) const;
};

struct ShiftBlock {
  IndexPredicate set;
  Index shift = 0;
};

// Union over blocks of (shift_j + A cap I_j), up to `horizon`. The blocks
// must cover 1..horizon.
HitSet shifted_union(const HitSet& a, const std::vector<ShiftBlock>& blocks, Index horizon);

struct JSetFamily {
  std::vector<Index> nseq;                 // N_1 .. N_K
  std::vector<std::vector<Index>> classes; // J_1 .. J_K up to horizon
  std::vector<Index> walk;                 // a_1, a_2, ...
  std::vector<int> labels;                 // class (1-based) of each walk step
  Index horizon = 0;
  std::vector<std::string> warnings;
};

// Dyadic walk: label(n) = v2(n) + 1 capped at K,
//   a_1 = 2 N_{label(1)},  a_n = a_{n-1} + N_{label(n)} + N_{label(n-1)},
// and J_k collects the a_n with label k.
JSetFamily generate_jsets(const std::vector<Index>& nseq, int k, Index horizon);

struct JSetReport {
  bool disjoint = true;
  bool gaps_ok = true;
  bool minimum_ok = true;
  std::vector<std::string> violations;
  // card(J_k cap [1, H]) / H
  std::vector<double> terminal_density;
  // Lower-density estimate over N in [H/2, H].
  std::vector<double> lower_density;

  bool passed() const { return disjoint && gaps_ok && minimum_ok; }
};

// Checks disjointness, |n - m| >= N_k + N_p for all distinct pairs, and
// n >= N_k on the stored prefix.
JSetReport verify_jsets(const JSetFamily& family);

// Writes "N,count,p_N" rows. Returns the CSV text.
std::string density_profile_csv(const DensityEstimate& estimate);

}  // namespace qfhc
