#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qfhc/seqspace.hpp"
#include "qfhc/shiftops.hpp"
#include "qfhc/weights.hpp"

namespace qfhc {

inline constexpr std::uint64_t kDefaultSeed = 20140921;

// Numerical stand-ins for "convergent". Every verdict is evidence gathered
// from finitely many terms and carries the data it was decided on.
struct ProbeOptions {
  double tol = 1e-8;
  double divergence_threshold = 1e6;
  int max_exp = 20;  // terms n <= 2^max_exp
  std::uint64_t seed = kDefaultSeed;
  int window = 6;                     // trailing dyadic scales inspected
  double converge_ratio = 0.9;        // block ratio for geometric decay
  double nondecay_ratio = 1.0 - 1e-6; // block ratio read as "not decaying"
  int random_subsets = 32;
  bool force_fnorm_path = false;       // skip the distinct-basis reduction
};

struct Checkpoint {
  Index m;             // 2^i
  double partial;      // partial sum (or F-norm of the partial sum) up to m
  double block;        // contribution of (m/2, m]
};

struct SubsetSum {
  std::string descriptor;
  double norm;
};

struct SeriesProbe {
  std::string path;  // "scalar", "null-sequence" or "fnorm"
  std::vector<Checkpoint> checkpoints;
  std::optional<double> tail_estimate;
  std::vector<SubsetSum> random_subset_sums;
};

enum class VerdictKind { Converges, Diverges, Inconclusive };
std::string to_string(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  double tail_bound = 0.0;    // meaningful for Converges
  double sum_estimate = 0.0;  // last partial sum plus extrapolated tail
  std::string rule;           // which classification rule fired
  std::string evidence;
  SeriesProbe probe;
};

// Classifies sum_{n>=1} a_n for a_n >= 0 from dyadic block sums.
Verdict classify_nonnegative_series(const std::function<double(Index)>& term,
                                    const ProbeOptions& opts);

// Classifies v_n -> 0 from dyadic block maxima over n = 1..count.
Verdict classify_null_sequence(const std::function<double(Index)>& value, Index count,
                               const ProbeOptions& opts);

using TermGenerator = std::function<CoeffVector(Index)>;

// Unconditional-convergence probe of sum_n terms(n) in `space`.
// l^p series whose terms sit on pairwise distinct basis indices reduce to
// the scalar series sum ||term_n||^p; c0 series of that shape reduce to
// ||term_n|| -> 0. Everything else uses F-norms of dyadic blocks plus
// seeded random finite subsets F of [2^{max_exp-1}, 2^max_exp].
Verdict series_probe(const SpaceSpec& space, const TermGenerator& terms,
                     const ProbeOptions& opts);

// Largest dyadic exponent with (2^e)^q + offset safely inside int64.
int max_exp_for_power(int q, int requested);

struct CriterionReport {
  enum class Overall { SatisfiesCriterion, FailsNumerically, Inconclusive };
  struct Entry {
    std::string label;
    Verdict verdict;
  };

  std::string description;
  int q = 1;
  std::vector<Entry> entries;
  std::vector<std::string> notes;
  Overall overall = Overall::Inconclusive;

  // SatisfiesCriterion iff every verdict converges; FailsNumerically if any
  // diverges; Inconclusive otherwise.
  void finalize();
};

std::string to_string(CriterionReport::Overall o);

// Sum T^{n^q} e_j and sum S^{n^q} e_j for every listed basis index j.
CriterionReport qfhc_check(const SpaceSpec& space, const WeightSeq& w, int q,
                           const std::vector<Index>& dense_indices,
                           const ProbeOptions& opts = {});

// sum_n e_{n^q+j} / (w_1 ... w_{n^q+j}) in l^p (scalar p-sum) or c0
// (coefficients -> 0), for each j >= 0.
CriterionReport unilateral_condition(const WeightSeq& w, const SpaceSpec& space, int q,
                                     const std::vector<Index>& j_range,
                                     const ProbeOptions& opts = {});

// Both scalar series of the bilateral condition per j in Z:
//   sum_n |w_1 ... w_{n^q+j}|^{-p}   and   sum_n |w_j ... w_{j-n^q+1}|^p,
// or in c0 the two limits (products -> infinity and -> 0).
CriterionReport bilateral_condition(const WeightSeq& w, const SpaceSpec& space, int q,
                                    const std::vector<Index>& j_range,
                                    const ProbeOptions& opts = {});

// Absolute convergence of sum_n 1/(w_1 ... w_{j+n^q}) per j.
CriterionReport weakstar_condition(const WeightSeq& w, int q, const std::vector<Index>& j_range,
                                   const ProbeOptions& opts = {});

// ||T^n e_j|| -> 0 and ||S^n e_j|| -> 0 for n <= horizon.
CriterionReport hc_check(const SpaceSpec& space, const WeightSeq& w,
                         const std::vector<Index>& dense_indices, Index horizon,
                         const ProbeOptions& opts = {});

struct SalasReport {
  bool limsup_infinite = false;
  double max_log_product = 0.0;  // log of the running max of |w_1 ... w_n|
  Index argmax = 0;
  std::string rule;
  std::vector<std::pair<Index, double>> checkpoints;  // (n, log running max)
};

// Running max of |w_1 ... w_n| up to horizon: infinite-limsup evidence when
// it crosses `threshold` or keeps climbing without geometric slowdown over
// the trailing dyadic scales.
SalasReport salas_check(const WeightSeq& w, Index horizon, double threshold = 1e6);

using IndexedTermGenerator = std::function<CoeffVector(Index basis, Index n)>;

// sum T^n(x) and sum S^n(x) with caller-provided term generators (q = 1).
CriterionReport fhc_check(const SpaceSpec& space, const IndexedTermGenerator& t_terms,
                          const IndexedTermGenerator& s_terms,
                          const std::vector<Index>& dense_indices, const ProbeOptions& opts = {},
                          std::string description = "fhc");

// fhc_check for T_mu f = f'(mu z) on monomials z^0 .. z^kmax, with S-terms
// from the closed form of S_mu^n.
CriterionReport tmu_fhc_check(Scalar mu, Index kmax, const SpaceSpec& space = SpaceSpec::entire(),
                              const ProbeOptions& opts = {});

}  // namespace qfhc
