#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfhc/criterion.hpp"
#include "qfhc/density.hpp"
#include "qfhc/logpolar.hpp"
#include "qfhc/seqspace.hpp"
#include "qfhc/shiftops.hpp"
#include "qfhc/weights.hpp"

namespace qfhc {

// eps_k = 2^{-k} or an explicit table eps_1..eps_L.
class EpsilonSchedule {
 public:
  EpsilonSchedule() = default;  // dyadic
  static EpsilonSchedule dyadic() { return EpsilonSchedule(); }
  static EpsilonSchedule table(std::vector<double> eps);

  bool is_dyadic() const { return table_.empty(); }
  const std::vector<double>& values() const { return table_; }
  // Largest k the schedule is defined for (unbounded for the dyadic rule).
  std::optional<int> length() const;

  double eps(int k) const;
  // k eps_k + sum_{j > k} eps_j; (k+1) 2^{-k} for the dyadic rule.
  double alpha(int k) const;
  double eps_sum(int k_max) const;

  bool operator==(const EpsilonSchedule&) const = default;

 private:
  std::vector<double> table_;
};

// Approximating vectors x_1, x_2, ...
class TargetSet {
 public:
  // Support in {1..s}, coordinates a+bi from {0, +-1/2} then {0, +-1/2, +-1},
  // levels (s, radius) in increasing order, zero and repeats skipped.
  static TargetSet canonical(int count);
  static TargetSet user(std::vector<CoeffVector> vectors);

  bool is_canonical() const { return canonical_; }
  const std::vector<CoeffVector>& vectors() const { return vectors_; }
  std::size_t size() const { return vectors_.size(); }
  const CoeffVector& operator[](std::size_t k) const { return vectors_[k]; }

 private:
  bool canonical_ = false;
  std::vector<CoeffVector> vectors_;
};

// Sorted (index, coefficient) pairs kept in log-polar form, so the
// candidate's far coefficients survive even where exp() underflows.
struct LogEntry {
  Index index;
  LogPolar value;
  bool operator==(const LogEntry&) const = default;
};
using LogVector = std::vector<LogEntry>;

LogVector to_log_vector(const CoeffVector& v);
// Drops coefficients that underflow.
CoeffVector materialize(const LogVector& v, Domain domain = Domain::Unilateral);
// Sum of two nonzero log-polar numbers; nullopt when they cancel.
std::optional<LogPolar> log_add(LogPolar a, LogPolar b);

// Certified bound on the tail of one scalar series beyond N.
struct TailCertificate {
  int k = 0;         // class whose eps_k it was checked against
  int target = 0;    // 1-based target index
  Index n = 0;       // chosen N for this (k, target)
  double bound = 0;  // bound on ||sum_F T^{n^q} x|| + ||sum_F S^{n^q} x|| for F in [N, inf)
  std::string majorant;
  bool certified = true;
};

struct NkSelection {
  std::vector<Index> nseq;
  std::vector<Index> raw;  // before the strictly increasing adjustment
  std::vector<TailCertificate> certificates;
  CriterionReport criterion;
  std::vector<std::string> warnings;
};

class ConstructionRefused : public std::runtime_error {
 public:
  explicit ConstructionRefused(CriterionReport report);
  const CriterionReport& report() const { return report_; }

 private:
  CriterionReport report_;
};

struct SelectOptions {
  ProbeOptions probe;
  // Explicit terms summed before the majorant takes over.
  Index scan_limit = Index{1} << 20;
};

// Minimal N_k so that both tail bounds of every x_i, i <= k, lie below
// eps_k, made strictly increasing afterwards. Lp (p >= 1) and c0 on the
// unilateral domain. Throws ConstructionRefused when the criterion check
// on the targets' basis vectors is not satisfied.
NkSelection select_Nk(const SpaceSpec& space, const WeightSeq& w, int q, const TargetSet& targets,
                      const EpsilonSchedule& schedule, const SelectOptions& opts = {});

struct ConstructionInputs {
  SpaceSpec space;
  WeightSeq weights = WeightSeq::constant(2.0);
  int q = 1;
  TargetSet targets;
  EpsilonSchedule schedule = EpsilonSchedule::dyadic();
  Index horizon = 10000;
  std::size_t support_cap = 5'000'000;
  SelectOptions select;
};

struct ConstructionPlan {
  int q = 1;
  SpaceSpec space;
  WeightSeq weights = WeightSeq::constant(2.0);
  EpsilonSchedule schedule;
  TargetSet targets;
  NkSelection selection;
  JSetFamily jsets;
  int k_classes = 0;
  Index horizon = 0;
  LogVector log_candidate;
  CoeffVector candidate;
  // ||sum_{n in J_k, n^q <= horizon} S^{n^q} x_k|| against eps_k.
  std::vector<double> block_norms;
  bool norm_bound_ok = true;
  std::vector<std::string> warnings;
};

// x = sum_{k <= K} sum_{n in J_k, n^q <= horizon} S^{n^q} x_k.
ConstructionPlan build_vector(const ConstructionInputs& in);

struct OrbitBoundCheck {
  int k;
  Index m;
  Index exponent;  // m^q
  double distance;
  double bound;    // 3 alpha_k
  bool edge;
  bool ok;
};

struct OrbitBoundReport {
  std::vector<OrbitBoundCheck> checks;
  std::size_t interior = 0;
  std::size_t edge = 0;
  std::vector<std::string> violations;
  bool passed() const { return violations.empty(); }
};

// ||T^{m^q} x - x_k|| <= 3 alpha_k for m in J_k, m^q <= horizon. Times with
// m + N_k + N_1 > horizon^{1/q} are edge times, reported but not asserted.
OrbitBoundReport verify_orbit_bound(const ConstructionPlan& plan);

// T^e applied to a log-form vector (e counts applications of op).
CoeffVector orbit_point(const OperatorSpec& op, const LogVector& x, Index e,
                        Domain domain = Domain::Unilateral);

struct HitTarget {
  enum class Kind { Ball, Modulus, ModulusBall, WeakStar };
  Kind kind = Kind::Ball;
  CoeffVector center;
  double radius = 0.0;  // ball radius, modulus threshold or weak* eps
  Index coordinate = 1; // Modulus: {y : |y_coordinate| > radius}
  std::vector<CoeffVector> functionals;

  // {y : ||y - center|| < radius}
  static HitTarget ball(CoeffVector center, double radius);
  static HitTarget modulus(Index coordinate, double threshold);
  // {y : max_i ||y_i| - |center_i|| < radius} over the center's support
  static HitTarget modulus_ball(CoeffVector center, double radius);
  static HitTarget weakstar(CoeffVector center, std::vector<CoeffVector> functionals, double eps);

  // Depends on y only through coefficient moduli.
  bool phase_blind() const { return kind == Kind::Modulus || kind == Kind::ModulusBall; }
  std::string describe() const;
};

struct OrbitEvent {
  Index n;
  Index exponent;
  double distance;  // norm distance, weak* gap or coefficient modulus
  bool hit;
};

struct HitOptions {
  enum class Mode { Linear, Powers };
  Mode mode = Mode::Linear;
  int q = 1;           // density order; also the power in Powers mode
  Index horizon = 1000;
  int workers = 1;
  bool log_events = false;
};

struct HitResult {
  HitSet hits;
  DensityEstimate density;
  GrowthBound growth;
  std::vector<OrbitEvent> events;
};

// Times n in N (n >= 1) with T^n x in U up to horizon. In Powers mode only
// exponents m^q are tried and the recorded times are those exponents.
HitResult hit_experiment(const SpaceSpec& space, const OperatorSpec& op, const LogVector& x,
                         const HitTarget& target, const HitOptions& opts);
HitResult hit_experiment(const SpaceSpec& space, const OperatorSpec& op, const CoeffVector& x,
                         const HitTarget& target, const HitOptions& opts);

// Weak* neighbourhood hit sets of a c0-built vector, one per target.
std::vector<HitResult> transfer_weakstar(const WeightSeq& w, const LogVector& x,
                                         const std::vector<CoeffVector>& functionals,
                                         const std::vector<CoeffVector>& targets, double eps,
                                         const HitOptions& opts);

}  // namespace qfhc
