#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qfhc/logpolar.hpp"
#include "qfhc/seqspace.hpp"

namespace qfhc {

// A weight sequence w_n together with its log-polar prefix products
//   P(n) = sum_{m=1}^{n} log w_m       (n >= 0, P(0) = 0)
//   P(n) = -sum_{m=n+1}^{0} log w_m    (n < 0, bilateral families only)
// so that P(n) - P(m) is the product over (m, n].
//
// Weights are addressed by their natural index n. For every family except
// TMu the natural index equals the storage index of the basis vector e_n.
// TMu acts on Taylor coefficients: z^n is stored at index n + 1, so its
// natural index is storage index - 1 (index_offset() == 1).
//
// Prefix products up to 2^20 are served from a lazily grown table shared by
// all copies of the sequence; beyond that the family's closed form extends
// the table.
class WeightSeq {
 public:
  enum class Family { Constant, Bergman, LogWeight, RootWeight, TMu, Table, BilateralTable };

  static constexpr Index kTableLimit = Index{1} << 20;

  static WeightSeq constant(Scalar lambda);
  // w_n = sqrt((n+1)/n)
  static WeightSeq bergman();
  // w_n = ln(n+2) / ln(n+1)
  static WeightSeq log_weight();
  // w_n = ((n+2)/(n+1))^{1/(2p)}
  static WeightSeq root_weight(int p);
  // w_n = n mu^{n-1}; the shift form of f -> f'(mu z)
  static WeightSeq tmu(Scalar mu);
  // values[i] is w_{i+1}; indices beyond the table use `fallback`.
  static WeightSeq table(std::vector<Scalar> values, Scalar fallback);
  // Explicit entries on Z; other indices use `positive` (n > 0) or
  // `nonpositive` (n <= 0).
  static WeightSeq bilateral_table(std::map<Index, Scalar> values, Scalar positive,
                                   Scalar nonpositive);

  Family family() const { return family_; }
  std::string name() const;
  std::string describe() const;

  Scalar lambda() const { return param_; }
  Scalar mu() const { return param_; }
  int root_p() const { return root_p_; }
  const std::vector<Scalar>& table_values() const { return table_; }
  Scalar fallback() const { return param_; }
  const std::map<Index, Scalar>& bilateral_values() const { return bilateral_; }
  Scalar positive_fallback() const { return param_; }
  Scalar nonpositive_fallback() const { return param2_; }

  bool supports(Domain d) const;
  Index index_offset() const { return family_ == Family::TMu ? 1 : 0; }
  Index natural_index(Index storage) const { return storage - index_offset(); }

  Scalar weight(Index n) const;
  LogPolar log_weight(Index n) const;
  LogPolar prefix(Index n) const;
  // Product of w_m over m in (from, to], as P(to) - P(from).
  LogPolar product(Index from, Index to) const;

  // Fills the cached table up to |n| (capped at kTableLimit).
  void warm(Index n) const;

  // |w_n| >= 1 for every natural index n >= 1.
  bool moduli_at_least_one() const;
  // |w_n| is nondecreasing in n (n >= 1) and >= 1.
  bool moduli_nondecreasing() const;

  bool operator==(const WeightSeq& other) const;

 private:
  struct Cache;

  WeightSeq(Family family, Scalar param, Scalar param2 = 1.0, int root_p = 1);

  LogPolar closed_increment(Index from, Index to) const;
  void check_weight_index(Index n) const;

  Family family_;
  Scalar param_;
  Scalar param2_;
  int root_p_;
  std::vector<Scalar> table_;
  std::map<Index, Scalar> bilateral_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace qfhc
