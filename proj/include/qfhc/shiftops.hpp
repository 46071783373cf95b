#pragma once

#include <string>

#include "qfhc/logpolar.hpp"
#include "qfhc/seqspace.hpp"
#include "qfhc/weights.hpp"

namespace qfhc {

enum class Direction {
  Backward,        // B_w(e_n) = w_n e_{n-1}, unilateral e_0 = 0
  ForwardInverse,  // S_w(e_n) = e_{n+1} / w_{n+1}, so B_w S_w = I
};

// (lambda T)^p with T the shift in `direction`. Composition order is fixed
// as (lambda T)^p = lambda^p T^p.
struct OperatorSpec {
  WeightSeq base;
  Direction direction = Direction::Backward;
  Scalar rotation = 1.0;
  int power = 1;

  static OperatorSpec backward(WeightSeq w) { return {std::move(w)}; }
  static OperatorSpec forward(WeightSeq w) {
    return {std::move(w), Direction::ForwardInverse};
  }
  OperatorSpec rotated(Scalar lambda) const;
  OperatorSpec powered(int p) const;

  void validate() const;
  std::string describe() const;
};

inline constexpr Index kDefaultHorizonCap = Index{1} << 50;

// One application of the operator (the shift applied `power` times, then
// multiplied by rotation^power). Uses direct complex weights.
CoeffVector apply(const OperatorSpec& op, const CoeffVector& v);

// N applications, computed in one step per support element from prefix
// products. Throws ResourceLimit when N * power exceeds `horizon_cap`.
CoeffVector iterate(const OperatorSpec& op, const CoeffVector& v, Index n,
                    Index horizon_cap = kDefaultHorizonCap);

// Log-polar coefficient c with S_w^N e_k = c e_{k+N}, k a storage index.
LogPolar forward_coefficient(const WeightSeq& w, Index k, Index n);
// Log-polar coefficient c with B_w^N e_k = c e_{k-N} (requires k - N >= 1
// unilaterally).
LogPolar backward_coefficient(const WeightSeq& w, Index k, Index n);

// S_w^N e_k = e_{k+N} / (w_{k+1} ... w_{k+N}).
CoeffVector forward_iterate(const WeightSeq& w, Index k, Index n,
                            Domain domain = Domain::Unilateral);

// f -> f'(mu z) on Taylor coefficients (z^k stored at index k + 1).
CoeffVector tmu_apply(Scalar mu, const CoeffVector& f);

// S_mu^n(z^k) = k! z^{k+n} / ((k+n)! mu^{nk + n(n-1)/2}), where
// S_mu f(z) = mu * integral_0^{z/mu} f.
CoeffVector smu_power_basis(Scalar mu, Index k, Index n);
LogPolar smu_power_coefficient(Scalar mu, Index k, Index n);

}  // namespace qfhc
