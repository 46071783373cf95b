#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qfhc {

using Index = std::int64_t;
using Scalar = std::complex<double>;

enum class Domain { Unilateral, Bilateral };

std::string to_string(Domain d);

// Finitely supported coefficient vector over N (indices >= 1, e_0 = 0) or Z.
//
// Entries are kept sorted by index with no stored zeros, so two vectors
// describing the same element compare equal.
class CoeffVector {
 public:
  struct Entry {
    Index index;
    Scalar value;
    bool operator==(const Entry&) const = default;
  };

  explicit CoeffVector(Domain domain = Domain::Unilateral) : domain_(domain) {}

  static CoeffVector basis(Index n, Domain domain = Domain::Unilateral,
                           Scalar coefficient = 1.0);

  // Duplicate indices are summed; zeros are dropped.
  static CoeffVector from_entries(Domain domain, std::vector<Entry> entries);

  // Entries must already be strictly increasing in index. Zeros are dropped.
  static CoeffVector from_sorted(Domain domain, std::vector<Entry> entries);

  // Consecutive coefficients starting at `first_index`.
  static CoeffVector from_dense(Domain domain, Index first_index,
                                std::span<const Scalar> values);

  Domain domain() const { return domain_; }
  std::span<const Entry> entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Coefficient at `n` (zero when outside the support).
  Scalar operator[](Index n) const;

  Index min_index() const;
  Index max_index() const;

  // Returns a copy with the coefficient at `n` replaced (zero removes it).
  CoeffVector with(Index n, Scalar value) const;

  bool operator==(const CoeffVector&) const = default;

 private:
  static void check_index(Domain domain, Index n);

  Domain domain_;
  std::vector<Entry> entries_;
};

CoeffVector add(const CoeffVector& v, const CoeffVector& w);
CoeffVector subtract(const CoeffVector& v, const CoeffVector& w);
CoeffVector scale(Scalar lambda, const CoeffVector& v);

// Ambient space carrying the F-norm. Build through the factories, which
// validate the parameters.
struct SpaceSpec {
  enum class Kind { Lp, C0, Entire, LInfWeakStar };

  Kind kind = Kind::Lp;
  double p = 2.0;
  int rmax = 8;
  Domain domain = Domain::Unilateral;

  static SpaceSpec lp(double p, Domain domain = Domain::Unilateral);
  static SpaceSpec c0(Domain domain = Domain::Unilateral);
  static SpaceSpec entire(int rmax = 8);
  static SpaceSpec linf_weakstar(Domain domain = Domain::Unilateral);

  void validate() const;
  std::string describe() const;
  bool operator==(const SpaceSpec&) const = default;
};

// ||v|| in the given space. The entire-function norm is
//   sum_{R=1}^{rmax} 2^{-R} min(1, M_R(v)),  M_R(v) = sum_k |a_k| R^k,
// with the Taylor coefficient of z^k stored at index k + 1.
double fnorm(const SpaceSpec& space, const CoeffVector& v);

// Coefficient majorant M_R of sup_{|z| <= R} |f(z)|.
double coefficient_majorant(const CoeffVector& f, double radius);

// <x, g> = sum_n x_n g_n (bilinear, no conjugation).
Scalar pairing(const CoeffVector& x, const CoeffVector& g);

// max_i |<v - target, g_i>|. A weak* neighbourhood test is gap < eps.
double weakstar_gap(const CoeffVector& v, const CoeffVector& target,
                    std::span<const CoeffVector> functionals);

// e_1^*, ..., e_m^* as finitely supported l^1 elements.
std::vector<CoeffVector> coordinate_functionals(int m,
                                                Domain domain = Domain::Unilateral);

}  // namespace qfhc
