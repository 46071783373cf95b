#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "qfhc/constructor.hpp"
#include "qfhc/errors.hpp"

namespace qfhc {

EpsilonSchedule EpsilonSchedule::table(std::vector<double> eps) {
  if (eps.empty()) throw InvalidArgument("epsilon table is empty");
  for (double e : eps) {
    if (!(e > 0.0) || !std::isfinite(e)) throw InvalidArgument("epsilon values must be positive");
  }
  EpsilonSchedule s;
  s.table_ = std::move(eps);
  return s;
}

std::optional<int> EpsilonSchedule::length() const {
  if (is_dyadic()) return std::nullopt;
  return static_cast<int>(table_.size());
}

double EpsilonSchedule::eps(int k) const {
  if (k < 1) throw InvalidArgument("epsilon index starts at 1");
  if (is_dyadic()) return std::ldexp(1.0, -k);
  if (k > static_cast<int>(table_.size())) {
    throw InvalidArgument("epsilon table has no entry " + std::to_string(k));
  }
  return table_[static_cast<std::size_t>(k - 1)];
}

double EpsilonSchedule::alpha(int k) const {
  if (k < 1) throw InvalidArgument("alpha index starts at 1");
  if (is_dyadic()) return (k + 1) * std::ldexp(1.0, -k);
  double tail = 0.0;
  for (std::size_t j = static_cast<std::size_t>(k); j < table_.size(); ++j) tail += table_[j];
  return k * eps(k) + tail;
}

double EpsilonSchedule::eps_sum(int k_max) const {
  double s = 0.0;
  for (int k = 1; k <= k_max; ++k) s += eps(k);
  return s;
}

TargetSet TargetSet::canonical(int count) {
  if (count < 1) throw InvalidArgument("canonical target count must be >= 1");
  const std::vector<double> half = {0.0, 0.5, -0.5};
  const std::vector<double> one = {0.0, 0.5, -0.5, 1.0, -1.0};
  TargetSet out;
  out.canonical_ = true;
  std::set<std::vector<std::pair<Index, std::pair<double, double>>>> seen;
  for (int s = 1; static_cast<int>(out.vectors_.size()) < count; ++s) {
    for (const auto* parts : {&half, &one}) {
      std::vector<Scalar> grid;
      for (double b : *parts) {
        for (double a : *parts) grid.emplace_back(a, b);
      }
      std::vector<std::size_t> digit(static_cast<std::size_t>(s), 0);
      while (static_cast<int>(out.vectors_.size()) < count) {
        // Advance the odometer, coordinate 1 fastest.
        std::size_t i = 0;
        while (i < digit.size() && ++digit[i] == grid.size()) digit[i++] = 0;
        if (i == digit.size()) break;
        std::vector<CoeffVector::Entry> e;
        std::vector<std::pair<Index, std::pair<double, double>>> key;
        for (std::size_t c = 0; c < digit.size(); ++c) {
          const Scalar v = grid[digit[c]];
          if (v == Scalar(0.0)) continue;
          e.push_back({static_cast<Index>(c + 1), v});
          key.push_back({static_cast<Index>(c + 1), {v.real(), v.imag()}});
        }
        if (!seen.insert(key).second) continue;
        out.vectors_.push_back(CoeffVector::from_sorted(Domain::Unilateral, std::move(e)));
      }
      if (static_cast<int>(out.vectors_.size()) >= count) break;
    }
  }
  return out;
}

TargetSet TargetSet::user(std::vector<CoeffVector> vectors) {
  if (vectors.empty()) throw InvalidArgument("target list is empty");
  for (const auto& v : vectors) {
    if (v.empty()) throw InvalidArgument("targets must be nonzero");
  }
  TargetSet out;
  out.vectors_ = std::move(vectors);
  return out;
}

LogVector to_log_vector(const CoeffVector& v) {
  LogVector out;
  out.reserve(v.support_size());
  for (const auto& e : v.entries()) out.push_back({e.index, LogPolar::from_complex(e.value)});
  return out;
}

CoeffVector materialize(const LogVector& v, Domain domain) {
  std::vector<CoeffVector::Entry> e;
  e.reserve(v.size());
  for (const auto& x : v) e.push_back({x.index, x.value.to_complex()});
  return CoeffVector::from_sorted(domain, std::move(e));
}

std::optional<LogPolar> log_add(LogPolar a, LogPolar b) {
  if (b.logmag > a.logmag) std::swap(a, b);
  // a + b = a (1 + b/a), with |b/a| <= 1.
  const std::complex<double> ratio = (b / a).to_complex();
  const std::complex<double> f = 1.0 + ratio;
  // cancellation down to rounding level of the inputs is an exact zero
  if (std::abs(f) <= 4.0 * std::numeric_limits<double>::epsilon()) return std::nullopt;
  return LogPolar{a.logmag + std::log(std::abs(f)), a.phase + std::arg(f)};
}

HitTarget HitTarget::ball(CoeffVector center, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("ball radius must be positive");
  HitTarget t;
  t.kind = Kind::Ball;
  t.center = std::move(center);
  t.radius = radius;
  return t;
}

HitTarget HitTarget::modulus(Index coordinate, double threshold) {
  if (coordinate < 1) throw InvalidArgument("modulus coordinate must be >= 1");
  HitTarget t;
  t.kind = Kind::Modulus;
  t.coordinate = coordinate;
  t.radius = threshold;
  return t;
}

HitTarget HitTarget::modulus_ball(CoeffVector center, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("modulus-ball radius must be positive");
  if (center.empty()) throw InvalidArgument("modulus-ball center must be nonzero");
  HitTarget t;
  t.kind = Kind::ModulusBall;
  t.center = std::move(center);
  t.radius = radius;
  return t;
}

HitTarget HitTarget::weakstar(CoeffVector center, std::vector<CoeffVector> functionals,
                              double eps) {
  if (functionals.empty()) throw InvalidArgument("weak* neighbourhood needs functionals");
  if (!(eps > 0.0)) throw InvalidArgument("weak* eps must be positive");
  HitTarget t;
  t.kind = Kind::WeakStar;
  t.center = std::move(center);
  t.functionals = std::move(functionals);
  t.radius = eps;
  return t;
}

std::string HitTarget::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Ball: os << "ball(r=" << radius << ")"; break;
    case Kind::Modulus: os << "|y_" << coordinate << "| > " << radius; break;
    case Kind::ModulusBall: os << "modulus-ball(r=" << radius << ")"; break;
    case Kind::WeakStar:
      os << "weak*(m=" << functionals.size() << ", eps=" << radius << ")";
      break;
  }
  return os.str();
}

}  // namespace qfhc
