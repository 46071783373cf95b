#include "qfhc/shiftops.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qfhc/errors.hpp"

namespace qfhc {

namespace {

// rotation^steps for a unit-modulus rotation, as a pure phase.
Scalar rotation_factor(Scalar rotation, Index steps) {
  const double phase = static_cast<double>(steps) * std::arg(rotation);
  return LogPolar{0.0, phase}.to_complex();
}

void require_domain(const WeightSeq& w, Domain d) {
  if (!w.supports(d)) {
    throw DomainMismatch(w.describe() + " is not defined on the " + to_string(d) + " domain");
  }
}

}  // namespace

OperatorSpec OperatorSpec::rotated(Scalar lambda) const {
  OperatorSpec out = *this;
  out.rotation = lambda;
  out.validate();
  return out;
}

OperatorSpec OperatorSpec::powered(int p) const {
  OperatorSpec out = *this;
  out.power = p;
  out.validate();
  return out;
}

void OperatorSpec::validate() const {
  if (std::abs(std::abs(rotation) - 1.0) > 1e-12) {
    throw InvalidArgument("rotation must have modulus 1");
  }
  if (power < 1) throw InvalidArgument("operator power must be >= 1");
}

std::string OperatorSpec::describe() const {
  std::ostringstream os;
  if (rotation != Scalar(1.0)) os << "(" << rotation.real() << "+" << rotation.imag() << "i)*";
  os << (direction == Direction::Backward ? "B[" : "S[") << base.describe() << "]";
  if (power != 1) os << "^" << power;
  return os.str();
}

CoeffVector apply(const OperatorSpec& op, const CoeffVector& v) {
  op.validate();
  require_domain(op.base, v.domain());
  const bool unilateral = v.domain() == Domain::Unilateral;
  CoeffVector cur = v;
  for (int step = 0; step < op.power; ++step) {
    std::vector<CoeffVector::Entry> out;
    out.reserve(cur.support_size());
    for (const auto& e : cur.entries()) {
      if (op.direction == Direction::Backward) {
        const Index target = e.index - 1;
        if (unilateral && target <= 0) continue;
        out.push_back({target, e.value * op.base.weight(op.base.natural_index(e.index))});
      } else {
        const Index target = e.index + 1;
        out.push_back({target, e.value / op.base.weight(op.base.natural_index(target))});
      }
    }
    cur = CoeffVector::from_sorted(v.domain(), std::move(out));
  }
  if (op.rotation != Scalar(1.0)) cur = scale(rotation_factor(op.rotation, op.power), cur);
  return cur;
}

CoeffVector iterate(const OperatorSpec& op, const CoeffVector& v, Index n, Index horizon_cap) {
  op.validate();
  require_domain(op.base, v.domain());
  if (n < 0) throw InvalidArgument("iterate needs N >= 0");
  if (n == 0) return v;
  if (n > horizon_cap / op.power) {
    throw ResourceLimit("iterate: N * power = " + std::to_string(n) + " * " +
                        std::to_string(op.power) + " exceeds the horizon cap " +
                        std::to_string(horizon_cap));
  }
  const Index steps = n * op.power;
  const bool unilateral = v.domain() == Domain::Unilateral;
  const Scalar rot = rotation_factor(op.rotation, steps);
  std::vector<CoeffVector::Entry> out;
  out.reserve(v.support_size());
  for (const auto& e : v.entries()) {
    const Index nat = op.base.natural_index(e.index);
    if (op.direction == Direction::Backward) {
      const Index target = e.index - steps;
      if (unilateral && target <= 0) continue;
      const LogPolar mult = op.base.prefix(nat) / op.base.prefix(nat - steps);
      out.push_back({target, e.value * mult.to_complex() * rot});
    } else {
      const LogPolar mult = op.base.prefix(nat) / op.base.prefix(nat + steps);
      out.push_back({e.index + steps, e.value * mult.to_complex() * rot});
    }
  }
  return CoeffVector::from_sorted(v.domain(), std::move(out));
}

LogPolar forward_coefficient(const WeightSeq& w, Index k, Index n) {
  const Index nat = w.natural_index(k);
  return w.prefix(nat) / w.prefix(nat + n);
}

LogPolar backward_coefficient(const WeightSeq& w, Index k, Index n) {
  const Index nat = w.natural_index(k);
  return w.prefix(nat) / w.prefix(nat - n);
}

CoeffVector forward_iterate(const WeightSeq& w, Index k, Index n, Domain domain) {
  if (n < 1) throw InvalidArgument("forward_iterate needs N >= 1");
  require_domain(w, domain);
  return CoeffVector::basis(k + n, domain, forward_coefficient(w, k, n).to_complex());
}

CoeffVector tmu_apply(Scalar mu, const CoeffVector& f) {
  if (f.domain() != Domain::Unilateral) {
    throw DomainMismatch("tmu_apply expects Taylor coefficients (unilateral)");
  }
  std::vector<CoeffVector::Entry> out;
  out.reserve(f.support_size());
  for (const auto& e : f.entries()) {
    const Index k = e.index - 1;  // power of z
    if (k == 0) continue;
    const double kd = static_cast<double>(k);
    out.push_back({e.index - 1, kd * std::pow(mu, kd - 1.0) * e.value});
  }
  return CoeffVector::from_sorted(Domain::Unilateral, std::move(out));
}

LogPolar smu_power_coefficient(Scalar mu, Index k, Index n) {
  if (k < 0 || n < 1) throw InvalidArgument("smu_power_basis needs k >= 0, n >= 1");
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  const double exponent = nd * kd + 0.5 * nd * (nd - 1.0);
  return {std::lgamma(kd + 1.0) - std::lgamma(kd + nd + 1.0) - exponent * std::log(std::abs(mu)),
          -exponent * std::arg(mu)};
}

CoeffVector smu_power_basis(Scalar mu, Index k, Index n) {
  return CoeffVector::basis(k + n + 1, Domain::Unilateral,
                            smu_power_coefficient(mu, k, n).to_complex());
}

}  // namespace qfhc
