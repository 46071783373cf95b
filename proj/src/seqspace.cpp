#include "qfhc/seqspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qfhc/errors.hpp"

namespace qfhc {

std::string to_string(Domain d) {
  return d == Domain::Unilateral ? "unilateral" : "bilateral";
}

void CoeffVector::check_index(Domain domain, Index n) {
  if (domain == Domain::Unilateral && n <= 0) {
    throw InvalidArgument("unilateral vectors have no index <= 0 (got " +
                          std::to_string(n) + ")");
  }
}

CoeffVector CoeffVector::basis(Index n, Domain domain, Scalar coefficient) {
  return from_sorted(domain, {{n, coefficient}});
}

CoeffVector CoeffVector::from_entries(Domain domain, std::vector<Entry> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.index < b.index; });
  std::vector<Entry> merged;
  merged.reserve(entries.size());
  for (const Entry& e : entries) {
    if (!merged.empty() && merged.back().index == e.index) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  return from_sorted(domain, std::move(merged));
}

CoeffVector CoeffVector::from_sorted(Domain domain, std::vector<Entry> entries) {
  CoeffVector out(domain);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    check_index(domain, entries[i].index);
    if (i > 0 && entries[i].index <= entries[i - 1].index) {
      throw InvalidArgument("from_sorted: indices must be strictly increasing");
    }
  }
  std::erase_if(entries, [](const Entry& e) { return e.value == Scalar(0.0); });
  out.entries_ = std::move(entries);
  return out;
}

CoeffVector CoeffVector::from_dense(Domain domain, Index first_index,
                                    std::span<const Scalar> values) {
  std::vector<Entry> entries;
  entries.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    entries.push_back({first_index + static_cast<Index>(i), values[i]});
  }
  return from_sorted(domain, std::move(entries));
}

Scalar CoeffVector::operator[](Index n) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), n,
                             [](const Entry& e, Index k) { return e.index < k; });
  if (it != entries_.end() && it->index == n) return it->value;
  return 0.0;
}

Index CoeffVector::min_index() const {
  if (entries_.empty()) throw InvalidArgument("min_index of the zero vector");
  return entries_.front().index;
}

Index CoeffVector::max_index() const {
  if (entries_.empty()) throw InvalidArgument("max_index of the zero vector");
  return entries_.back().index;
}

CoeffVector CoeffVector::with(Index n, Scalar value) const {
  check_index(domain_, n);
  std::vector<Entry> entries = entries_;
  auto it = std::lower_bound(entries.begin(), entries.end(), n,
                             [](const Entry& e, Index k) { return e.index < k; });
  if (it != entries.end() && it->index == n) {
    it->value = value;
  } else {
    entries.insert(it, {n, value});
  }
  return from_sorted(domain_, std::move(entries));
}

namespace {

void require_same_domain(const CoeffVector& v, const CoeffVector& w) {
  if (v.domain() != w.domain()) {
    throw DomainMismatch("vector domains differ: " + to_string(v.domain()) +
                         " vs " + to_string(w.domain()));
  }
}

CoeffVector merge(const CoeffVector& v, const CoeffVector& w, Scalar w_factor) {
  require_same_domain(v, w);
  auto a = v.entries();
  auto b = w.entries();
  std::vector<CoeffVector::Entry> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].index < b[j].index)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].index < a[i].index) {
      out.push_back({b[j].index, w_factor * b[j].value});
      ++j;
    } else {
      out.push_back({a[i].index, a[i].value + w_factor * b[j].value});
      ++i;
      ++j;
    }
  }
  return CoeffVector::from_sorted(v.domain(), std::move(out));
}

}  // namespace

CoeffVector add(const CoeffVector& v, const CoeffVector& w) { return merge(v, w, 1.0); }

CoeffVector subtract(const CoeffVector& v, const CoeffVector& w) {
  return merge(v, w, -1.0);
}

CoeffVector scale(Scalar lambda, const CoeffVector& v) {
  std::vector<CoeffVector::Entry> out;
  out.reserve(v.support_size());
  for (const auto& e : v.entries()) out.push_back({e.index, lambda * e.value});
  return CoeffVector::from_sorted(v.domain(), std::move(out));
}

SpaceSpec SpaceSpec::lp(double p, Domain domain) {
  SpaceSpec s{Kind::Lp, p, 8, domain};
  s.validate();
  return s;
}

SpaceSpec SpaceSpec::c0(Domain domain) { return SpaceSpec{Kind::C0, 2.0, 8, domain}; }

SpaceSpec SpaceSpec::entire(int rmax) {
  SpaceSpec s{Kind::Entire, 2.0, rmax, Domain::Unilateral};
  s.validate();
  return s;
}

SpaceSpec SpaceSpec::linf_weakstar(Domain domain) {
  return SpaceSpec{Kind::LInfWeakStar, 2.0, 8, domain};
}

void SpaceSpec::validate() const {
  if (kind == Kind::Lp && !(p >= 1.0 && std::isfinite(p))) {
    throw InvalidArgument("l^p requires finite p >= 1");
  }
  if (kind == Kind::Entire) {
    if (rmax < 1) throw InvalidArgument("entire space requires rmax >= 1");
    if (domain != Domain::Unilateral) {
      throw InvalidArgument("entire space requires the unilateral domain");
    }
  }
}

std::string SpaceSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Lp: os << "l^" << p; break;
    case Kind::C0: os << "c0"; break;
    case Kind::Entire: os << "H(C)[rmax=" << rmax << "]"; break;
    case Kind::LInfWeakStar: os << "l^inf(weak*)"; break;
  }
  if (domain == Domain::Bilateral) os << "(Z)";
  return os.str();
}

double coefficient_majorant(const CoeffVector& f, double radius) {
  // Summed in the log domain relative to the largest term, so R^k never
  // overflows on its own.
  const double log_r = std::log(radius);
  double max_log = -INFINITY;
  std::vector<double> logs;
  logs.reserve(f.support_size());
  for (const auto& e : f.entries()) {
    const double power = static_cast<double>(e.index - 1);
    const double l = std::log(std::abs(e.value)) + power * log_r;
    logs.push_back(l);
    max_log = std::max(max_log, l);
  }
  if (logs.empty()) return 0.0;
  if (!std::isfinite(max_log)) return max_log > 0 ? INFINITY : 0.0;
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - max_log);
  return std::exp(max_log + std::log(acc));
}

double fnorm(const SpaceSpec& space, const CoeffVector& v) {
  if (space.kind == SpaceSpec::Kind::LInfWeakStar) {
    throw UnsupportedOperation("the weak* space carries no F-norm; use weakstar_gap");
  }
  if (v.domain() != space.domain) {
    throw DomainMismatch("vector domain " + to_string(v.domain()) +
                         " does not match space " + space.describe());
  }
  switch (space.kind) {
    case SpaceSpec::Kind::Lp: {
      if (space.p == 1.0) {
        double s = 0.0;
        for (const auto& e : v.entries()) s += std::abs(e.value);
        return s;
      }
      if (space.p == 2.0) {
        // Scaled accumulation avoids overflow of |v_n|^2.
        double scale_ref = 0.0;
        for (const auto& e : v.entries()) scale_ref = std::max(scale_ref, std::abs(e.value));
        if (scale_ref == 0.0 || !std::isfinite(scale_ref)) return scale_ref;
        double s = 0.0;
        for (const auto& e : v.entries()) {
          const double r = std::abs(e.value) / scale_ref;
          s += r * r;
        }
        return scale_ref * std::sqrt(s);
      }
      double scale_ref = 0.0;
      for (const auto& e : v.entries()) scale_ref = std::max(scale_ref, std::abs(e.value));
      if (scale_ref == 0.0 || !std::isfinite(scale_ref)) return scale_ref;
      double s = 0.0;
      for (const auto& e : v.entries()) s += std::pow(std::abs(e.value) / scale_ref, space.p);
      return scale_ref * std::pow(s, 1.0 / space.p);
    }
    case SpaceSpec::Kind::C0: {
      double m = 0.0;
      for (const auto& e : v.entries()) m = std::max(m, std::abs(e.value));
      return m;
    }
    case SpaceSpec::Kind::Entire: {
      double total = 0.0;
      for (int r = 1; r <= space.rmax; ++r) {
        total += std::ldexp(std::min(1.0, coefficient_majorant(v, r)), -r);
      }
      return total;
    }
    case SpaceSpec::Kind::LInfWeakStar: break;
  }
  return 0.0;
}

Scalar pairing(const CoeffVector& x, const CoeffVector& g) {
  auto a = x.entries();
  auto b = g.entries();
  Scalar s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].index < b[j].index) {
      ++i;
    } else if (b[j].index < a[i].index) {
      ++j;
    } else {
      s += a[i].value * b[j].value;
      ++i;
      ++j;
    }
  }
  return s;
}

double weakstar_gap(const CoeffVector& v, const CoeffVector& target,
                    std::span<const CoeffVector> functionals) {
  if (functionals.empty()) {
    throw InvalidArgument("weak* gap needs at least one functional");
  }
  const CoeffVector diff = subtract(v, target);
  double gap = 0.0;
  for (const auto& g : functionals) {
    if (g.domain() != diff.domain()) throw DomainMismatch("functional domain mismatch");
    gap = std::max(gap, std::abs(pairing(diff, g)));
  }
  return gap;
}

std::vector<CoeffVector> coordinate_functionals(int m, Domain domain) {
  if (m < 1) throw InvalidArgument("coordinate family needs m >= 1");
  std::vector<CoeffVector> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int i = 1; i <= m; ++i) out.push_back(CoeffVector::basis(i, domain));
  return out;
}

}  // namespace qfhc
