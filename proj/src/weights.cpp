#include "qfhc/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "qfhc/errors.hpp"

namespace qfhc {

struct WeightSeq::Cache {
  std::mutex mutex;
  // pos[i] = P(i), neg[i] = P(-i); both start at P(0) = 0.
  std::vector<LogPolar> pos{LogPolar{}};
  std::vector<LogPolar> neg{LogPolar{}};
  long double pos_mag = 0, pos_phase = 0;
  long double neg_mag = 0, neg_phase = 0;
};

namespace {

void require_nonzero(Scalar z, const char* what) {
  if (!(std::abs(z) > 0.0) || !std::isfinite(std::abs(z))) {
    throw InvalidArgument(std::string(what) + " must be finite and nonzero");
  }
}

std::string scalar_text(Scalar z) {
  std::ostringstream os;
  os.precision(17);
  if (z.imag() == 0.0) {
    os << z.real();
  } else {
    os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  }
  return os.str();
}

}  // namespace

WeightSeq::WeightSeq(Family family, Scalar param, Scalar param2, int root_p)
    : family_(family),
      param_(param),
      param2_(param2),
      root_p_(root_p),
      cache_(std::make_shared<Cache>()) {}

WeightSeq WeightSeq::constant(Scalar lambda) {
  require_nonzero(lambda, "constant weight");
  return WeightSeq(Family::Constant, lambda);
}

WeightSeq WeightSeq::bergman() { return WeightSeq(Family::Bergman, 1.0); }

WeightSeq WeightSeq::log_weight() { return WeightSeq(Family::LogWeight, 1.0); }

WeightSeq WeightSeq::root_weight(int p) {
  if (p < 1) throw InvalidArgument("root weight needs a positive integer p");
  return WeightSeq(Family::RootWeight, 1.0, 1.0, p);
}

WeightSeq WeightSeq::tmu(Scalar mu) {
  require_nonzero(mu, "mu");
  return WeightSeq(Family::TMu, mu);
}

WeightSeq WeightSeq::table(std::vector<Scalar> values, Scalar fallback) {
  require_nonzero(fallback, "table fallback weight");
  if (static_cast<Index>(values.size()) > kTableLimit) {
    throw InvalidArgument("weight table longer than 2^20 entries");
  }
  for (Scalar v : values) require_nonzero(v, "table weight");
  WeightSeq w(Family::Table, fallback);
  w.table_ = std::move(values);
  return w;
}

WeightSeq WeightSeq::bilateral_table(std::map<Index, Scalar> values, Scalar positive,
                                     Scalar nonpositive) {
  require_nonzero(positive, "positive fallback weight");
  require_nonzero(nonpositive, "nonpositive fallback weight");
  for (const auto& [n, v] : values) {
    require_nonzero(v, "bilateral table weight");
    if (n > kTableLimit || n < -kTableLimit) {
      throw InvalidArgument("bilateral table index beyond +-2^20");
    }
  }
  WeightSeq w(Family::BilateralTable, positive, nonpositive);
  w.bilateral_ = std::move(values);
  return w;
}

std::string WeightSeq::name() const {
  switch (family_) {
    case Family::Constant: return "constant";
    case Family::Bergman: return "bergman";
    case Family::LogWeight: return "log";
    case Family::RootWeight: return "root";
    case Family::TMu: return "tmu";
    case Family::Table: return "table";
    case Family::BilateralTable: return "bilateral_table";
  }
  return "?";
}

std::string WeightSeq::describe() const {
  switch (family_) {
    case Family::Constant: return "constant(" + scalar_text(param_) + ")";
    case Family::RootWeight: return "root(p=" + std::to_string(root_p_) + ")";
    case Family::TMu: return "tmu(mu=" + scalar_text(param_) + ")";
    case Family::Table:
      return "table(" + std::to_string(table_.size()) + " entries, fallback " +
             scalar_text(param_) + ")";
    case Family::BilateralTable:
      return "bilateral_table(" + std::to_string(bilateral_.size()) + " entries, +" +
             scalar_text(param_) + ", -" + scalar_text(param2_) + ")";
    default: return name();
  }
}

bool WeightSeq::supports(Domain d) const {
  if (d == Domain::Unilateral) return family_ != Family::BilateralTable;
  return family_ == Family::Constant || family_ == Family::BilateralTable;
}

void WeightSeq::check_weight_index(Index n) const {
  if (n < 1 && !supports(Domain::Bilateral)) {
    throw DomainMismatch(describe() + " has no weight at index " + std::to_string(n));
  }
}

Scalar WeightSeq::weight(Index n) const {
  check_weight_index(n);
  const double nd = static_cast<double>(n);
  switch (family_) {
    case Family::Constant: return param_;
    case Family::Bergman: return std::sqrt((nd + 1.0) / nd);
    case Family::LogWeight: return std::log(nd + 2.0) / std::log(nd + 1.0);
    case Family::RootWeight: return std::pow((nd + 2.0) / (nd + 1.0), 0.5 / root_p_);
    case Family::TMu: return nd * std::pow(param_, nd - 1.0);
    case Family::Table:
      return n <= static_cast<Index>(table_.size()) ? table_[static_cast<std::size_t>(n - 1)]
                                                    : param_;
    case Family::BilateralTable: {
      auto it = bilateral_.find(n);
      if (it != bilateral_.end()) return it->second;
      return n > 0 ? param_ : param2_;
    }
  }
  return 1.0;
}

LogPolar WeightSeq::log_weight(Index n) const {
  check_weight_index(n);
  const double nd = static_cast<double>(n);
  switch (family_) {
    case Family::Bergman: return {0.5 * std::log1p(1.0 / nd), 0.0};
    case Family::LogWeight:
      return {std::log(std::log(nd + 2.0)) - std::log(std::log(nd + 1.0)), 0.0};
    case Family::RootWeight: return {std::log1p(1.0 / (nd + 1.0)) / (2.0 * root_p_), 0.0};
    case Family::TMu:
      // (n-1) arg(mu), continued without wrapping.
      return {std::log(nd) + (nd - 1.0) * std::log(std::abs(param_)),
              (nd - 1.0) * std::arg(param_)};
    default: return LogPolar::from_complex(weight(n));
  }
}

LogPolar WeightSeq::closed_increment(Index from, Index to) const {
  // Only reached for |index| > kTableLimit, where table families are constant.
  const double a = static_cast<double>(from);
  const double b = static_cast<double>(to);
  const double count = b - a;
  switch (family_) {
    case Family::Constant: {
      LogPolar l = LogPolar::from_complex(param_);
      return {count * l.logmag, count * l.phase};
    }
    case Family::Bergman: return {0.5 * std::log1p(count / (a + 1.0)), 0.0};
    case Family::LogWeight:
      return {std::log(std::log(b + 2.0)) - std::log(std::log(a + 2.0)), 0.0};
    case Family::RootWeight: return {std::log1p(count / (a + 2.0)) / (2.0 * root_p_), 0.0};
    case Family::TMu: {
      const double tri = 0.5 * (b * (b - 1.0) - a * (a - 1.0));
      return {std::lgamma(b + 1.0) - std::lgamma(a + 1.0) + tri * std::log(std::abs(param_)),
              tri * std::arg(param_)};
    }
    case Family::Table: {
      LogPolar l = LogPolar::from_complex(param_);
      return {count * l.logmag, count * l.phase};
    }
    case Family::BilateralTable: {
      LogPolar l = LogPolar::from_complex(from >= 0 ? param_ : param2_);
      return {count * l.logmag, count * l.phase};
    }
  }
  return {};
}

void WeightSeq::warm(Index n) const {
  std::lock_guard lock(cache_->mutex);
  auto& live = n >= 0 ? cache_->pos : cache_->neg;
  // grow geometrically so sequential access stays linear
  const Index want = std::max<Index>(n < 0 ? -n : n, 2 * static_cast<Index>(live.size()));
  const Index target = std::min<Index>(std::max<Index>(want, 1024), kTableLimit);
  if (n >= 0) {
    auto& t = cache_->pos;
    t.reserve(static_cast<std::size_t>(target) + 1);
    while (static_cast<Index>(t.size()) <= target) {
      const LogPolar l = log_weight(static_cast<Index>(t.size()));
      cache_->pos_mag += l.logmag;
      cache_->pos_phase += l.phase;
      t.push_back({static_cast<double>(cache_->pos_mag), static_cast<double>(cache_->pos_phase)});
    }
  } else {
    auto& t = cache_->neg;
    t.reserve(static_cast<std::size_t>(target) + 1);
    while (static_cast<Index>(t.size()) <= target) {
      // P(-i) = P(-i+1) - log w_{-i+1}
      const LogPolar l = log_weight(1 - static_cast<Index>(t.size()));
      cache_->neg_mag -= l.logmag;
      cache_->neg_phase -= l.phase;
      t.push_back({static_cast<double>(cache_->neg_mag), static_cast<double>(cache_->neg_phase)});
    }
  }
}

LogPolar WeightSeq::prefix(Index n) const {
  if (n < 0 && !supports(Domain::Bilateral)) {
    throw DomainMismatch(describe() + " has no prefix product at " + std::to_string(n));
  }
  const Index mag = n < 0 ? -n : n;
  const Index capped = std::min(mag, kTableLimit);
  LogPolar base;
  {
    std::unique_lock lock(cache_->mutex);
    auto& t = n >= 0 ? cache_->pos : cache_->neg;
    if (static_cast<Index>(t.size()) <= capped) {
      lock.unlock();
      warm(n >= 0 ? capped : -capped);
      lock.lock();
    }
    base = t[static_cast<std::size_t>(capped)];
  }
  if (mag <= kTableLimit) return base;
  if (n > 0) return base * closed_increment(kTableLimit, n);
  return base / closed_increment(n, -kTableLimit);
}

LogPolar WeightSeq::product(Index from, Index to) const { return prefix(to) / prefix(from); }

bool WeightSeq::moduli_at_least_one() const {
  switch (family_) {
    case Family::Constant: return std::abs(param_) >= 1.0;
    case Family::Bergman:
    case Family::LogWeight:
    case Family::RootWeight: return true;
    case Family::TMu: return std::abs(param_) >= 1.0;
    case Family::Table:
      return std::abs(param_) >= 1.0 &&
             std::all_of(table_.begin(), table_.end(), [](Scalar v) { return std::abs(v) >= 1.0; });
    case Family::BilateralTable: return false;
  }
  return false;
}

bool WeightSeq::moduli_nondecreasing() const {
  switch (family_) {
    case Family::Constant: return std::abs(param_) >= 1.0;
    case Family::TMu: return std::abs(param_) >= 1.0;
    case Family::Table: {
      if (!moduli_at_least_one()) return false;
      double prev = 1.0;
      for (Scalar v : table_) {
        if (std::abs(v) < prev) return false;
        prev = std::abs(v);
      }
      return std::abs(param_) >= prev;
    }
    default: return false;
  }
}

bool WeightSeq::operator==(const WeightSeq& other) const {
  return family_ == other.family_ && param_ == other.param_ && param2_ == other.param2_ &&
         root_p_ == other.root_p_ && table_ == other.table_ && bilateral_ == other.bilateral_;
}

}  // namespace qfhc
