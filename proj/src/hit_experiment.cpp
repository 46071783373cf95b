#include <algorithm>
#include <cmath>
#include <thread>

#include "qfhc/constructor.hpp"
#include "qfhc/errors.hpp"

namespace qfhc {

namespace {

struct Probe {
  double distance;
  bool hit;
};

Probe evaluate(const SpaceSpec& space, const HitTarget& t, const CoeffVector& y) {
  switch (t.kind) {
    case HitTarget::Kind::Ball: {
      const double d = fnorm(space, subtract(y, t.center));
      return {d, d < t.radius};
    }
    case HitTarget::Kind::Modulus: {
      const double d = std::abs(y[t.coordinate]);
      return {d, d > t.radius};
    }
    case HitTarget::Kind::ModulusBall: {
      double d = 0.0;
      for (const auto& e : t.center.entries()) {
        d = std::max(d, std::abs(std::abs(y[e.index]) - std::abs(e.value)));
      }
      return {d, d < t.radius};
    }
    case HitTarget::Kind::WeakStar: {
      const double d = weakstar_gap(y, t.center, t.functionals);
      return {d, d < t.radius};
    }
  }
  return {0.0, false};
}

}  // namespace

HitResult hit_experiment(const SpaceSpec& space, const OperatorSpec& op, const LogVector& x,
                         const HitTarget& target, const HitOptions& opts) {
  op.validate();
  if (opts.horizon < 1) throw InvalidArgument("hit experiment horizon must be >= 1");
  if (opts.q < 1) throw InvalidArgument("q must be >= 1");
  if (opts.workers < 1) throw InvalidArgument("workers must be >= 1");
  if (target.kind == HitTarget::Kind::WeakStar && target.functionals.empty()) {
    throw InvalidArgument("weak* neighbourhood needs functionals");
  }

  std::vector<Index> exponents;
  if (opts.mode == HitOptions::Mode::Linear) {
    exponents.resize(static_cast<std::size_t>(opts.horizon));
    for (Index n = 1; n <= opts.horizon; ++n) exponents[static_cast<std::size_t>(n - 1)] = n;
  } else {
    const Index top = max_scale(opts.horizon, opts.q);
    for (Index m = 1; m <= top; ++m) {
      Index e = 1;
      for (int i = 0; i < opts.q; ++i) e *= m;
      exponents.push_back(e);
    }
  }

  // A unimodular factor lambda^n leaves every modulus unchanged, so
  // phase-blind targets are tested on the unrotated orbit.
  OperatorSpec effective = op;
  if (target.phase_blind()) effective.rotation = 1.0;

  const std::size_t count = exponents.size();
  std::vector<Probe> probes(count);
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(opts.workers), std::max<std::size_t>(count, 1));
  auto run = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      probes[i] = evaluate(space, target, orbit_point(effective, x, exponents[i], space.domain));
    }
  };
  if (workers <= 1) {
    run(0, count);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(count, lo + chunk);
      if (lo < hi) pool.emplace_back(run, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  HitResult out;
  std::vector<Index> times;
  for (std::size_t i = 0; i < count; ++i) {
    if (probes[i].hit) times.push_back(exponents[i]);
    if (opts.log_events) {
      const Index n = opts.mode == HitOptions::Mode::Linear ? exponents[i] : static_cast<Index>(i + 1);
      out.events.push_back({n, exponents[i], probes[i].distance, probes[i].hit});
    }
  }
  out.hits = HitSet(std::move(times), opts.horizon);
  out.density = q_lower_density(out.hits, opts.q);
  if (!out.hits.empty()) out.growth = check_growth_bound(out.hits, opts.q);
  return out;
}

HitResult hit_experiment(const SpaceSpec& space, const OperatorSpec& op, const CoeffVector& x,
                         const HitTarget& target, const HitOptions& opts) {
  return hit_experiment(space, op, to_log_vector(x), target, opts);
}

std::vector<HitResult> transfer_weakstar(const WeightSeq& w, const LogVector& x,
                                         const std::vector<CoeffVector>& functionals,
                                         const std::vector<CoeffVector>& targets, double eps,
                                         const HitOptions& opts) {
  if (functionals.empty()) throw InvalidArgument("transfer_weakstar needs functionals");
  if (targets.empty()) throw InvalidArgument("transfer_weakstar needs targets");
  // Same coefficient data read in l^inf: the embedding c0 -> l^inf is the identity.
  const SpaceSpec space = SpaceSpec::linf_weakstar();
  const OperatorSpec op = OperatorSpec::backward(w);
  std::vector<HitResult> out;
  for (const auto& t : targets) {
    out.push_back(hit_experiment(space, op, x, HitTarget::weakstar(t, functionals, eps), opts));
  }
  return out;
}

}  // namespace qfhc
