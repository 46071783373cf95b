#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qfhc/errors.hpp"
#include "qfhc/shiftops.hpp"

using namespace qfhc;

namespace {

CoeffVector e(Index n, Scalar c = 1.0) { return CoeffVector::basis(n, Domain::Unilateral, c); }

bool close(Scalar a, Scalar b, double rel) {
  return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
}

bool same_support_close(const CoeffVector& a, const CoeffVector& b, double rel) {
  if (a.support_size() != b.support_size()) return false;
  for (std::size_t i = 0; i < a.support_size(); ++i) {
    if (a.entries()[i].index != b.entries()[i].index) return false;
    if (!close(a.entries()[i].value, b.entries()[i].value, rel)) return false;
  }
  return true;
}

std::vector<WeightSeq> families() {
  return {WeightSeq::constant(2.0),
          WeightSeq::constant(Scalar(0.0, 1.5)),
          WeightSeq::bergman(),
          WeightSeq::log_weight(),
          WeightSeq::root_weight(2),
          WeightSeq::tmu(1.5),
          WeightSeq::tmu(Scalar(1.0, 1.0)),
          WeightSeq::table({2.0, 0.5, 3.0}, 1.25)};
}

CoeffVector random_vector(std::mt19937_64& rng, Index lo, Index hi, Domain d = Domain::Unilateral) {
  std::uniform_int_distribution<Index> idx(lo, hi);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<CoeffVector::Entry> en;
  for (int i = 0; i < 10; ++i) en.push_back({idx(rng), Scalar(u(rng), u(rng))});
  return CoeffVector::from_entries(d, en);
}

// TMu products overflow double near index 90; keep test vectors in range
Index top_index(const WeightSeq& w, Index hi) {
  return w.family() == WeightSeq::Family::TMu ? 25 : hi;
}

}  // namespace

TEST_CASE("apply examples") {
  const auto c2 = OperatorSpec::backward(WeightSeq::constant(2.0));
  CHECK(apply(c2, e(2)) == e(1, 2.0));
  CHECK(apply(OperatorSpec::backward(WeightSeq::bergman()), e(1)).empty());
  const auto b = CoeffVector::basis(0, Domain::Bilateral);
  CHECK(apply(c2, b) == CoeffVector::basis(-1, Domain::Bilateral, 2.0));
  CHECK_THROWS_AS(apply(OperatorSpec::backward(WeightSeq::bergman()), b), DomainMismatch);
}

TEST_CASE("iterate examples") {
  const auto v = iterate(OperatorSpec::backward(WeightSeq::bergman()), e(5), 3);
  REQUIRE(v.support_size() == 1);
  CHECK(v.entries()[0].index == 2);
  CHECK(v[2].real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  const auto x = add(e(3, 2.0), e(7, Scalar(0, 1)));
  CHECK(iterate(OperatorSpec::backward(WeightSeq::log_weight()), x, 0) == x);
  CHECK(iterate(OperatorSpec::backward(WeightSeq::constant(2.0)), e(1), 1).empty());
  CHECK_THROWS_AS(iterate(OperatorSpec::backward(WeightSeq::constant(2.0)), e(1), 100, 50),
                  ResourceLimit);
}

TEST_CASE("forward_iterate examples") {
  auto a = forward_iterate(WeightSeq::constant(2.0), 1, 3);
  CHECK(a.entries()[0].index == 4);
  CHECK(a[4].real() == doctest::Approx(0.125).epsilon(1e-15));
  auto b = forward_iterate(WeightSeq::bergman(), 1, 3);
  CHECK(b[4].real() == doctest::Approx(std::sqrt(2.0 / 5.0)).epsilon(1e-14));
  // TMu uses the Taylor index convention: z^k at index k+1, so k=1 means e_2 here
  auto c = forward_iterate(WeightSeq::tmu(1.0), 2, 2);
  CHECK(c[4].real() == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("tmu_apply examples") {
  // f = z^2 at index 3, mu = 2: f'(2z) = 4z
  const auto d = tmu_apply(2.0, e(3));
  REQUIRE(d.support_size() == 1);
  CHECK(d[2] == Scalar(4.0));
  CHECK(tmu_apply(Scalar(0.3, 2.0), e(1)).empty());
  CHECK(tmu_apply(1.0, e(4)) == e(3, 3.0));
}

TEST_CASE("smu_power_basis examples") {
  CHECK(smu_power_basis(2.0, 0, 1)[2].real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(smu_power_basis(1.0, 0, 3)[4].real() == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(smu_power_basis(2.0, 1, 2)[4].real() == doctest::Approx(1.0 / 48.0).epsilon(1e-14));
}

TEST_CASE("smu_power_basis against repeated antiderivative") {
  // S f = mu * int_0^{z/mu} f, on z^d: z^{d+1} / ((d+1) mu^d)
  for (Scalar mu : {Scalar(1.0), Scalar(2.0), Scalar(0.0, 1.0), Scalar(1.5, -0.5)}) {
    for (Index k = 0; k <= 6; ++k) {
      Scalar c = 1.0;
      for (Index n = 1; n <= 12; ++n) {
        const Index d = k + n - 1;
        c /= static_cast<double>(d + 1) * std::pow(mu, static_cast<double>(d));
        CHECK(std::abs(smu_power_basis(mu, k, n)[k + n + 1] - c) <= 1e-12 * std::abs(c));
      }
    }
  }
}

TEST_CASE("tmu_apply equals TMu weighted shift") {
  std::mt19937_64 rng(5);
  for (Scalar mu : {Scalar(1.0), Scalar(1.5), Scalar(2.0), Scalar(1.0, 1.0), Scalar(-1.2, 0.4)}) {
    const auto op = OperatorSpec::backward(WeightSeq::tmu(mu));
    for (int t = 0; t < 50; ++t) {
      const auto f = random_vector(rng, 1, 60);
      CHECK(tmu_apply(mu, f) == apply(op, f));
    }
  }
}

TEST_CASE("prefix differences are the log weights") {
  for (const auto& w : families()) {
    for (Index n = 1; n <= 300; ++n) {
      const LogPolar d = w.prefix(n) / w.prefix(n - 1);
      const LogPolar lw = w.log_weight(n);
      CHECK(std::abs(d.logmag - lw.logmag) <= 1e-12 * std::max(1.0, std::abs(w.prefix(n).logmag)));
    }
  }
}

TEST_CASE("prefix beyond the table uses the closed form continuously") {
  const Index edge = WeightSeq::kTableLimit;
  for (const auto& w : families()) {
    const double inside = w.prefix(edge).logmag;
    const double step = w.log_weight(edge + 1).logmag;
    CHECK(w.prefix(edge + 1).logmag == doctest::Approx(inside + step).epsilon(1e-12));
  }
}

TEST_CASE("TMu prefix identity") {
  for (Scalar mu : {Scalar(1.0), Scalar(1.5), Scalar(2.0), Scalar(1.0, 1.0)}) {
    const auto w = WeightSeq::tmu(mu);
    for (Index n = 1; n <= 200; ++n) {
      const double nd = static_cast<double>(n), ex = nd * (nd - 1.0) / 2.0;
      const double lm = std::lgamma(nd + 1.0) + ex * std::log(std::abs(mu));
      CHECK(w.prefix(n).logmag == doctest::Approx(lm).epsilon(1e-9));
      CHECK(w.prefix(n).phase == doctest::Approx(ex * std::arg(mu)).epsilon(1e-9));
    }
  }
}

TEST_CASE("table family falls back to the default rule") {
  const auto w = WeightSeq::table({2.0, 3.0}, 0.5);
  CHECK(w.weight(1) == Scalar(2.0));
  CHECK(w.weight(2) == Scalar(3.0));
  CHECK(w.weight(3) == Scalar(0.5));
  CHECK(w.weight(1000) == Scalar(0.5));
}

TEST_CASE("backward shift is a left inverse of the forward shift") {
  std::mt19937_64 rng(9);
  for (const auto& w : families()) {
    for (int t = 0; t < 30; ++t) {
      const auto v = random_vector(rng, 1, 80);
      const auto back = apply(OperatorSpec::backward(w), apply(OperatorSpec::forward(w), v));
      CHECK(same_support_close(back, v, 1e-12));
    }
  }
  const auto bil = WeightSeq::bilateral_table({{0, 3.0}, {1, 0.25}}, 2.0, 0.5);
  for (int t = 0; t < 30; ++t) {
    const auto v = random_vector(rng, -30, 30, Domain::Bilateral);
    const auto back = apply(OperatorSpec::backward(bil), apply(OperatorSpec::forward(bil), v));
    CHECK(same_support_close(back, v, 1e-12));
  }
}

TEST_CASE("iterate matches repeated apply") {
  std::mt19937_64 rng(13);
  for (const auto& w : families()) {
    for (int t = 0; t < 10; ++t) {
      const auto v = random_vector(rng, 1, top_index(w, 120));
      const Index n = std::uniform_int_distribution<Index>(1, 64)(rng);
      const auto op = OperatorSpec::backward(w).rotated(std::polar(1.0, 0.3));
      CoeffVector slow = v;
      for (Index i = 0; i < n; ++i) slow = apply(op, slow);
      CHECK(same_support_close(iterate(op, v, n), slow, 1e-10));
    }
  }
}

TEST_CASE("rotation and power composition") {
  std::mt19937_64 rng(17);
  const Scalar lam = std::polar(1.0, std::numbers::pi / 7.0);
  for (const auto& w : families()) {
    const auto v = random_vector(rng, 1, top_index(w, 100));
    for (int p = 1; p <= 4; ++p) {
      const auto op = OperatorSpec::backward(w).rotated(lam);
      // (lambda T)^p = lambda^p T^p
      const auto lhs = apply(op.powered(p), v);
      const auto rhs = scale(std::pow(lam, p), iterate(OperatorSpec::backward(w), v, p));
      CHECK(same_support_close(lhs, rhs, 1e-12));
      CHECK(iterate(op.powered(p), v, 7) == iterate(op, v, 7 * p));
    }
  }
  CHECK_THROWS_AS(OperatorSpec::backward(WeightSeq::bergman()).rotated(2.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(OperatorSpec::backward(WeightSeq::bergman()).powered(0).validate(), InvalidArgument);
}

TEST_CASE("weight factories reject invalid parameters") {
  CHECK_THROWS_AS(WeightSeq::constant(0.0), InvalidArgument);
  CHECK_THROWS_AS(WeightSeq::root_weight(0), InvalidArgument);
  CHECK_THROWS_AS(WeightSeq::tmu(0.0), InvalidArgument);
  CHECK_THROWS_AS(WeightSeq::table({1.0, 0.0}, 1.0), InvalidArgument);
}
