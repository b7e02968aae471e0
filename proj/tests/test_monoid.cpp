#include <memory>

#include "doctest.h"
#include "test_support.hpp"
#include "tracesolve/monoid.hpp"
#include "tracesolve/trace.hpp"

using namespace ts;
using namespace ts::test;

namespace {

// {1, z} with z z = z.
FiniteMonoid one_z() { return FiniteMonoid(2, {0, 1, 1, 1}, {0, 1}, 0); }

int eval_word(const FiniteMonoid& m, const std::vector<int>& image, const Word& w) {
  int x = m.unit();
  for (Sym s : w) x = m.mul(x, image[static_cast<std::size_t>(s)]);
  return x;
}

}  // namespace

TEST_CASE("validate rejects broken tables") {
  CHECK_NOTHROW(one_z().validate());
  // Not associative: x y depends on bracketing.
  CHECK_THROWS_AS(FiniteMonoid(3, {0, 1, 2, 1, 2, 0, 2, 1, 1}, {0, 1, 2}, 0).validate(), Error);
  // inv(inv(x)) != x.
  CHECK_THROWS_AS(FiniteMonoid(2, {0, 1, 1, 1}, {0, 0}, 0).validate(), Error);
}

TEST_CASE("constraint evaluation") {
  const Abc x = make_abc(R1, R2);
  // [TRIVIAL] trivial monoid.
  auto triv = std::make_shared<const FiniteMonoid>(FiniteMonoid::trivial());
  ConstraintMorphism mt(triv);
  for (Sym s = 0; s < x.alpha.size(); ++s) mt.set(s, 0);
  CHECK(mt.eval({x.a, x.b, x.A()}) == 0);

  // [TRIVIAL] zero absorbs: N = {1, 0}, mu(#) = 0.
  auto z = std::make_shared<const FiniteMonoid>(adjoin_zero(FiniteMonoid::trivial()));
  ConstraintMorphism mz(z);
  for (Sym s = 0; s < x.alpha.size(); ++s) mz.set(s, 0);
  mz.set(0, 1);
  CHECK(mz.eval({0, x.a, 0}) == 1);
  CHECK(mz.eval({x.a}) == 0);
}

TEST_CASE("reduction monoid products") {
  const Abc x = make_abc(R1, R2, R12);
  const std::vector<Sym> ls = letters_of(x);
  const ReductionMonoid nl = build_reduction_monoid(x.t(), ls);
  const FiniteMonoid& m = nl.monoid;
  auto mu = [&](Sym s) { return nl.image[static_cast<std::size_t>(s)]; };
  CHECK_NOTHROW(m.validate());
  // [DERIVED] a abar is forbidden.
  CHECK(m.is_zero(m.mul(mu(x.a), mu(x.A()))));
  // [DERIVED] a, b independent: the product is symmetric, and both letters
  // are first and last in it, so it absorbs neither bar on either side.
  const int ab = m.mul(mu(x.a), mu(x.b));
  CHECK(ab == m.mul(mu(x.b), mu(x.a)));
  CHECK_FALSE(m.is_zero(ab));
  CHECK(m.is_zero(m.mul(ab, mu(x.A()))));
  CHECK(m.is_zero(m.mul(ab, mu(x.B()))));
  CHECK(m.is_zero(m.mul(mu(x.A()), ab)));
  CHECK(m.is_zero(m.mul(mu(x.B()), ab)));
  // [DERIVED] a c: c blocks a on the right, so a c A is reduced.
  CHECK_FALSE(m.is_zero(m.mul(m.mul(mu(x.a), mu(x.c)), mu(x.A()))));
  // [TRIVIAL] unit.
  CHECK(m.mul(m.unit(), mu(x.a)) == mu(x.a));
  CHECK(m.inv(mu(x.a)) == mu(x.A()));
}

TEST_CASE("dual product") {
  const FiniteMonoid n = one_z();
  const FiniteMonoid d = dual_product(n);
  auto e = [](int a, int b) { return a * 2 + b; };
  CHECK(d.mul(e(0, 0), e(1, 1)) == e(1, 1));  // [TRIVIAL] unit
  CHECK(d.inv(e(1, 0)) == e(0, 1));           // [TRIVIAL]
  CHECK(d.inv(d.inv(e(1, 0))) == e(1, 0));
  // [DERIVED] (z,1^T)(1,z^T) = (z 1, (z 1)^T) = (z, z^T).
  CHECK(d.mul(e(1, 0), e(0, 1)) == e(1, 1));
  CHECK_NOTHROW(d.validate());
}

TEST_CASE("product monoid") {
  const FiniteMonoid n = one_z();
  const FiniteMonoid p = product_monoid(FiniteMonoid::trivial(), n);
  CHECK(p.size() == n.size());  // [TRIVIAL]
  for (int a = 0; a < n.size(); ++a)
    for (int b = 0; b < n.size(); ++b) CHECK(p.component(p.mul(a, b), 1) == n.mul(a, b));
  CHECK(p.mul(p.unit(), 1) == 1);

  // [DERIVED] N_L x {1,0}: the first component of a abar is zero.
  const Abc x = make_abc(R1, R1);
  const ReductionMonoid nl = build_reduction_monoid(x.t(), letters_of(x));
  const FiniteMonoid q = product_monoid(nl.monoid, adjoin_zero(FiniteMonoid::trivial()));
  const int ea = nl.image[static_cast<std::size_t>(x.a)] * 2, eA = nl.image[static_cast<std::size_t>(x.A())] * 2;
  CHECK(nl.monoid.is_zero(q.component(q.mul(ea, eA), 0)));
  CHECK(q.is_zero_like(q.mul(ea, eA)));
}

TEST_CASE("property: N_L detects reducedness") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 1000; ++i) {
    const Abc x = random_abc(rng);
    const ReductionMonoid nl = build_reduction_monoid(x.t(), letters_of(x));
    const Word w = random_word(rng, letters_of(x), 8);
    CHECK(nl.monoid.is_zero(eval_word(nl.monoid, nl.image, w)) == !brute_reduced(w, x.t()));
  }
}

TEST_CASE("property: evaluation is invariant under commutation") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 200; ++i) {
    const Abc x = random_abc(rng);
    const ReductionMonoid nl = build_reduction_monoid(x.t(), letters_of(x));
    const Word w = random_word(rng, letters_of(x), 6);
    const int v = eval_word(nl.monoid, nl.image, w);
    for (const Word& u : brute_class(w, x.t())) CHECK(eval_word(nl.monoid, nl.image, u) == v);
  }
}

TEST_CASE("property: dual product laws on small monoids") {
  // Capped counters {0..c} and the parity group, all commutative; plus the
  // non-commutative left-zero monoid {1, l, r} with l x = l, r x = r.
  std::vector<FiniteMonoid> ms;
  for (int c = 1; c <= 5; ++c) {
    std::vector<int> mult;
    for (int i = 0; i <= c; ++i)
      for (int j = 0; j <= c; ++j) mult.push_back(std::min(i + j, c));
    std::vector<int> inv(static_cast<std::size_t>(c + 1));
    for (int i = 0; i <= c; ++i) inv[static_cast<std::size_t>(i)] = i;
    ms.emplace_back(c + 1, mult, inv, 0);
  }
  ms.emplace_back(3, std::vector<int>{0, 1, 2, 1, 1, 1, 2, 2, 2}, std::vector<int>{0, 1, 2}, 0);
  for (const FiniteMonoid& n : ms) {
    const FiniteMonoid d = dual_product(n);
    CHECK_NOTHROW(d.validate());
    const int k = n.size();
    for (int x = 0; x < d.size(); ++x)
      for (int y = 0; y < d.size(); ++y) {
        CHECK(d.inv(d.mul(x, y)) == d.mul(d.inv(y), d.inv(x)));
        // The first projection is a homomorphism.
        CHECK(d.mul(x, y) / k == n.mul(x / k, y / k));
      }
  }
}

TEST_CASE("constraint morphisms must respect commutation and the involution") {
  // Left-zero monoid {1, l, r}: l and r do not commute.
  auto lz = std::make_shared<const FiniteMonoid>(
      FiniteMonoid(3, std::vector<int>{0, 1, 2, 1, 1, 1, 2, 2, 2}, std::vector<int>{0, 1, 2}, 0));
  const Abc indep = make_abc(R1, R2);
  ConstraintMorphism m(lz);
  for (Sym s : {Sym{0}, indep.c, indep.C()}) m.set(s, 0);
  m.set(indep.a, 1);
  m.set(indep.A(), 1);
  m.set(indep.b, 2);
  m.set(indep.B(), 2);
  CHECK_THROWS_AS(m.validate(indep.t()), Error);
  // Same images on dependent letters are fine.
  const Abc dep = make_abc(R1, R1);
  ConstraintMorphism d(lz);
  for (Sym s : {Sym{0}, dep.c, dep.C()}) d.set(s, 0);
  d.set(dep.a, 1);
  d.set(dep.A(), 1);
  d.set(dep.b, 2);
  d.set(dep.B(), 2);
  CHECK_NOTHROW(d.validate(dep.t()));
  d.set(dep.A(), 2);
  CHECK_THROWS_AS(d.validate(dep.t()), Error);
}
