#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "l1select/density.hpp"
#include "l1select/generators.hpp"
#include "l1select/rng.hpp"
#include "rational.hpp"

using namespace l1select;
using l1select::testing::Rational;

namespace {

Mass random_mass(Rng& rng, std::size_t k) {
  Mass v(k);
  double s = 0;
  for (auto& x : v) s += (x = rng.uniform());
  for (auto& x : v) x /= s;
  return v;
}

// Random vector with deliberate exact ties against `other` at some atoms.
Mass random_mass_with_ties(Rng& rng, const Mass& other) {
  Mass v = random_mass(rng, other.size());
  for (std::size_t x = 0; x < v.size(); ++x) {
    if (rng.bernoulli(0.3)) v[x] = other[x];
  }
  return v;
}

const Mass kF1{0.0, 0.26, 0.5, 0.24};
const Mass kF2{0.51, 0.24, 0.0, 0.25};
const Mass kG{0.5, 0.5, 0.0, 0.0};

}  // namespace

TEST_CASE("test_function", "[density]") {
  SECTION("sign pattern of the four-atom table") {
    const auto t = test_function(kF1, kF2);
    CHECK(t.signs() == std::vector<std::int8_t>{-1, 1, 1, -1});
  }
  SECTION("identical vectors give all zeros") {
    const auto t = test_function(kF1, kF1);
    for (std::size_t x = 0; x < t.size(); ++x) CHECK(t[x] == 0);
  }
  SECTION("antisymmetric on random pairs, including exact ties") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
      const Mass a = random_mass(rng, 1 + rng.below(8));
      const Mass b = random_mass_with_ties(rng, a);
      CHECK(test_function(a, b) == -test_function(b, a));
    }
  }
  SECTION("length mismatch") {
    try {
      (void)test_function(kF1, Mass{1.0});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SupportMismatch);
    }
  }
}

TEST_CASE("inner_product", "[density]") {
  const auto t12 = test_function(kF1, kF2);
  CHECK(inner_product(kF1, t12) == Catch::Approx(0.52).margin(1e-12));
  CHECK(inner_product(kF2, t12) == Catch::Approx(-0.52).margin(1e-12));
  CHECK(inner_product(kG, t12) == 0.0);
  CHECK(inner_product(kF1, test_function(kF2, kF2)) == 0.0);
  CHECK_THROWS_AS(inner_product(Mass{1.0, 2.0}, t12), Error);
}

TEST_CASE("l1_distance", "[density]") {
  CHECK(l1_distance(kF1, kF2) == Catch::Approx(1.04).margin(1e-12));
  CHECK(l1_distance(kF1, kF1) == 0.0);
  CHECK_THROWS_AS(l1_distance(kF1, Mass{1.0}), Error);

  SECTION("nine-eps f1 against g") {
    const auto inst = gen_lower_bound_9(0.001);
    CHECK(l1_distance(inst.family.mass(0), inst.truth) == Catch::Approx(1.928).margin(1e-12));
  }

  SECTION("equals the residual product with its own test-function, bit for bit") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      const Mass a = random_mass(rng, 1 + rng.below(9));
      const Mass b = random_mass_with_ties(rng, a);
      CHECK(l1_distance(a, b) == inner_product(difference(a, b), test_function(a, b)));
    }
  }
}

TEST_CASE("preprocess", "[density]") {
  SECTION("two-member table has one pair") {
    const auto inst = gen_lower_bound_3(0.01);
    const auto prep = preprocess(inst.family);
    REQUIRE(prep.pairs().size() == 1);
    CHECK(prep.pair(0, 1).distance == Catch::Approx(1.04).margin(1e-12));
    CHECK(prep.pair(0, 1).threshold == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("singleton family has an empty pair list") {
    const Family fam(Support::labelled(2), {{"only", {0.5, 0.5}}});
    const auto prep = preprocess(fam);
    CHECK(prep.pairs().empty());
    CHECK(prep.sorted_order().empty());
  }
  SECTION("empty family is rejected") {
    try {
      (void)preprocess(Family(Support::labelled(2), {}));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyFamily);
    }
  }
  SECTION("duplicate member gives a zero-distance pair sorted last") {
    const auto prep = preprocess(gen_lower_bound_9(0.001).family);
    REQUIRE(prep.pairs().size() == 6);
    const auto order = prep.sorted_order();
    const auto& last = prep.pairs()[order.back()];
    CHECK(last.i == 2);
    CHECK(last.j == 3);
    CHECK(last.distance == 0.0);
  }
  SECTION("pair list is sorted, complete and consistent on random families") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const auto inst = random_instance(rng.next(), 1 + rng.below(6), 1 + rng.below(10), 0.0);
      const auto prep = preprocess(inst.family);
      const std::size_t m = inst.family.size();
      REQUIRE(prep.pairs().size() == m * (m - 1) / 2);
      const auto order = prep.sorted_order();
      for (std::size_t r = 1; r < order.size(); ++r) {
        const auto& a = prep.pairs()[order[r - 1]];
        const auto& b = prep.pairs()[order[r]];
        CHECK((a.distance > b.distance || (a.distance == b.distance && std::pair(a.i, a.j) < std::pair(b.i, b.j))));
      }
      for (const auto& p : prep.pairs()) {
        const double via_products = prep.member_product(p.i, p.i, p.j) - prep.member_product(p.j, p.i, p.j);
        CHECK(via_products == Catch::Approx(p.distance).margin(1e-12));
        CHECK(p.distance >= 0.0);
        CHECK(prep.member_product(p.i, p.j, p.i) == -prep.member_product(p.i, p.i, p.j));
      }
    }
  }
}

TEST_CASE("compare", "[density]") {
  SECTION("four-atom table with h = g is a draw") {
    const auto inst = gen_lower_bound_3(0.01);
    const auto prep = preprocess(inst.family);
    Ledger ledger;
    CHECK(compare(prep, 0, 1, inst.empirical, ledger) == Outcome::Draw);
    CHECK(ledger.h_products() == 1);
  }
  SECTION("nine-eps cycle") {
    const auto inst = gen_lower_bound_9(0.001);
    const auto prep = preprocess(inst.family);
    Ledger ledger;
    CHECK(compare(prep, 0, 2, inst.empirical, ledger) == Outcome::FirstWins);
    CHECK(compare(prep, 1, 2, inst.empirical, ledger) == Outcome::SecondWins);
    CHECK(compare(prep, 0, 1, inst.empirical, ledger) == Outcome::SecondWins);
    CHECK(compare(prep, 2, 3, inst.empirical, ledger) == Outcome::Draw);
    CHECK(ledger.h_products() == 4);
    CHECK(ledger.term_evaluations() == 0);
  }
  SECTION("self-comparison and bad indices") {
    const auto prep = preprocess(gen_lower_bound_3(0.01).family);
    const auto h = EmpiricalDistribution::from_mass(kG);
    Ledger ledger;
    try {
      (void)compare(prep, 1, 1, h, ledger);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidPair);
    }
    CHECK_THROWS_AS(compare(prep, 0, 5, h, ledger), Error);
    CHECK(ledger.h_products() == 0);
  }
  SECTION("antisymmetric on random instances") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      const auto inst = random_instance(rng.next(), 1 + rng.below(6), 2 + rng.below(6), 0.05);
      const auto prep = preprocess(inst.family);
      Ledger ledger;
      for (std::size_t i = 0; i < prep.size(); ++i) {
        for (std::size_t j = 0; j < prep.size(); ++j) {
          if (i == j) continue;
          CHECK(compare(prep, i, j, inst.empirical, ledger) == flip(compare(prep, j, i, inst.empirical, ledger)));
        }
      }
    }
  }
  SECTION("agrees with the defining inequality on random instances") {
    Rng rng(6);
    for (int trial = 0; trial < 200; ++trial) {
      const auto inst = random_instance(rng.next(), 2 + rng.below(5), 2 + rng.below(4), 0.1);
      const auto prep = preprocess(inst.family);
      Ledger ledger;
      const auto& h = inst.empirical.mass();
      for (const auto& p : prep.pairs()) {
        const auto t = test_function(inst.family.mass(p.i), inst.family.mass(p.j));
        const double lhs = inner_product(difference(inst.family.mass(p.i), h), t);
        const double rhs = inner_product(difference(inst.family.mass(p.j), h), -t);
        const Outcome o = compare(prep, p.i, p.j, inst.empirical, ledger);
        if (lhs < rhs - 1e-9) CHECK(o == Outcome::FirstWins);
        if (lhs > rhs + 1e-9) CHECK(o == Outcome::SecondWins);
      }
    }
  }
}

TEST_CASE("preprocess leaves the ledger alone", "[density]") {
  Ledger ledger;
  const auto prep = preprocess(random_instance(9, 5, 8, 0.0).family);
  CHECK(ledger.h_products() == 0);
  CHECK(ledger.term_evaluations() == 0);
  CHECK(prep.size() == 8);
}

TEST_CASE("scheffe_set", "[density]") {
  CHECK(scheffe_set(kF1, kF2) == std::vector<std::size_t>{1, 2});
  CHECK(scheffe_set(kF1, kF1).empty());
  CHECK_THROWS_AS(scheffe_set(kF1, Mass{1.0}), Error);

  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Mass a = random_mass(rng, 1 + rng.below(8));
    const Mass b = random_mass_with_ties(rng, a);
    const auto ab = scheffe_set(a, b);
    const auto ba = scheffe_set(b, a);
    std::vector<int> hits(a.size(), 0);
    for (auto x : ab) ++hits[x];
    for (auto x : ba) ++hits[x];
    for (std::size_t x = 0; x < a.size(); ++x) {
      if (a[x] == b[x]) ++hits[x];
      CHECK(hits[x] == 1);
    }
  }
}

TEST_CASE("scheffe_win", "[density]") {
  CHECK(scheffe_win(kF1, kF2, kG) == Outcome::Draw);
  CHECK(scheffe_win(kF1, kF1, kG) == Outcome::Draw);
  try {
    (void)scheffe_win(Mass{0.5, 0.6}, Mass{0.5, 0.5}, Mass{0.5, 0.5});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotNormalized);
  }

  SECTION("matches compare on random distribution triples") {
    Rng rng(13);
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t k = 1 + rng.below(8);
      const Mass a = random_mass(rng, k), b = random_mass(rng, k), h = random_mass(rng, k);
      const Family fam(Support::labelled(k), {{"a", a}, {"b", b}});
      const auto prep = preprocess(fam);
      Ledger ledger;
      const auto hd = EmpiricalDistribution::from_mass(h);
      if (k == 1) continue;  // a = b = h = (1)
      CHECK(scheffe_win(a, b, h) == compare(prep, 0, 1, hd, ledger));
    }
  }

  SECTION("the two rules part ways when h has extra mass where the candidates tie") {
    // a and b tie on A3; h puts more mass there than they do.
    const Mass a{0.5, 0.2, 0.3}, b{0.2, 0.5, 0.3}, h{0.35, 0.2, 0.45};
    const Family fam(Support::labelled(3), {{"a", a}, {"b", b}});
    Ledger ledger;
    const auto set_rule = scheffe_win(a, b, h);
    const auto test_rule = compare(preprocess(fam), 0, 1, EmpiricalDistribution::from_mass(h), ledger);
    // Set rule: |0.5 - 0.35| vs |0.2 - 0.35| is a draw. Test-function rule:
    // h.T = 0.15 against threshold 0, so a wins.
    CHECK(set_rule == Outcome::Draw);
    CHECK(test_rule == Outcome::FirstWins);
  }
}

TEST_CASE("delta", "[density]") {
  const auto inst = gen_lower_bound_3(0.01);
  CHECK(delta(inst.truth, inst.empirical.mass(), inst.family) == 0.0);
  const Mass h{0.4, 0.6, 0.0, 0.0};
  CHECK(delta(kG, h, inst.family) == Catch::Approx(0.2).margin(1e-12));
  CHECK(delta_restricted(kG, h, inst.family, 1) == Catch::Approx(0.2).margin(1e-12));
  CHECK(delta_restricted(kG, kG, inst.family, 0) == 0.0);
  CHECK_THROWS_AS(delta_restricted(kG, h, inst.family, 2), Error);

  const Family single(Support::labelled(4), {{"f", kF1}});
  CHECK(delta(kG, h, single) == 0.0);

  SECTION("nonnegative and dominates every restricted value") {
    Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
      const auto r = random_instance(rng.next(), 1 + rng.below(6), 1 + rng.below(8), 0.2);
      const double d = delta(r.truth, r.empirical.mass(), r.family);
      CHECK(d >= 0.0);
      for (std::size_t i = 0; i < r.family.size(); ++i) {
        CHECK(delta_restricted(r.truth, r.empirical.mass(), r.family, i) <= d);
      }
    }
  }
  SECTION("equals the max over ordered pairs of (g - h).T_ij") {
    Rng rng(18);
    for (int trial = 0; trial < 100; ++trial) {
      const auto r = random_instance(rng.next(), 1 + rng.below(6), 2 + rng.below(6), 0.2);
      const Mass diff = difference(r.truth, r.empirical.mass());
      double best = 0.0;
      for (std::size_t i = 0; i < r.family.size(); ++i) {
        for (std::size_t j = 0; j < r.family.size(); ++j) {
          if (i != j) best = std::max(best, inner_product(diff, test_function(r.family.mass(i), r.family.mass(j))));
        }
      }
      CHECK(delta(r.truth, r.empirical.mass(), r.family) == Catch::Approx(best).margin(1e-15));
    }
  }
}

TEST_CASE("exact table oracle agrees with the double implementation", "[density]") {
  using namespace l1select::testing;
  const auto tab = three_table(100);
  const auto t = rsigns(tab.f1, tab.f2);
  CHECK(rdot(tab.f1, t) == Rational(13, 25));  // 1/2 + 2 eps
  CHECK(rdot(tab.f2, t) == Rational(-13, 25));
  CHECK(rdot(tab.g, t) == Rational(0));
  CHECK(rl1(tab.f1, tab.f2) == Rational(26, 25));  // 1 + 4 eps

  const auto inst = gen_lower_bound_3(0.01);
  const auto td = test_function(inst.family.mass(0), inst.family.mass(1));
  for (std::size_t x = 0; x < 4; ++x) CHECK(td[x] == t[x]);
  CHECK(inner_product(inst.family.mass(0), td) == Catch::Approx(rdot(tab.f1, t).value()).margin(1e-12));
  CHECK(l1_distance(inst.family.mass(0), inst.family.mass(1)) == Catch::Approx(rl1(tab.f1, tab.f2).value()).margin(1e-12));
}
