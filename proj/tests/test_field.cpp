#include "doctest.h"

#include <array>
#include <set>

#include "dofsp/field.hpp"
#include "dofsp/random.hpp"

using namespace dofsp;

TEST_SUITE_BEGIN("field");

TEST_CASE("primality and smallest prime selection") {
  CHECK_FALSE(is_prime(0));
  CHECK_FALSE(is_prime(1));
  CHECK(is_prime(2));
  CHECK(is_prime(3));
  CHECK_FALSE(is_prime(9));
  CHECK(is_prime(97));
  CHECK(smallest_prime_above(1) == 2);
  CHECK(smallest_prime_above(2) == 3);
  CHECK(smallest_prime_above(3) == 5);
  CHECK(smallest_prime_above(4) == 5);
  CHECK(smallest_prime_above(13) == 17);
  CHECK_THROWS_AS(PrimeField(6), std::invalid_argument);
}

TEST_CASE("vector addition") {
  PrimeField f5(5);
  FieldVector a(f5, {3, 4});
  FieldVector b(f5, {2, 1});
  CHECK(add(a, b).entries() == std::vector<Symbol>{0, 0});

  FieldVector zero(f5, 2);
  CHECK(add(a, zero) == a);

  // a zero mask exposes the indicator
  PrimeField q(5);
  FieldVector h(q, 8);
  FieldVector indicator(q, 8);
  for (std::size_t j : {0u, 2u, 6u}) indicator.set(j, 1);
  CHECK(add(h, indicator).entries() == std::vector<Symbol>{1, 0, 1, 0, 0, 0, 1, 0});

  FieldVector short_vec(f5, 1);
  CHECK_THROWS_AS(add(a, short_vec), DimensionError);
  PrimeField f7(7);
  CHECK_THROWS_AS(add(a, FieldVector(f7, 2)), DimensionError);
}

TEST_CASE("hadamard product") {
  PrimeField f5(5);
  FieldVector a(f5, {2, 3});
  FieldVector b(f5, {3, 2});
  CHECK(hadamard(a, b).entries() == std::vector<Symbol>{1, 1});

  FieldVector ones(f5, {1, 1});
  FieldVector zeros(f5, 2);
  CHECK(hadamard(a, ones) == a);
  CHECK(hadamard(a, zeros) == zeros);
  CHECK_THROWS_AS(hadamard(a, FieldVector(f5, 3)), DimensionError);
}

TEST_CASE("dot product") {
  PrimeField f5(5);
  // unit-vector selection
  FieldVector x(f5, {0, 1, 1, 1, 0, 0, 1, 1});
  for (std::size_t j = 0; j < 8; ++j) {
    FieldVector e(f5, 8);
    e.set(j, 1);
    CHECK(dot(e, x) == x[j]);
  }
  // indicator over positions {1,3,7} against the same x: two overlaps
  FieldVector indicator(f5, 8);
  for (std::size_t j : {0u, 2u, 6u}) indicator.set(j, 1);
  CHECK(dot(indicator, x) == 2);
}

TEST_CASE("dot matches a scalar loop oracle on random vectors") {
  PrimeField f7(7);
  SeededSource rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    FieldVector a = sample_uniform_vector(rng, 6, f7);
    FieldVector b = sample_uniform_vector(rng, 6, f7);
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < 6; ++i) acc += std::uint64_t{a[i]} * b[i];
    CHECK(dot(a, b) == acc % 7);
  }
}

TEST_CASE("field axioms hold exhaustively for small moduli") {
  for (Symbol q : {2u, 3u, 5u, 7u, 11u, 13u}) {
    PrimeField f(q);
    for (Symbol a = 0; a < q; ++a) {
      for (Symbol b = 0; b < q; ++b) {
        CHECK(f.add(a, b) == f.add(b, a));
        CHECK(f.mul(a, b) == f.mul(b, a));
        CHECK(f.add(a, f.neg(a)) == 0);
        CHECK(f.add(a, 0) == a);
        CHECK(f.mul(a, 1) == a);
        for (Symbol c = 0; c < q; ++c) {
          CHECK(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
          CHECK(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
          CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
        }
      }
    }
  }
}

TEST_CASE("dot is bilinear") {
  PrimeField f7(7);
  SeededSource rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    FieldVector a = sample_uniform_vector(rng, 6, f7);
    FieldVector b = sample_uniform_vector(rng, 6, f7);
    FieldVector c = sample_uniform_vector(rng, 6, f7);
    CHECK(dot(a, add(b, c)) == f7.add(dot(a, b), dot(a, c)));
    // masked dot equals the triple-product scalar oracle
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < 6; ++i) acc += std::uint64_t{a[i]} * b[i] % 7 * c[i];
    CHECK(dot(hadamard(a, b), c) == acc % 7);
  }
}

TEST_CASE("uniform sampling is deterministic per seed") {
  PrimeField f5(5);
  SeededSource rng1(42), rng2(42);
  CHECK(sample_uniform_vector(rng1, 16, f5) == sample_uniform_vector(rng2, 16, f5));
}

TEST_CASE("uniform sampling looks uniform") {
  PrimeField f2(2);
  SeededSource rng(2024);
  double sum = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) sum += sample_uniform_vector(rng, 1, f2)[0];
  double mean = sum / draws;
  CHECK(mean > 0.45);
  CHECK(mean < 0.55);

  // chi-square over symbol frequencies, q=5, length 3
  PrimeField f5(5);
  std::array<int, 5> counts{};
  for (int i = 0; i < 10000; ++i) {
    FieldVector v = sample_uniform_vector(rng, 3, f5);
    for (std::size_t j = 0; j < 3; ++j) counts[v[j]]++;
  }
  double expected = 30000.0 / 5.0;
  double stat = 0;
  for (int c : counts) stat += (c - expected) * (c - expected) / expected;
  CHECK(stat < 13.277);  // df=4, alpha=0.01
}

TEST_SUITE_END();
