#pragma once

#include <cstdint>
#include <vector>

#include "dofsp/errors.hpp"
#include "dofsp/random.hpp"

namespace dofsp {

// A field element stored as a canonical residue in [0, q-1]. Every operation
// reduces eagerly so transcripts are bit-exact.
using Symbol = std::uint32_t;

bool is_prime(std::uint64_t n);

// Least prime strictly greater than `bound`.
Symbol smallest_prime_above(std::uint64_t bound);

class PrimeField {
 public:
  explicit PrimeField(Symbol modulus);

  Symbol modulus() const { return q_; }

  Symbol reduce(std::uint64_t v) const { return static_cast<Symbol>(v % q_); }
  Symbol add(Symbol a, Symbol b) const { return reduce(std::uint64_t{a} + b); }
  Symbol sub(Symbol a, Symbol b) const { return reduce(std::uint64_t{a} + q_ - b); }
  Symbol mul(Symbol a, Symbol b) const { return reduce(std::uint64_t{a} * b); }
  Symbol neg(Symbol a) const { return a == 0 ? 0 : q_ - a; }

  Symbol sample(RandomSource& rng) const { return rng.draw(q_); }
  // Uniform over the nonzero elements.
  Symbol sample_nonzero(RandomSource& rng) const { return 1 + rng.draw(q_ - 1); }

  bool operator==(const PrimeField& other) const { return q_ == other.q_; }

 private:
  Symbol q_;
};

// Fixed-length vector over a prime field.
class FieldVector {
 public:
  FieldVector(PrimeField field, std::size_t length)
      : field_(field), entries_(length, 0) {}
  FieldVector(PrimeField field, std::vector<Symbol> entries);

  std::size_t size() const { return entries_.size(); }
  const PrimeField& field() const { return field_; }
  Symbol operator[](std::size_t i) const { return entries_[i]; }
  void set(std::size_t i, Symbol v) { entries_[i] = field_.reduce(v); }
  const std::vector<Symbol>& entries() const { return entries_; }

  bool operator==(const FieldVector& other) const {
    return field_ == other.field_ && entries_ == other.entries_;
  }

 private:
  PrimeField field_;
  std::vector<Symbol> entries_;
};

FieldVector add(const FieldVector& a, const FieldVector& b);
FieldVector sub(const FieldVector& a, const FieldVector& b);
FieldVector hadamard(const FieldVector& a, const FieldVector& b);
Symbol dot(const FieldVector& a, const FieldVector& b);

// length i.i.d. uniform symbols; deterministic given the source state.
FieldVector sample_uniform_vector(RandomSource& rng, std::size_t length,
                                  const PrimeField& field);

}  // namespace dofsp
