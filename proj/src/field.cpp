#include "dofsp/field.hpp"

#include <string>

namespace dofsp {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

Symbol smallest_prime_above(std::uint64_t bound) {
  std::uint64_t n = bound + 1;
  while (!is_prime(n)) ++n;
  return static_cast<Symbol>(n);
}

PrimeField::PrimeField(Symbol modulus) : q_(modulus) {
  if (!is_prime(modulus)) {
    throw std::invalid_argument("PrimeField: modulus " + std::to_string(modulus) +
                                " is not prime");
  }
}

FieldVector::FieldVector(PrimeField field, std::vector<Symbol> entries)
    : field_(field), entries_(std::move(entries)) {
  for (Symbol& e : entries_) e = field_.reduce(e);
}

namespace {

void check_compatible(const FieldVector& a, const FieldVector& b, const char* op) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(op) + ": length mismatch (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (!(a.field() == b.field())) {
    throw DimensionError(std::string(op) + ": field mismatch");
  }
}

}  // namespace

FieldVector add(const FieldVector& a, const FieldVector& b) {
  check_compatible(a, b, "add");
  FieldVector out(a.field(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.field().add(a[i], b[i]));
  return out;
}

FieldVector sub(const FieldVector& a, const FieldVector& b) {
  check_compatible(a, b, "sub");
  FieldVector out(a.field(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.field().sub(a[i], b[i]));
  return out;
}

FieldVector hadamard(const FieldVector& a, const FieldVector& b) {
  check_compatible(a, b, "hadamard");
  FieldVector out(a.field(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.field().mul(a[i], b[i]));
  return out;
}

Symbol dot(const FieldVector& a, const FieldVector& b) {
  check_compatible(a, b, "dot");
  Symbol acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc = a.field().add(acc, a.field().mul(a[i], b[i]));
  }
  return acc;
}

FieldVector sample_uniform_vector(RandomSource& rng, std::size_t length,
                                  const PrimeField& field) {
  FieldVector out(field, length);
  for (std::size_t i = 0; i < length; ++i) out.set(i, field.sample(rng));
  return out;
}

}  // namespace dofsp
