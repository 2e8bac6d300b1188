#include "dofsp/random.hpp"

#include <stdexcept>

namespace dofsp {

std::uint32_t SeededSource::draw(std::uint32_t base) {
  if (base == 0) throw std::invalid_argument("draw: base must be positive");
  if (base == 1) return 0;
  // Rejection sampling for exact uniformity.
  const std::uint64_t span = 0xffffffffffffffffULL - (0xffffffffffffffffULL % base + 1) % base;
  for (;;) {
    std::uint64_t v = engine_.next();
    if (span == 0xffffffffffffffffULL || v <= span) return static_cast<std::uint32_t>(v % base);
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  SplitMix64 mix(base ^ (0xa076'1d64'78bd'642fULL * (stream + 1)));
  mix.next();
  return mix.next();
}

std::uint32_t TapeSource::draw(std::uint32_t base) {
  if (pos_ >= digits_->size()) throw std::logic_error("TapeSource: tape exhausted");
  std::uint32_t d = (*digits_)[pos_++];
  if (d >= base) throw std::logic_error("TapeSource: digit out of range for base");
  return d;
}

Odometer::Odometer(std::vector<std::uint32_t> bases)
    : bases_(std::move(bases)), digits_(bases_.size(), 0), states_(1) {
  for (std::uint32_t b : bases_) {
    if (b == 0) throw std::invalid_argument("Odometer: zero base");
    states_ *= b;
  }
}

bool Odometer::advance() {
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (++digits_[i] < bases_[i]) return true;
    digits_[i] = 0;
  }
  return false;
}

}  // namespace dofsp
