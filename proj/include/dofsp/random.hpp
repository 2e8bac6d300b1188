#pragma once

#include <cstdint>
#include <vector>

namespace dofsp {

// Uniform draws with an explicit base. Protocols pull every random symbol
// through this interface so a run can be driven by a seeded generator or by
// an exhaustive enumerator interchangeably.
class RandomSource {
 public:
  virtual ~RandomSource() = default;

  // Uniform value in [0, base). base >= 1.
  virtual std::uint32_t draw(std::uint32_t base) = 0;
};

// splitmix64; fixed algorithm so transcripts are identical across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

class SeededSource final : public RandomSource {
 public:
  explicit SeededSource(std::uint64_t seed) : engine_(seed) {}

  std::uint32_t draw(std::uint32_t base) override;

 private:
  SplitMix64 engine_;
};

// Derives a stream seed for sweep cell `stream`, so parallel and serial
// sweeps produce identical outputs.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Records the base of every draw and returns 0s. Used as a discovery pass:
// protocol control flow never depends on drawn values, so the recorded
// layout is exact.
class DrawRecorder final : public RandomSource {
 public:
  std::uint32_t draw(std::uint32_t base) override {
    bases_.push_back(base);
    return 0;
  }

  const std::vector<std::uint32_t>& bases() const { return bases_; }

 private:
  std::vector<std::uint32_t> bases_;
};

// Replays a fixed digit assignment, one digit per draw.
class TapeSource final : public RandomSource {
 public:
  explicit TapeSource(const std::vector<std::uint32_t>& digits)
      : digits_(&digits) {}

  std::uint32_t draw(std::uint32_t base) override;

  bool exhausted() const { return pos_ == digits_->size(); }

 private:
  const std::vector<std::uint32_t>* digits_;
  std::size_t pos_ = 0;
};

// Mixed-radix odometer over a draw layout; visits every assignment once.
class Odometer {
 public:
  explicit Odometer(std::vector<std::uint32_t> bases);

  // Total number of assignments (product of bases).
  std::uint64_t states() const { return states_; }

  const std::vector<std::uint32_t>& digits() const { return digits_; }

  // Advances to the next assignment; false once all have been visited.
  bool advance();

 private:
  std::vector<std::uint32_t> bases_;
  std::vector<std::uint32_t> digits_;
  std::uint64_t states_;
};

}  // namespace dofsp
