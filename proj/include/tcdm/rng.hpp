#pragma once

#include <cstdint>
#include <random>

namespace tcdm {

/// Reproducible random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are not (their algorithms are
/// implementation-defined), so the conversions below are spelled out here:
///  - uniform():  top 53 bits of one engine draw, scaled to [0, 1)
///  - below(n):   rejection sampling on the full 64-bit draw (unbiased)
///  - gaussian(): Box-Muller; both variates of a pair are used, in order
/// Same seed, same sequence, on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t n);

  double gaussian();

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tcdm
