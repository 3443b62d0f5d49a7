#pragma once

#include <cstdint>

namespace tbmcg {

/// Per-sample arithmetic tally. Multiplications include divisions;
/// `specials` counts transcendental calls (exp, log).
struct OpCounter {
  std::uint64_t adds = 0;
  std::uint64_t mults = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t specials = 0;

  void reset() { *this = OpCounter{}; }

  OpCounter& operator+=(const OpCounter& o) {
    adds += o.adds;
    mults += o.mults;
    comparisons += o.comparisons;
    specials += o.specials;
    return *this;
  }

  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

}  // namespace tbmcg
