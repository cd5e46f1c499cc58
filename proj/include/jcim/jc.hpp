// Johnson (twisted-ring) code of order n: 2n states on n bits, unit-distance,
// plus a host-side oracle counter used as the reference model in tests.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jcim {

struct InvalidCodewordError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One n-bit Johnson codeword. bits[0] is b1 (the bit the feedback writes),
// bits[n-1] is the MSB whose edge signals wrap-around.
struct JcWord {
  int n = 0;
  std::vector<std::uint8_t> bits;

  bool operator==(const JcWord&) const = default;
  std::string str() const;  // bits[0] printed leftmost
};

// value -> codeword, value in [0, 2n).
JcWord jc_encode(int value, int n);

// codeword -> value; nullopt if the word is not one of the 2n valid states.
std::optional<int> jc_try_decode(const JcWord& w);

// Throwing variant.
int jc_decode(const JcWord& w);

bool jc_is_valid(const JcWord& w);

// ---------------------------------------------------------------------------
// Reference multi-digit counter: digits in [0, 2n) base 2n, LSD first, plus a
// sticky pending-carry flag per digit (set when a digit add wraps past 2n-1).
// ---------------------------------------------------------------------------

struct OracleCounter {
  int n = 0;
  int digits = 1;
  std::vector<int> value;           // per digit, [0, 2n)
  std::vector<std::uint8_t> pending;  // sticky wrap flags

  OracleCounter() = default;
  OracleCounter(int n_, int digits_)
      : n(n_), digits(digits_), value(digits_, 0), pending(digits_, 0) {}

  // Digit value including the not-yet-propagated carry.
  long long folded() const;
};

// Add k in [1, 2n-1] to digit `digit` when mask is set; records a pending
// carry if the digit wraps. Mirrors one masked k-ary increment program.
void oracle_kary_add(OracleCounter& c, int k, bool mask, int digit = 0);

// Subtract k in [1, 2n-1]; records a pending borrow the same way.
void oracle_kary_sub(OracleCounter& c, int k, bool mask, int digit = 0);

}  // namespace jcim
