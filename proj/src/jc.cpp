#include "jcim/jc.hpp"

namespace jcim {

std::string JcWord::str() const {
  std::string s;
  s.reserve(bits.size());
  for (std::uint8_t b : bits) s.push_back(b ? '1' : '0');
  return s;
}

JcWord jc_encode(int value, int n) {
  if (n < 1) throw InvalidCodewordError("order must be >= 1");
  if (value < 0 || value >= 2 * n)
    throw InvalidCodewordError("value out of range for order " + std::to_string(n));
  JcWord w;
  w.n = n;
  w.bits.assign(static_cast<std::size_t>(n), 0);
  if (value <= n) {
    for (int i = 0; i < value; ++i) w.bits[static_cast<std::size_t>(i)] = 1;
  } else {
    // Second half of the ring: a growing run of zeros pushes the ones out.
    for (int i = value - n; i < n; ++i) w.bits[static_cast<std::size_t>(i)] = 1;
  }
  return w;
}

std::optional<int> jc_try_decode(const JcWord& w) {
  const int n = w.n;
  if (n < 1 || w.bits.size() != static_cast<std::size_t>(n)) return std::nullopt;
  // Valid words are a run of ones followed by zeros (values 0..n) or a run of
  // zeros followed by ones (values n..2n-1).
  if (w.bits[0]) {
    int ones = 0;
    while (ones < n && w.bits[static_cast<std::size_t>(ones)]) ++ones;
    for (int i = ones; i < n; ++i)
      if (w.bits[static_cast<std::size_t>(i)]) return std::nullopt;
    return ones;
  }
  int zeros = 0;
  while (zeros < n && !w.bits[static_cast<std::size_t>(zeros)]) ++zeros;
  if (zeros == n) return 0;
  for (int i = zeros; i < n; ++i)
    if (!w.bits[static_cast<std::size_t>(i)]) return std::nullopt;
  return n + zeros;
}

int jc_decode(const JcWord& w) {
  auto v = jc_try_decode(w);
  if (!v) throw InvalidCodewordError("invalid codeword " + w.str());
  return *v;
}

bool jc_is_valid(const JcWord& w) { return jc_try_decode(w).has_value(); }

long long OracleCounter::folded() const {
  long long acc = 0;
  long long base = 1;
  for (int d = 0; d < digits; ++d) {
    acc += (value[static_cast<std::size_t>(d)] +
            2LL * n * pending[static_cast<std::size_t>(d)]) * base;
    base *= 2LL * n;
  }
  return acc;
}

void oracle_kary_add(OracleCounter& c, int k, bool mask, int digit) {
  if (k < 1 || k > 2 * c.n - 1) throw std::out_of_range("k must be in [1, 2n-1]");
  if (!mask) return;
  int s = c.value[static_cast<std::size_t>(digit)] + k;
  if (s >= 2 * c.n) {
    s -= 2 * c.n;
    c.pending[static_cast<std::size_t>(digit)] = 1;
  }
  c.value[static_cast<std::size_t>(digit)] = s;
}

void oracle_kary_sub(OracleCounter& c, int k, bool mask, int digit) {
  if (k < 1 || k > 2 * c.n - 1) throw std::out_of_range("k must be in [1, 2n-1]");
  if (!mask) return;
  int s = c.value[static_cast<std::size_t>(digit)] - k;
  if (s < 0) {
    s += 2 * c.n;
    c.pending[static_cast<std::size_t>(digit)] = 1;
  }
  c.value[static_cast<std::size_t>(digit)] = s;
}

}  // namespace jcim
