#include "jcim/counters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jcim/iarm.hpp"

namespace jcim {

std::size_t bank_rows(int n, int digits, bool has_sign) {
  return 3 + static_cast<std::size_t>(digits) * (static_cast<std::size_t>(n) + 1) +
         (has_sign ? 1 : 0);
}

CounterBank::CounterBank(Subarray& sa, int n, int digits, bool has_sign,
                         std::size_t first_row)
    : sa_(&sa) {
  if (n < 2) throw ConfigError("counter order must be >= 2");
  if (digits < 1) throw ConfigError("need at least one digit");
  if (first_row < kDataStart) throw ConfigError("bank must live in the data group");
  std::size_t need = first_row + bank_rows(n, digits, has_sign);
  if (need > sa.rows()) throw ConfigError("subarray too small for bank");

  lay_.n = n;
  lay_.digits = digits;
  lay_.has_sign = has_sign;
  std::size_t r = first_row;
  lay_.mask_row = r++;
  lay_.scratch0 = r++;
  lay_.scratch1 = r++;
  lay_.bit_rows.resize(static_cast<std::size_t>(digits));
  lay_.onext_rows.resize(static_cast<std::size_t>(digits));
  for (int d = 0; d < digits; ++d) {
    for (int b = 0; b < n; ++b) lay_.bit_rows[static_cast<std::size_t>(d)].push_back(r++);
    lay_.onext_rows[static_cast<std::size_t>(d)] = r++;
  }
  if (has_sign) lay_.osign_row = r++;
  reset();
}

long long CounterBank::capacity() const {
  // Saturates: deep banks (e.g. 64-bit targets) exceed int64, but decoded
  // values stay well below capacity in any exact-use regime.
  long long c = 1;
  for (int d = 0; d < lay_.digits; ++d) {
    if (c > std::numeric_limits<long long>::max() / (2 * lay_.n))
      return std::numeric_limits<long long>::max();
    c *= 2 * lay_.n;
  }
  return c;
}

void CounterBank::reset() {
  for (int d = 0; d < lay_.digits; ++d) {
    for (int b = 0; b < lay_.n; ++b) sa_->fill_row(lay_.bit_row(d, b), 0);
    sa_->fill_row(lay_.onext(d), 0);
  }
  sa_->fill_row(lay_.scratch0, 0);
  sa_->fill_row(lay_.scratch1, 0);
  sa_->fill_row(lay_.mask_row, 1);
  if (lay_.has_sign) sa_->fill_row(lay_.osign_row, 0);
  pending_dir_ = 0;
}

bool CounterBank::any_pending(int digit) const {
  const auto& row = sa_->peek_row(lay_.onext(digit));
  return std::any_of(row.begin(), row.end(), [](std::uint8_t b) { return b != 0; });
}

bool CounterBank::any_pending() const {
  for (int d = 0; d < lay_.digits; ++d)
    if (any_pending(d)) return true;
  return false;
}

void CounterBank::run(const MicroProgram& prog, Bucket bucket) {
  const std::uint64_t a0 = sa_->aap_count(), p0 = sa_->ap_count();
  run_program(prog, *sa_);
  const std::uint64_t da = sa_->aap_count() - a0, dp = sa_->ap_count() - p0;
  stats_.aap += da;
  stats_.ap += dp;
  if (bucket == Bucket::kIncrement) stats_.increment_ops += da + dp;
  if (bucket == Bucket::kRipple) stats_.ripple_ops += da + dp;
}

std::size_t CounterBank::resolve_mask(long mask_row) const {
  if (mask_row < 0) return lay_.mask_row;
  return static_cast<std::size_t>(mask_row);
}

void CounterBank::require_direction(int dir) {
  if (pending_dir_ != 0 && pending_dir_ != dir && any_pending())
    throw DirectionError(
        "direction switch with unresolved pending flags; resolve (sweep/flush) first");
  pending_dir_ = dir;
}

void CounterBank::increment_digit(int digit, int k, long mask_row) {
  require_direction(+1);
  MicroProgram prog = gen_kary_program(lay_, digit, k, resolve_mask(mask_row),
                                       Direction::kIncrement);
  run(prog, Bucket::kIncrement);
  stats_.invocations += 1;
}

void CounterBank::decrement_digit(int digit, int k, long mask_row) {
  require_direction(-1);
  MicroProgram prog = gen_kary_program(lay_, digit, k, resolve_mask(mask_row),
                                       Direction::kDecrement);
  run(prog, Bucket::kIncrement);
  stats_.invocations += 1;
}

void CounterBank::ripple(int digit) {
  if (digit < 0 || digit >= lay_.digits - 1)
    throw ConfigError("ripple requires digit < D-1");
  const int dir = pending_dir_ == 0 ? +1 : pending_dir_;
  MicroProgram step = gen_kary_program(
      lay_, digit + 1, 1, lay_.onext(digit),
      dir > 0 ? Direction::kIncrement : Direction::kDecrement);
  run(step, Bucket::kRipple);
  // Clear the consumed pending row (masked write of 0 under itself).
  run(gen_masked_write(lay_.n, lay_.onext(digit), kC0, false, lay_.onext(digit)),
      Bucket::kRipple);
  stats_.invocations += 1;
}

void CounterBank::resolve_msd() {
  const int msd = lay_.digits - 1;
  const bool pending = any_pending(msd);
  if (pending) {
    if (lay_.has_sign) {
      const int dir = pending_dir_ == 0 ? +1 : pending_dir_;
      (void)dir;  // carry-out and borrow-out both toggle the sign row
      run(gen_masked_write(lay_.n, lay_.osign_row, lay_.osign_row, true,
                           lay_.onext(msd)),
          Bucket::kRipple);
    } else {
      const auto& row = sa_->peek_row(lay_.onext(msd));
      stats_.saturation_events += static_cast<std::uint64_t>(
          std::count(row.begin(), row.end(), std::uint8_t{1}));
    }
  }
  run(gen_masked_write(lay_.n, lay_.onext(msd), kC0, false, lay_.onext(msd)),
      Bucket::kRipple);
  stats_.invocations += 1;
}

void CounterBank::sweep() {
  for (int d = 0; d + 1 < lay_.digits; ++d) ripple(d);
  resolve_msd();
  pending_dir_ = 0;
}

std::uint64_t CounterBank::accumulate_value(long long x, long mask_row,
                                            AddStrategy strategy, CarryPolicy policy,
                                            IarmScheduler* iarm) {
  if (policy == CarryPolicy::kIarm && iarm == nullptr)
    throw ConfigError("deferred carry policy requires a scheduler");
  if (x == 0) return 0;

  const std::uint64_t inv0 = stats_.invocations;
  const int dir = x > 0 ? +1 : -1;
  if (pending_dir_ != 0 && pending_dir_ != dir && any_pending()) {
    if (policy == CarryPolicy::kIarm)
      iarm->flush(*this);
    else
      sweep();
  }

  unsigned long long mag = static_cast<unsigned long long>(x > 0 ? x : -x);
  std::vector<int> ds;
  const unsigned long long base = 2ULL * static_cast<unsigned long long>(lay_.n);
  while (mag) {
    ds.push_back(static_cast<int>(mag % base));
    mag /= base;
  }
  if (static_cast<int>(ds.size()) > lay_.digits)
    throw ConfigError("value exceeds bank capacity");

  auto add_digit = [&](int digit, int kd) {
    if (kd == 0) return;
    if (strategy == AddStrategy::kUnary) {
      for (int i = 0; i < kd; ++i)
        dir > 0 ? increment_digit(digit, 1, mask_row)
                : decrement_digit(digit, 1, mask_row);
    } else {
      dir > 0 ? increment_digit(digit, kd, mask_row)
              : decrement_digit(digit, kd, mask_row);
    }
  };

  if (policy == CarryPolicy::kFullRipple) {
    for (std::size_t i = 0; i < ds.size(); ++i) add_digit(static_cast<int>(i), ds[i]);
    sweep();
  } else {
    if (dir < 0) {
      // The deferral model tracks an unsigned virtual counter; settle before
      // moving backwards, then resolve eagerly like full-ripple.
      iarm->flush(*this);
      for (std::size_t i = 0; i < ds.size(); ++i) add_digit(static_cast<int>(i), ds[i]);
      sweep();
      // Borrows can raise decoded digits, so the scheduler's residues are
      // stale now; re-arm it at the settled ceiling.
      iarm->resync_resolved();
    } else {
      iarm->apply(*this, ds, [&](int digit, int kd) { add_digit(digit, kd); });
    }
  }
  return stats_.invocations - inv0;
}

std::vector<ColumnValue> CounterBank::read_counters() const {
  std::vector<ColumnValue> out(sa_->columns());
  const long long cap = capacity();
  for (std::size_t c = 0; c < sa_->columns(); ++c) {
    __int128 acc = 0;
    __int128 scale = 1;
    bool ok = true;
    for (int d = 0; d < lay_.digits; ++d) {
      JcWord w;
      w.n = lay_.n;
      w.bits.resize(static_cast<std::size_t>(lay_.n));
      for (int b = 0; b < lay_.n; ++b)
        w.bits[static_cast<std::size_t>(b)] = sa_->peek(lay_.bit_row(d, b), c);
      auto v = jc_try_decode(w);
      if (!v) {
        ok = false;
        break;
      }
      __int128 digit_val = *v;
      if (sa_->peek(lay_.onext(d), c))
        digit_val += (pending_dir_ < 0 ? -2LL : 2LL) * lay_.n;
      acc += digit_val * scale;
      scale *= 2 * lay_.n;
    }
    if (ok && lay_.has_sign && sa_->peek(lay_.osign_row, c)) acc -= cap;
    const auto lo = static_cast<__int128>(std::numeric_limits<long long>::min());
    const auto hi = static_cast<__int128>(std::numeric_limits<long long>::max());
    if (acc < lo || acc > hi) ok = false;
    out[c] = ColumnValue{ok ? static_cast<long long>(acc) : 0, ok};
  }
  return out;
}

void jc_add(CounterBank& dst, int dst_digit, CounterBank& src, int src_digit) {
  if (&dst.fabric() != &src.fabric())
    throw ConfigError("counter-to-counter add requires one subarray");
  const CounterLayout& dl = dst.layout();
  const CounterLayout& sl = src.layout();
  if (dl.n != sl.n) throw ConfigError("operand orders differ");
  const int n = dl.n;
  const std::size_t theta = dl.scratch1;
  Subarray& sa = dst.fabric();

  auto or_into_theta = [&](std::size_t bit_row) {
    MicroProgram p;
    p.n = n;
    p.purpose = "theta |= bit";
    p.emit_aap(MultiRowAddress::single(bit_row), MultiRowAddress::b_addr(0));
    p.emit_aap(MultiRowAddress::single(kC1), MultiRowAddress::b_addr(2));
    p.emit_ap(MultiRowAddress::triple(kT0, theta, kT2));
    dst.run(p, CounterBank::Bucket::kIncrement);
  };
  auto andnot_into_theta = [&](std::size_t bit_row) {
    MicroProgram p;
    p.n = n;
    p.purpose = "theta &= ~bit";
    p.emit_aap(MultiRowAddress::single(bit_row), MultiRowAddress::b_addr(5));
    p.emit_aap(MultiRowAddress::single(kC0), MultiRowAddress::b_addr(0));
    p.emit_ap(MultiRowAddress::triple(kDcc0, theta, kT0));
    dst.run(p, CounterBank::Bucket::kIncrement);
  };

  {  // theta <- 0
    MicroProgram p;
    p.n = n;
    p.purpose = "theta init";
    p.emit_aap(MultiRowAddress::single(kC0), MultiRowAddress::single(theta));
    dst.run(p, CounterBank::Bucket::kIncrement);
  }
  (void)sa;
  // Forward pass, MSB down: theta turns on at the operand's leading one and
  // stays on, contributing min(u, n) masked unit increments.
  for (int j = n - 1; j >= 0; --j) {
    or_into_theta(sl.bit_row(src_digit, j));
    dst.increment_digit(dst_digit, 1, static_cast<long>(theta));
  }
  // Reverse pass, LSB up: theta now holds [u >= 1]; clearing it bit by bit
  // contributes the remaining max(0, u - n) increments.
  for (int j = 0; j < n; ++j) {
    andnot_into_theta(sl.bit_row(src_digit, j));
    dst.increment_digit(dst_digit, 1, static_cast<long>(theta));
  }
}

}  // namespace jcim
