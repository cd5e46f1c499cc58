#include "jcim/backends.hpp"

#include <algorithm>

namespace jcim {

Backend backend_from_string(const std::string& s) {
  if (s == "ambit") return Backend::kAmbit;
  if (s == "pinatubo") return Backend::kPinatubo;
  if (s == "magic") return Backend::kMagic;
  throw ConfigError("unknown backend: " + s);
}

std::string to_string(Backend b) {
  switch (b) {
    case Backend::kAmbit: return "ambit";
    case Backend::kPinatubo: return "pinatubo";
    case Backend::kMagic: return "magic";
  }
  return "?";
}

void LogicProgram::emit(LogicOp op, std::size_t dst, std::size_t a, std::size_t b,
                        std::string note) {
  cmds.push_back(LogicCmd{op, dst, a, b, std::move(note)});
}

void run_logic(Subarray& sa, const LogicProgram& prog, bool nor_only) {
  const std::size_t cols = sa.columns();
  std::vector<std::uint8_t> out(cols);
  for (const auto& c : prog.cmds) {
    if (nor_only && c.op != LogicOp::kNor2 && c.op != LogicOp::kInit1)
      throw ConfigError("NOR-only substrate got a non-NOR command");
    switch (c.op) {
      case LogicOp::kInit1:
        sa.fill_row(c.dst, 1);
        continue;
      case LogicOp::kNot1: {
        const auto& a = sa.peek_row(c.a);
        for (std::size_t i = 0; i < cols; ++i) out[i] = !a[i];
        break;
      }
      case LogicOp::kCopy: {
        out = sa.peek_row(c.a);
        break;
      }
      case LogicOp::kAnd2: {
        const auto& a = sa.peek_row(c.a);
        const auto& b = sa.peek_row(c.b);
        for (std::size_t i = 0; i < cols; ++i) out[i] = a[i] & b[i];
        break;
      }
      case LogicOp::kOr2: {
        const auto& a = sa.peek_row(c.a);
        const auto& b = sa.peek_row(c.b);
        for (std::size_t i = 0; i < cols; ++i) out[i] = a[i] | b[i];
        break;
      }
      case LogicOp::kNor2: {
        const auto& a = sa.peek_row(c.a);
        const auto& b = sa.peek_row(c.b);
        if (nor_only) {
          // Memristive NOR is stateful: the output cell can only be pulled
          // down from its initialized 1.
          const auto& d = sa.peek_row(c.dst);
          for (std::size_t i = 0; i < cols; ++i)
            out[i] = static_cast<std::uint8_t>(d[i] & !(a[i] | b[i]));
        } else {
          // Sense-amp logic is nonstateful: the result overwrites.
          for (std::size_t i = 0; i < cols; ++i)
            out[i] = static_cast<std::uint8_t>(!(a[i] | b[i]));
        }
        break;
      }
    }
    sa.write_row(c.dst, out);
  }
}

// ---------------------------------------------------------------------------
// Bank layout
// ---------------------------------------------------------------------------

std::size_t alt_bank_rows(Backend, int n, int digits) {
  return 1 + 8 + 2 * static_cast<std::size_t>(n) +
         static_cast<std::size_t>(digits) * (static_cast<std::size_t>(n) + 1);
}

AltBank make_alt_bank(Subarray& sa, Backend b, int n, int digits,
                      std::size_t first_row) {
  if (b == Backend::kAmbit)
    throw ConfigError("use CounterBank for the charge-sharing substrate");
  AltBank bank;
  bank.backend = b;
  bank.n = n;
  bank.digits = digits;
  std::size_t r = first_row;
  bank.mask_row = r++;
  bank.mbar = r++;
  bank.theta = r++;
  bank.thetabar = r++;
  bank.nmsb = r++;
  bank.tmp0 = r++;
  bank.tmp1 = r++;
  bank.tmp2 = r++;
  bank.tmp3 = r++;
  for (int i = 0; i < n; ++i) bank.v_rows.push_back(r++);
  for (int i = 0; i < n; ++i) bank.u_rows.push_back(r++);
  bank.bit_rows.resize(static_cast<std::size_t>(digits));
  bank.onext_rows.resize(static_cast<std::size_t>(digits));
  for (int d = 0; d < digits; ++d) {
    for (int i = 0; i < n; ++i)
      bank.bit_rows[static_cast<std::size_t>(d)].push_back(r++);
    bank.onext_rows[static_cast<std::size_t>(d)] = r++;
  }
  if (r > sa.rows()) throw ConfigError("subarray too small for bank");
  // Zero state: mask all ones; stored polarity differs per substrate.
  const std::uint8_t zero_bit = b == Backend::kMagic ? 1 : 0;
  sa.fill_row(bank.mask_row, 1);
  for (int d = 0; d < digits; ++d) {
    for (int i = 0; i < n; ++i) sa.fill_row(bank.bit_row(d, i), zero_bit);
    sa.fill_row(bank.onext(d), zero_bit);
  }
  return bank;
}

void alt_write_digit(Subarray& sa, const AltBank& bank, int digit, int value) {
  JcWord w = jc_encode(value, bank.n);
  const bool inv = bank.backend == Backend::kMagic;
  for (int i = 0; i < bank.n; ++i)
    sa.fill_row(bank.bit_row(digit, i),
                static_cast<std::uint8_t>(inv ? !w.bits[static_cast<std::size_t>(i)]
                                              : w.bits[static_cast<std::size_t>(i)]));
}

std::vector<std::optional<int>> alt_read_digit(Subarray& sa, const AltBank& bank,
                                               int digit) {
  const bool inv = bank.backend == Backend::kMagic;
  std::vector<std::optional<int>> out(sa.columns());
  for (std::size_t c = 0; c < sa.columns(); ++c) {
    JcWord w;
    w.n = bank.n;
    w.bits.resize(static_cast<std::size_t>(bank.n));
    for (int i = 0; i < bank.n; ++i) {
      std::uint8_t bit = sa.peek(bank.bit_row(digit, i), c);
      w.bits[static_cast<std::size_t>(i)] = inv ? !bit : bit;
    }
    out[c] = jc_try_decode(w);
  }
  return out;
}

std::vector<std::uint8_t> alt_read_pending(Subarray& sa, const AltBank& bank,
                                           int digit) {
  const bool inv = bank.backend == Backend::kMagic;
  std::vector<std::uint8_t> out(sa.columns());
  for (std::size_t c = 0; c < sa.columns(); ++c) {
    std::uint8_t bit = sa.peek(bank.onext(digit), c);
    out[c] = inv ? !bit : bit;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bitline-logic increment: 3n+4 (+3), phase-ordered so every source is read
// before any counter row is rewritten.
// ---------------------------------------------------------------------------

static LogicProgram gen_pinatubo_increment(const AltBank& bank, int digit, int k,
                                           std::size_t mask, bool with_overflow) {
  const int n = bank.n;
  TransitionPattern pat = make_pattern(n, k);
  LogicProgram p;
  p.purpose = "bitline-logic k-ary increment";
  p.n = n;
  p.k = k;

  p.emit(LogicOp::kNot1, bank.mbar, mask, 0, "~m");
  p.emit(LogicOp::kCopy, bank.theta, bank.bit_row(digit, n - 1), 0, "theta = old MSB");
  p.emit(LogicOp::kNot1, bank.thetabar, bank.theta, 0, "~theta");
  p.fixed_ops = 3;

  // Keep = old bit where the mask is off.
  for (int t = 0; t < n; ++t)
    p.emit(LogicOp::kAnd2, bank.v_rows[static_cast<std::size_t>(t)],
           bank.bit_row(digit, t), bank.mbar, "v = bit & ~m");
  // Shift-in term; all reads still see pre-update rows.
  for (const auto& st : pat.steps) {
    const std::size_t u = bank.u_rows[static_cast<std::size_t>(st.target)];
    if (st.src == n - 1) {
      p.emit(LogicOp::kAnd2, u, st.inverted ? bank.thetabar : bank.theta, mask,
             "u from theta");
    } else if (st.inverted) {
      p.emit(LogicOp::kNor2, u, bank.mbar, bank.bit_row(digit, st.src),
             "u = m & ~src");
    } else {
      p.emit(LogicOp::kAnd2, u, bank.bit_row(digit, st.src), mask, "u = m & src");
    }
  }
  for (int t = 0; t < n; ++t)
    p.emit(LogicOp::kOr2, bank.bit_row(digit, t),
           bank.v_rows[static_cast<std::size_t>(t)],
           bank.u_rows[static_cast<std::size_t>(t)], "bit = v | u");
  p.bit_ops = 3 * n;

  p.emit(LogicOp::kNot1, bank.nmsb, bank.bit_row(digit, n - 1), 0, "~MSB'");
  p.fixed_ops += 1;

  if (with_overflow) {
    if (k <= n) {
      p.emit(LogicOp::kAnd2, bank.tmp0, bank.theta, bank.nmsb, "wrap raw");
      p.emit(LogicOp::kAnd2, bank.tmp1, bank.tmp0, mask, "wrap & m");
      p.emit(LogicOp::kOr2, bank.onext(digit), bank.onext(digit), bank.tmp1,
             "pending |= wrap");
    } else {
      p.emit(LogicOp::kOr2, bank.tmp0, bank.theta, bank.nmsb, "wrap raw");
      p.emit(LogicOp::kAnd2, bank.tmp1, bank.tmp0, mask, "wrap & m");
      p.emit(LogicOp::kOr2, bank.onext(digit), bank.onext(digit), bank.tmp1,
             "pending |= wrap");
    }
    p.overflow_ops = 3;
  }
  return p;
}

// ---------------------------------------------------------------------------
// NOR-only increment. Rows are stored complemented, so
//   keep  = bit & ~m  = NOR(~bit, m)
//   shift = src & m   = NOR(~src, ~m)        (plain source)
//   shift = ~src & m  = NOR(src_true, ~m)    (inverted source)
//   ~new  = NOR(keep, shift)  -- written straight into the stored row.
// Each result row is initialized to 1 first. 6n+4 for k = 1; polarity saves
// beyond that are counted in extra_ops, wrap detection in overflow_ops.
// ---------------------------------------------------------------------------

static void nor_pair(LogicProgram& p, std::size_t dst, std::size_t a, std::size_t b,
                     const char* note) {
  p.emit(LogicOp::kInit1, dst, 0, 0);
  p.emit(LogicOp::kNor2, dst, a, b, note);
}

static LogicProgram gen_magic_increment(const AltBank& bank, int digit, int k,
                                        std::size_t mask, bool with_overflow) {
  const int n = bank.n;
  TransitionPattern pat = make_pattern(n, k);
  LogicProgram p;
  p.purpose = "NOR-only k-ary increment";
  p.n = n;
  p.k = k;

  nor_pair(p, bank.mbar, mask, mask, "~m");
  p.fixed_ops = 2;

  const std::size_t cycle_len = pat.steps.size() / pat.save_targets.size();
  std::size_t si = 0;
  int budget_used = 2;
  for (std::size_t c = 0; c < pat.save_targets.size(); ++c) {
    const int head = pat.save_targets[c];
    // True-polarity copy of the head; the last emitted one doubles as theta
    // for wrap detection (the MSB cycle runs last).
    nor_pair(p, bank.theta, bank.bit_row(digit, head), bank.bit_row(digit, head),
             "save head (true polarity)");
    budget_used += 2;
    const bool last_forward = !pat.steps[si + cycle_len - 1].inverted;
    if (last_forward) {
      nor_pair(p, bank.thetabar, bank.theta, bank.theta, "save head (stored polarity)");
      budget_used += 2;
    }
    for (std::size_t j = 0; j < cycle_len; ++j, ++si) {
      const auto& st = pat.steps[si];
      nor_pair(p, bank.tmp0, bank.bit_row(digit, st.target), mask, "keep = bit & ~m");
      if (st.src_from_save) {
        nor_pair(p, bank.tmp1, st.inverted ? bank.theta : bank.thetabar, bank.mbar,
                 "shift from save");
      } else if (st.inverted) {
        nor_pair(p, bank.tmp2, bank.bit_row(digit, st.src), bank.bit_row(digit, st.src),
                 "true polarity of live source");
        budget_used += 2;
        nor_pair(p, bank.tmp1, bank.tmp2, bank.mbar, "shift = ~src & m");
      } else {
        nor_pair(p, bank.tmp1, bank.bit_row(digit, st.src), bank.mbar,
                 "shift = src & m");
      }
      // NOR(keep, shift) = ~(new bit) is exactly the stored polarity.
      nor_pair(p, bank.bit_row(digit, st.target), bank.tmp0, bank.tmp1,
               "stored bit = NOR(keep, shift)");
      budget_used += 6;
    }
  }
  p.bit_ops = 6 * n;
  p.extra_ops = budget_used - (6 * n + 4);
  // (budget_used counts everything except overflow; bit_ops+fixed cover 6n+4)

  if (with_overflow) {
    const std::size_t before = p.cmds.size();
    const std::size_t msb_stored = bank.bit_row(digit, n - 1);  // holds ~MSB'
    if (k <= n) {
      nor_pair(p, bank.tmp0, bank.theta, bank.theta, "~theta");
      nor_pair(p, bank.tmp1, msb_stored, msb_stored, "MSB'");
      nor_pair(p, bank.tmp2, bank.tmp0, bank.tmp1, "wrap = theta & ~MSB'");
    } else {
      nor_pair(p, bank.tmp1, bank.theta, msb_stored, "~(theta | ~MSB')");
      nor_pair(p, bank.tmp2, bank.tmp1, bank.mbar, "wrap = m & (theta | ~MSB')");
    }
    // pending' = pending | wrap, stored complemented.
    nor_pair(p, bank.tmp3, bank.onext(digit), bank.onext(digit), "pending");
    nor_pair(p, bank.onext(digit), bank.tmp3, bank.tmp2, "stored pending'");
    p.overflow_ops = static_cast<int>(p.cmds.size() - before);
  }
  return p;
}

LogicProgram gen_alt_increment(const AltBank& bank, int digit, int k, long mask_row,
                               bool with_overflow) {
  const std::size_t mask =
      mask_row < 0 ? bank.mask_row : static_cast<std::size_t>(mask_row);
  if (k < 1 || k > 2 * bank.n - 1) throw ConfigError("k must be in [1, 2n-1]");
  return bank.backend == Backend::kPinatubo
             ? gen_pinatubo_increment(bank, digit, k, mask, with_overflow)
             : gen_magic_increment(bank, digit, k, mask, with_overflow);
}

// ---------------------------------------------------------------------------
// Ripple-carry baseline
// ---------------------------------------------------------------------------

MicroProgram gen_rca_add(const std::vector<std::size_t>& acc_rows,
                         const std::vector<std::size_t>& addend_rows,
                         std::size_t carry_a, std::size_t carry_b) {
  MicroProgram p;
  p.purpose = "ripple-carry add";
  auto B = MultiRowAddress::b_addr;
  p.emit_aap(MultiRowAddress::single(kC0), MultiRowAddress::single(carry_a),
             "carry <- 0");
  std::size_t c_in = carry_a, c_out = carry_b;
  for (std::size_t i = 0; i < acc_rows.size(); ++i) {
    const std::size_t a = acc_rows[i];
    const std::size_t b = i < addend_rows.size() ? addend_rows[i] : kC0;
    p.emit_aap(MultiRowAddress::single(c_in), B(8), "T0=c, DCC0=~c");
    p.emit_aap(MultiRowAddress::single(a), B(1));
    p.emit_aap(MultiRowAddress::single(b), B(2));
    p.emit_ap(MultiRowAddress::triple(kT1, kT2, kT0), "g1 = MAJ3(a,b,c)");
    p.emit_aap(MultiRowAddress::single(kT1), MultiRowAddress::single(c_out),
               "carry out");
    p.emit_aap(MultiRowAddress::single(a), B(3));
    p.emit_aap(MultiRowAddress::single(b), B(6));
    p.emit_ap(MultiRowAddress::triple(kT3, kDcc1, kDcc0), "g2 = MAJ3(a,b,~c)");
    p.emit_aap(MultiRowAddress::single(kT1), B(5), "DCC0 <- ~g1");
    p.emit_aap(MultiRowAddress::single(c_in), B(0), "T0 = c");
    p.emit_ap(MultiRowAddress::triple(kDcc0, kT3, kT0), "sum = MAJ3(~g1,g2,c)");
    p.emit_aap(MultiRowAddress::single(kT0), MultiRowAddress::single(a), "write sum");
    std::swap(c_in, c_out);
  }
  p.step_ops = static_cast<int>(p.ops.size());
  return p;
}

}  // namespace jcim
