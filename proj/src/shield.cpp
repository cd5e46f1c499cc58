#include "jcim/shield.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace jcim {

std::vector<std::uint8_t> segment_parity(const std::vector<std::uint8_t>& bits,
                                         int segment) {
  if (segment <= 0) throw std::invalid_argument("segment size must be positive");
  const std::size_t segs = (bits.size() + segment - 1) / segment;
  std::vector<std::uint8_t> par(segs, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    par[i / segment] ^= (bits[i] & 1u);
  return par;
}

bool masked_or_is_xor_check(const Subarray& sa, std::size_t row_a,
                            std::size_t row_b) {
  const auto a = sa.peek_row(row_a);
  const auto b = sa.peek_row(row_b);
  for (std::size_t c = 0; c < a.size(); ++c)
    if (a[c] && b[c]) return false;
  return true;
}

ProtRows make_prot_rows(std::size_t first_row) {
  ProtRows pr{};
  std::size_t r = first_row;
  pr.stage_cur = r++;
  pr.stage_last = r++;
  pr.bstage = r++;
  pr.ir1 = r++;
  pr.ir2 = r++;
  pr.fr = r++;
  pr.readout = r++;
  pr.save_a = r++;
  pr.save_b = r++;
  pr.x1 = r++;
  pr.x2 = r++;
  pr.pad = r++;
  pr.ovf_msb = r++;
  pr.u_row = r++;
  pr.u_store = r++;
  pr.o_old = r++;
  return pr;
}

namespace {

void require_even_r(const ProtectionConfig& cfg) {
  if (cfg.fr_checks < 2 || cfg.fr_checks % 2 != 0)
    throw ConfigError("fr_checks must be an even count >= 2");
}

ProtOp stage(std::size_t src, std::size_t dst, std::string note) {
  ProtOp op;
  op.kind = ProtKind::kStage;
  op.src = src;
  op.dst = dst;
  op.note = std::move(note);
  return op;
}

ProtOp maj(MajOperand a, MajOperand b, MajOperand c, std::size_t dst,
           std::string note) {
  ProtOp op;
  op.kind = ProtKind::kMaj;
  op.a = a;
  op.b = b;
  op.c = c;
  op.dst = dst;
  op.note = std::move(note);
  return op;
}

// One XOR-embedded triple: IR1 = lhs&rhs, IR2 = lhs|rhs, then r/2 FR
// computations (first from the live triple, the rest re-read the stored IRs),
// each followed by a checked readout. `save_dst` receives IR1 (the masked
// term the commit consumes).
void emit_triple(ProtProgram& p, const ProtRows& pr, MajOperand lhs,
                 MajOperand rhs, std::size_t save_dst, int fr_count,
                 const std::string& tag) {
  const int start = static_cast<int>(p.ops.size());
  auto at = [&](ProtOp op) {
    op.retry_start = start;
    p.ops.push_back(std::move(op));
  };
  at(maj(lhs, MajOperand::zero(), rhs, pr.ir1, tag + ": IR1 = AND"));
  at(maj(lhs, MajOperand::one(), rhs, pr.ir2, tag + ": IR2 = OR"));
  at(maj(MajOperand::of(pr.ir2), MajOperand::zero(), MajOperand::of(pr.ir1, true),
         pr.fr, tag + ": FR = IR2 & ~IR1"));
  {
    ProtOp op = stage(pr.fr, pr.readout, tag + ": FR readout + parity check");
    op.check = CheckKind::kShadowRow;
    at(op);
  }
  at(stage(pr.ir1, save_dst, tag + ": keep masked term"));
  for (int j = 1; j < fr_count; ++j) {
    at(stage(pr.ir1, pr.x1, tag + ": reload IR1"));
    at(stage(pr.ir2, pr.x2, tag + ": reload IR2"));
    at(maj(MajOperand::of(pr.x2), MajOperand::zero(), MajOperand::of(pr.x1, true),
           pr.fr, tag + ": FR recompute"));
    ProtOp op = stage(pr.fr, pr.readout, tag + ": FR readout + parity check");
    op.check = CheckKind::kShadowRow;
    at(op);
    at(stage(kC0, pr.pad, tag + ": pad"));
  }
}

}  // namespace

ProtProgram gen_protected_increment(const CounterLayout& lay, const ProtRows& pr,
                                    int digit, int k, std::size_t mask_row,
                                    const ProtectionConfig& cfg) {
  require_even_r(cfg);
  const int n = lay.n;
  if (k < 1 || k > 2 * n - 1) throw ConfigError("k must lie in [1, 2n-1]");
  const TransitionPattern pat = make_pattern(n, k);
  const MajOperand mask = MajOperand::of(mask_row);
  const MajOperand mask_inv = MajOperand::of(mask_row, true);

  ProtProgram p;
  p.n = n;
  p.k = k;
  p.r = cfg.fr_checks;
  p.paired = cfg.demorgan_pairing;

  const std::size_t cycle_len = pat.steps.size() / pat.save_targets.size();
  std::size_t si = 0;
  for (std::size_t head_i = 0; head_i < pat.save_targets.size(); ++head_i) {
    const int head = pat.save_targets[head_i];
    // The cycle-last step reads the head bit, which is overwritten first;
    // its source stage is hoisted to the top of the cycle.
    p.ops.push_back(stage(lay.bit_row(digit, head), pr.stage_last,
                          "hoisted source stage for cycle-last step"));
    for (std::size_t j = 0; j < cycle_len; ++j, ++si) {
      const TransitionPattern::Step& st = pat.steps[si];
      const std::size_t src_stage =
          st.src_from_save ? pr.stage_last : pr.stage_cur;
      if (!st.src_from_save)
        p.ops.push_back(
            stage(lay.bit_row(digit, st.src), pr.stage_cur, "stage source bit"));
      p.ops.push_back(
          stage(lay.bit_row(digit, st.target), pr.bstage, "stage old bit"));

      // A failing commit check retries from here: the FR checks are blind to
      // an IR1 flip when IR2 = 0 and to an IR2 flip when IR1 = 1, so a stored
      // IR (and a term derived from it) can reach the commit silently
      // corrupted. Only re-deriving from the staged operands repairs that.
      // The scope starts after the stage ops on purpose: the commit has
      // already overwritten the target bit row, so bstage must not be
      // re-staged from it.
      const int body_start = static_cast<int>(p.ops.size());
      if (cfg.demorgan_pairing && st.inverted) {
        // Triple on (source, ~mask): IR1 is the keep-shaped term and ~IR2 is
        // exactly ~source & mask, so one triple certifies the inverted step.
        emit_triple(p, pr, MajOperand::of(src_stage), mask_inv, pr.x1,
                    cfg.fr_checks / 2, "paired shift/keep");
        ProtOp sa_op = maj(MajOperand::zero(), MajOperand::one(),
                           MajOperand::of(pr.ir2, true), pr.save_a,
                           "shift term = ~IR2");
        sa_op.retry_start = body_start;
        p.ops.push_back(sa_op);
        ProtOp sb_op = maj(MajOperand::of(pr.bstage), MajOperand::zero(),
                           mask_inv, pr.save_b, "keep term (commit-checked)");
        sb_op.retry_start = body_start;
        p.ops.push_back(sb_op);
      } else {
        emit_triple(p, pr, mask, MajOperand::of(src_stage, st.inverted),
                    pr.save_a, cfg.fr_checks / 2, "shift");
        emit_triple(p, pr, MajOperand::of(pr.bstage), mask_inv, pr.save_b,
                    cfg.fr_checks / 2, "keep");
      }

      ProtOp commit = maj(MajOperand::of(pr.save_a), MajOperand::one(),
                          MajOperand::of(pr.save_b),
                          lay.bit_row(digit, st.target), "commit = OR of terms");
      commit.check = CheckKind::kShadowRow;
      commit.retry_start = body_start;
      p.ops.push_back(commit);
    }
  }

  // Wrap detector, feeding the pending row. The hoisted stage of the MSB
  // cycle still holds the pre-update MSB.
  const std::size_t onext = lay.onext(digit);
  const MajOperand x = (k <= n) ? MajOperand::zero() : mask;
  // The pending flag is saved once, outside the retry scope: a retry after a
  // corrupted pending commit must combine the recomputed wrap with the
  // *original* flag, not re-read the row it just miswrote.
  p.ops.push_back(stage(onext, pr.o_old, "preserve pending flag"));
  const int ovf_start = static_cast<int>(p.ops.size());
  auto ov = [&](ProtOp op) {
    op.retry_start = ovf_start;
    p.ops.push_back(std::move(op));
  };
  ov(stage(lay.bit_row(digit, n - 1), pr.ovf_msb, "stage updated MSB"));
  ov(maj(x, MajOperand::of(pr.stage_last), MajOperand::of(pr.ovf_msb, true),
         pr.u_row, "wrap = MAJ(x, old MSB, ~new MSB)"));
  ov(stage(pr.u_row, pr.u_store, "keep wrap value"));
  ov(maj(MajOperand::of(pr.u_store), MajOperand::one(), MajOperand::of(pr.o_old),
         onext, "pending |= wrap"));
  {
    ProtOp op = stage(onext, pr.readout, "pending readout + check");
    op.check = CheckKind::kShadowRow;
    op.retry_start = ovf_start;
    p.ops.push_back(op);
  }
  for (int j = 0; j < cfg.fr_checks; ++j) {
    ov(stage(pr.stage_last, pr.x1, "reload old MSB"));
    ov(stage(pr.ovf_msb, pr.x2, "reload new MSB"));
    ov(maj(x, MajOperand::of(pr.x1), MajOperand::of(pr.x2, true), pr.fr,
           "wrap recompute"));
    {
      ProtOp op = stage(pr.fr, pr.readout, "wrap recompute check");
      op.check = CheckKind::kCompareRow;
      op.compare_row = pr.u_store;
      op.retry_start = ovf_start;
      p.ops.push_back(op);
    }
    ov(stage(kC0, pr.pad, "pad"));
  }
  return p;
}

std::size_t protected_ops(int n, int k, const ProtectionConfig& cfg) {
  require_even_r(cfg);
  const int r = cfg.fr_checks;
  std::size_t total = 5u * r + 6u;  // wrap detector
  if (!cfg.demorgan_pairing) return total + static_cast<std::size_t>(n) * (5u * r + 3u);
  const TransitionPattern pat = make_pattern(n, k);
  for (const TransitionPattern::Step& st : pat.steps)
    total += st.inverted ? (5u * r / 2u + 5u) : (5u * r + 3u);
  return total;
}

// ---------------------------------------------------------------------------
// Executor.
// ---------------------------------------------------------------------------

namespace {

void exec_op(Subarray& sa, const ProtOp& op) {
  if (op.kind == ProtKind::kStage) {
    sa.aap(MultiRowAddress::single(op.src), MultiRowAddress::single(op.dst));
    return;
  }
  auto load = [&](const MajOperand& o, std::size_t slot) {
    std::size_t src;
    switch (o.kind) {
      case MajOperand::K::kRow:
        src = o.row;
        break;
      case MajOperand::K::kZero:
        src = kC0;
        break;
      case MajOperand::K::kOne:
        src = kC1;
        break;
      default:
        throw FabricError("bad operand");
    }
    sa.aap(MultiRowAddress::single(src), MultiRowAddress::single(slot));
  };
  if (op.a.invert || op.b.invert)
    throw FabricError("only the third MAJ operand may be inverted");
  load(op.a, kT0);
  load(op.b, kT1);
  load(op.c, kDcc0);
  MultiRowAddress tri = MultiRowAddress::triple(kT0, kT1, kDcc0);
  if (op.c.invert) tri = tri.with_flag(2);
  sa.ap(tri);
  sa.aap(MultiRowAddress::single(kT0), MultiRowAddress::single(op.dst));
}

}  // namespace

ProtTelemetry execute_protected(const ProtProgram& prog, Subarray& sa,
                                const ProtectionConfig& cfg) {
  Subarray shadow = sa;  // lockstep fault-free reference
  shadow.set_fault_model(FaultModel{});
  shadow.clear_injections();

  ProtTelemetry tel;
  std::uint64_t budget =
      static_cast<std::uint64_t>(std::max(cfg.max_retries, 0));
  std::size_t i = 0;
  while (i < prog.ops.size()) {
    const ProtOp& op = prog.ops[i];
    exec_op(sa, op);
    exec_op(shadow, op);
    bool fail = false;
    if (op.check == CheckKind::kShadowRow) {
      fail = sa.peek_row(op.dst) != shadow.peek_row(op.dst);
    } else if (op.check == CheckKind::kCompareRow) {
      fail = sa.peek_row(op.dst) != sa.peek_row(op.compare_row);
    }
    if (fail) {
      ++tel.detected;
      if (budget == 0)
        throw UnrecoverableFaultError("fault persisted past retry budget");
      --budget;
      ++tel.retries;
      i = static_cast<std::size_t>(op.retry_start);
      continue;
    }
    ++i;
  }
  return tel;
}

// ---------------------------------------------------------------------------
// Rates.
// ---------------------------------------------------------------------------

double p_delta(double p) { return p * (3.0 - 2.0 * p) / 2.0; }

FaultRates rates_analytic(double p, int r, double p_read_bound) {
  FaultRates out;
  out.p = p;
  out.r = r;
  out.analytic = true;
  const double pd = p_delta(p);
  double err = pd * std::pow(p, r);
  // Below twice the read-path bound the masking path no longer dominates.
  if (err <= 2.0 * p_read_bound) err = p_read_bound;
  out.error_rate = err;
  out.detect_rate = 1.0 - (pd * std::pow(p, r) +
                           (1.0 - pd) * std::pow(1.0 - p, r));
  out.error_lo = out.error_hi = out.error_rate;
  out.detect_lo = out.detect_hi = out.detect_rate;
  return out;
}

namespace {

// One protected XOR unit on a `width`-column fabric: computes the IRs, r FR
// recomputations from the stored IR rows, and the host-side committed value.
struct UnitRows {
  std::size_t a = kDataStart + 0;
  std::size_t b = kDataStart + 1;
  std::size_t ir1 = kDataStart + 2;
  std::size_t ir2 = kDataStart + 3;
  std::size_t fr = kDataStart + 4;
};

struct UnitResult {
  std::vector<std::uint8_t> committed;          // IR2 & ~IR1, read back
  std::vector<std::vector<std::uint8_t>> frs;   // r FR rows, read back
};

UnitResult run_unit(Subarray& sa, int r) {
  UnitRows rw;
  auto single = [](std::size_t x) { return MultiRowAddress::single(x); };
  // IR1 = a & b
  sa.aap(single(rw.a), single(kT0));
  sa.aap(single(rw.b), single(kT1));
  sa.aap(single(kC0), single(kDcc0));
  sa.ap(MultiRowAddress::triple(kT0, kT1, kDcc0));
  sa.aap(single(kT0), single(rw.ir1));
  // IR2 = a | b
  sa.aap(single(rw.a), single(kT0));
  sa.aap(single(rw.b), single(kT1));
  sa.aap(single(kC1), single(kDcc0));
  sa.ap(MultiRowAddress::triple(kT0, kT1, kDcc0));
  sa.aap(single(kT0), single(rw.ir2));
  UnitResult res;
  for (int j = 0; j < r; ++j) {
    sa.aap(single(rw.ir2), single(kT0));
    sa.aap(single(kC0), single(kT1));
    sa.aap(single(rw.ir1), single(kDcc0));
    sa.ap(MultiRowAddress::triple(kT0, kT1, kDcc0).with_flag(2));
    sa.aap(single(kT0), single(rw.fr));
    res.frs.push_back(sa.read_row(rw.fr));
  }
  const auto ir1 = sa.read_row(rw.ir1);
  const auto ir2 = sa.read_row(rw.ir2);
  res.committed.resize(ir1.size());
  for (std::size_t c = 0; c < ir1.size(); ++c)
    res.committed[c] = static_cast<std::uint8_t>(ir2[c] & !ir1[c]);
  return res;
}

}  // namespace

FaultRates rates_montecarlo(double p, int r, std::uint64_t trials,
                            std::uint64_t seed, double p_read) {
  constexpr std::size_t kWidth = 4096;
  FaultModel fm;
  fm.p_likely = p;
  fm.p_read = p_read;
  fm.seed = seed;
  std::mt19937_64 host(seed ^ 0x9e3779b97f4a7c15ull);
  std::bernoulli_distribution coin(0.5);

  std::uint64_t done = 0, errors = 0, detects = 0;
  UnitRows rw;
  while (done < trials) {
    const std::size_t batch =
        static_cast<std::size_t>(std::min<std::uint64_t>(kWidth, trials - done));
    // Each batch needs its own flip stream; reusing the seed would replay one
    // fixed fault pattern and shrink the effective sample to a single batch.
    fm.seed = host();
    Subarray sa(8, batch, fm);
    std::vector<std::uint8_t> a(batch), b(batch);
    for (std::size_t c = 0; c < batch; ++c) {
      a[c] = coin(host);
      b[c] = coin(host);
    }
    sa.write_row(rw.a, a);
    sa.write_row(rw.b, b);
    const UnitResult res = run_unit(sa, r);
    for (std::size_t c = 0; c < batch; ++c) {
      const std::uint8_t truth = a[c] ^ b[c];
      bool all_fr_clean = true, any_fr_bad = false;
      for (const auto& fr : res.frs) {
        if (fr[c] != truth) {
          any_fr_bad = true;
          all_fr_clean = false;
        }
      }
      if (res.committed[c] != truth && all_fr_clean) ++errors;
      if (any_fr_bad) ++detects;
    }
    done += batch;
  }

  FaultRates out;
  out.p = p;
  out.r = r;
  out.analytic = false;
  out.trials = trials;
  out.error_rate = static_cast<double>(errors) / static_cast<double>(trials);
  out.detect_rate = static_cast<double>(detects) / static_cast<double>(trials);
  auto band = [&](double rate, double& lo, double& hi) {
    const double se = std::sqrt(
        std::max(rate * (1.0 - rate) / static_cast<double>(trials), 0.0));
    lo = std::max(0.0, rate - 3.0 * se);
    hi = std::min(1.0, rate + 3.0 * se);
  };
  band(out.error_rate, out.error_lo, out.error_hi);
  band(out.detect_rate, out.detect_lo, out.detect_hi);
  return out;
}

int single_fault_audit(int r) {
  int silent = 0;
  for (int av = 0; av < 2; ++av) {
    for (int bv = 0; bv < 2; ++bv) {
      for (int site = 0; site < 2 + r; ++site) {
        Subarray sa(8, 1, FaultModel{});
        UnitRows rw;
        sa.fill_row(rw.a, static_cast<std::uint8_t>(av));
        sa.fill_row(rw.b, static_cast<std::uint8_t>(bv));
        sa.inject_fault(static_cast<std::uint64_t>(site), 0);
        const UnitResult res = run_unit(sa, r);
        const std::uint8_t truth = static_cast<std::uint8_t>(av ^ bv);
        bool detected = false;
        for (const auto& fr : res.frs)
          if (fr[0] != truth) detected = true;
        if (res.committed[0] != truth && !detected) ++silent;
      }
    }
  }
  return silent;
}

}  // namespace jcim
