// End-to-end acceptance checks for the counting fabric. Each criterion prints
// one PASS/FAIL line; the process exits nonzero if any criterion fails.
// Expected values and tolerances are pinned inline.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "jcim/backends.hpp"
#include "jcim/counters.hpp"
#include "jcim/iarm.hpp"
#include "jcim/io.hpp"
#include "jcim/jc.hpp"
#include "jcim/shield.hpp"
#include "jcim/tensor.hpp"
#include "jcim/timing.hpp"
#include "jcim/uprog.hpp"

using namespace jcim;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw CheckFailure(what);
}

void require_close(double got, double want, double rel_tol,
                   const std::string& what) {
  const double denom = std::abs(want) > 0 ? std::abs(want) : 1.0;
  if (std::abs(got - want) / denom > rel_tol) {
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want << " (rel tol "
       << rel_tol << ")";
    throw CheckFailure(os.str());
  }
}

std::vector<std::string> g_notes;  // printed under the current criterion

void note(const std::string& s) { g_notes.push_back(s); }

int hamming(const JcWord& a, const JcWord& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) d += a.bits[i] != b.bits[i];
  return d;
}

// ---------------------------------------------------------------------------
// 1. Codec: exhaustive roundtrip, unit distance, exactly 2n valid patterns.
// ---------------------------------------------------------------------------

void criterion_codec() {
  for (int n = 2; n <= 16; ++n) {
    for (int v = 0; v < 2 * n; ++v) {
      const JcWord w = jc_encode(v, n);
      require(jc_decode(w) == v, "roundtrip failed at n=" + std::to_string(n));
      const JcWord next = jc_encode((v + 1) % (2 * n), n);
      require(hamming(w, next) == 1,
              "adjacent states must differ in exactly one bit");
    }
    int valid = 0;
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
      JcWord w;
      w.n = n;
      w.bits.resize(static_cast<std::size_t>(n));
      for (int b = 0; b < n; ++b)
        w.bits[static_cast<std::size_t>(b)] =
            static_cast<std::uint8_t>((m >> b) & 1u);
      valid += jc_is_valid(w) ? 1 : 0;
    }
    require(valid == 2 * n,
            "exactly 2n patterns must be valid at n=" + std::to_string(n));
  }
}

// ---------------------------------------------------------------------------
// 2. Masked k-ary increments: exhaustive (n, state, k) with mask on/off.
// ---------------------------------------------------------------------------

void criterion_masked_kary() {
  for (int n = 2; n <= 8; ++n) {
    Subarray sa(kDataStart + bank_rows(n, 1, false) + 1, 2, FaultModel{});
    CounterBank bank(sa, n, 1, false, kDataStart);
    const std::size_t mask_row = kDataStart + bank_rows(n, 1, false);
    sa.write_row(mask_row, {1, 0});  // outside the bank; reset() keeps it
    // Raw ring state of digit 0, without the pending-crossing contribution.
    const auto decode_digit = [&](std::size_t col) {
      JcWord w;
      w.n = n;
      w.bits.resize(static_cast<std::size_t>(n));
      for (int b = 0; b < n; ++b)
        w.bits[static_cast<std::size_t>(b)] =
            sa.peek(bank.layout().bit_row(0, b), col);
      return jc_try_decode(w);
    };
    for (int v = 0; v < 2 * n; ++v) {
      for (int k = 1; k <= 2 * n - 1; ++k) {
        bank.reset();
        bank_write_values(bank, {v, v});
        bank.increment_digit(0, k, static_cast<long>(mask_row));
        const auto got0 = decode_digit(0);
        const auto got1 = decode_digit(1);
        require(got0.has_value() && got1.has_value(), "decode must stay valid");
        require(*got0 == (v + k) % (2 * n), "masked column must advance by k");
        require(*got1 == v, "unmasked column must not change");
        const bool wrapped = v + k >= 2 * n;
        require(sa.peek(bank.layout().onext(0), 0) == (wrapped ? 1 : 0),
                "pending flag must be set iff the digit wrapped");
        require(sa.peek(bank.layout().onext(0), 1) == 0,
                "unmasked column must not raise a pending flag");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 3. Exact op counts for every program family.
// ---------------------------------------------------------------------------

void criterion_op_counts() {
  // Single masked step: 7 ops (4 copies + 3 majority activations).
  for (int n : {3, 5, 8}) {
    const MicroProgram p =
        gen_masked_write(n, kDataStart, kDataStart + 1, false, kDataStart + 2);
    require(p.size() == 7, "masked step must cost 7 ops");
    require(p.count_aap() == 4 && p.count_ap() == 3,
            "masked step must be 4 copies + 3 majority ops");
  }
  // Full digit program: shift steps are exactly 7n and the total length is
  // k-invariant: save pad + 7n + a 6-op wrap block.
  for (int n : {3, 5, 8}) {
    Subarray sa(kDataStart + bank_rows(n, 1, false), 1, FaultModel{});
    CounterBank bank(sa, n, 1, false, kDataStart);
    for (int k = 1; k <= 2 * n - 1; ++k) {
      const MicroProgram p =
          gen_kary_program(bank.layout(), 0, k, bank.layout().mask_row);
      require(p.step_ops == 7 * n, "shift steps must total 7n ops");
      require(p.boundary_ops == 6, "wrap block must cost 6 ops");
      require(static_cast<int>(p.size()) == save_width(n) + 7 * n + 6,
              "digit program length must be save pad + 7n + 6");
      require(p.count_ap() == 3 * n + 2, "digit program majority-op count");
    }
  }
  // Protected programs: 13n+16 / 23n+26 / 33n+36 for r = 2/4/6.
  for (int n : {3, 5, 8}) {
    Subarray sa(kDataStart + bank_rows(n, 1, false) + 1 + kProtRowCount, 1,
                FaultModel{});
    CounterBank bank(sa, n, 1, false, kDataStart);
    const std::size_t mask_row = kDataStart + bank_rows(n, 1, false);
    const ProtRows pr = make_prot_rows(mask_row + 1);
    for (int r : {2, 4, 6}) {
      ProtectionConfig cfg;
      cfg.fr_checks = r;
      const auto want =
          static_cast<std::size_t>((5 * r + 3) * n + (5 * r + 6));
      require(want == static_cast<std::size_t>(
                          r == 2 ? 13 * n + 16
                                 : (r == 4 ? 23 * n + 26 : 33 * n + 36)),
              "protected closed form must match the r = 2/4/6 cost rows");
      for (int k : {1, 3, 2 * n - 1}) {
        require(protected_ops(n, k, cfg) == want, "protected op-count formula");
        const ProtProgram p =
            gen_protected_increment(bank.layout(), pr, 0, k, mask_row, cfg);
        require(p.size() == want, "protected generator must match the formula");
        ProtectionConfig paired = cfg;
        paired.demorgan_pairing = true;
        const ProtProgram pp =
            gen_protected_increment(bank.layout(), pr, 0, k, mask_row, paired);
        require(pp.size() == protected_ops(n, k, paired),
                "paired generator must match its own count");
        require(pp.size() <= p.size(), "pairing must never add ops");
      }
    }
  }
  // Bitline-logic substrate: 3n+4 counting ops plus 3 overflow ops, every k.
  for (int n : {3, 5, 8}) {
    Subarray sa(kDataStart + alt_bank_rows(Backend::kPinatubo, n, 1), 1,
                FaultModel{});
    AltBank ab = make_alt_bank(sa, Backend::kPinatubo, n, 1, kDataStart);
    for (int k : {1, 3}) {
      const LogicProgram p = gen_alt_increment(ab, 0, k, -1, true);
      require(static_cast<int>(p.size()) == 3 * n + 7,
              "bitline-logic program must cost 3n+4 (+3 overflow)");
      require(p.overflow_ops == 3, "bitline-logic overflow block is 3 ops");
      require(p.extra_ops == 0, "bitline-logic has no k-dependent surplus");
    }
  }
  // NOR-only substrate: counting is exactly 6n+4 at k=1; wrap detection is a
  // separately accounted block in this op model and is reported, not assumed.
  for (int n : {3, 5, 8}) {
    Subarray sa(kDataStart + alt_bank_rows(Backend::kMagic, n, 1), 1,
                FaultModel{});
    AltBank ab = make_alt_bank(sa, Backend::kMagic, n, 1, kDataStart);
    const LogicProgram p = gen_alt_increment(ab, 0, 1, -1, true);
    require(static_cast<int>(p.size()) - p.overflow_ops == 6 * n + 4,
            "NOR-only counting must cost 6n+4 at k=1");
    require(p.extra_ops == 0, "NOR-only k=1 has no surplus");
    if (n == 5)
      note("NOR-only substrate: counting = 6n+4 at k=1; wrap detection adds " +
           std::to_string(p.overflow_ops) + " ops, reported separately");
  }
  // Ripple-carry baseline: 12 ops per accumulator bit plus carry init,
  // independent of the addend value.
  {
    std::vector<std::size_t> acc, add;
    for (int i = 0; i < 12; ++i) acc.push_back(kDataStart + i);
    for (int i = 0; i < 6; ++i) add.push_back(kDataStart + 12 + i);
    const MicroProgram p =
        gen_rca_add(acc, add, kDataStart + 18, kDataStart + 19);
    require(static_cast<int>(p.size()) == kRcaOpsPerBit * 12 + 1,
            "ripple-carry add is 12 ops per accumulator bit");
  }
}

// ---------------------------------------------------------------------------
// 4. Unit-stride vs constant-stride cost ratio on uniform 8-bit streams.
// ---------------------------------------------------------------------------

void criterion_stride_ratio() {
  constexpr int kSamples = 10000;
  for (int n : {3, 4, 5, 6}) {
    std::mt19937_64 rng(4242u + static_cast<unsigned>(n));
    std::uniform_int_distribution<int> dist(0, 255);
    std::vector<int> inputs(kSamples);
    for (int& x : inputs) x = dist(rng);
    for (int bits : {16, 32, 64}) {
      const int d = capacity_digits(n, bits);
      Subarray sa(kDataStart + bank_rows(n, d, false), 1, FaultModel{});
      CounterBank bank(sa, n, d, false, kDataStart);
      std::uint64_t ops[2] = {0, 0};
      int idx = 0;
      for (AddStrategy st : {AddStrategy::kUnary, AddStrategy::kKary}) {
        bank.reset();
        const std::uint64_t before = bank.stats().increment_ops;
        for (int x : inputs)
          bank.accumulate_value(x, -1, st, CarryPolicy::kFullRipple);
        ops[idx++] = bank.stats().increment_ops - before;
      }
      const double ratio =
          static_cast<double>(ops[0]) / static_cast<double>(ops[1]);
      std::ostringstream os;
      os << "radix " << 2 * n << ", " << bits << "-bit capacity: ratio "
         << ratio;
      note(os.str());
      require(ratio >= 2.0 && ratio <= 6.0,
              "unary/k-ary op ratio must lie in [2, 6]: " + os.str());
    }
  }
}

// ---------------------------------------------------------------------------
// 5. Deferred carries: capacity-independent cost, never worse than rippling,
//    and the reference hand trace.
// ---------------------------------------------------------------------------

void criterion_deferred_carries() {
  // (a) identical op count across 16/32/64-bit capacities.
  {
    std::mt19937_64 rng(515);
    std::uniform_int_distribution<int> dist(0, 255);
    std::vector<int> inputs(200);
    for (int& x : inputs) x = dist(rng);
    std::vector<std::uint64_t> totals;
    for (int bits : {16, 32, 64}) {
      const int d = capacity_digits(5, bits);
      Subarray sa(kDataStart + bank_rows(5, d, false), 1, FaultModel{});
      CounterBank bank(sa, 5, d, false, kDataStart);
      IarmScheduler sched(5, d);
      for (int x : inputs)
        bank.accumulate_value(x, -1, AddStrategy::kKary, CarryPolicy::kIarm,
                              &sched);
      totals.push_back(bank.stats().total_ops());
    }
    require(totals[0] == totals[1] && totals[1] == totals[2],
            "deferred-carry op count must not depend on counter capacity");
    note("deferred-carry ops for a 200-input stream: " +
         std::to_string(totals[0]) + " at every capacity");
  }
  // (b) never more ops than full rippling, stream by stream, same sums.
  for (unsigned seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(900 + seed);
    std::uniform_int_distribution<int> dist(0, 255);
    std::vector<int> inputs(60);
    for (int& x : inputs) x = dist(rng);
    const int d = capacity_digits(5, 16);
    long long expect = 0;
    for (int x : inputs) expect += x;
    std::uint64_t ops_iarm = 0, ops_full = 0;
    {
      Subarray sa(kDataStart + bank_rows(5, d, false), 1, FaultModel{});
      CounterBank bank(sa, 5, d, false, kDataStart);
      IarmScheduler sched(5, d);
      for (int x : inputs)
        bank.accumulate_value(x, -1, AddStrategy::kKary, CarryPolicy::kIarm,
                              &sched);
      sched.flush(bank);
      ops_iarm = bank.stats().total_ops();
      require(bank.read_counters()[0].value == expect,
              "deferred-carry accumulation must decode to the true sum");
    }
    {
      Subarray sa(kDataStart + bank_rows(5, d, false), 1, FaultModel{});
      CounterBank bank(sa, 5, d, false, kDataStart);
      for (int x : inputs)
        bank.accumulate_value(x, -1, AddStrategy::kKary,
                              CarryPolicy::kFullRipple);
      ops_full = bank.stats().total_ops();
      require(bank.read_counters()[0].value == expect,
              "rippled accumulation must decode to the true sum");
    }
    require(ops_iarm <= ops_full,
            "deferring carries must never cost more than full rippling");
  }
  // (c) the reference walk: load 9999, then thirteen +9 steps, then flush.
  // The flushed sum 10116 needs a fifth base-10 digit.
  {
    Subarray sa(kDataStart + bank_rows(5, 5, false), 1, FaultModel{});
    CounterBank bank(sa, 5, 5, false, kDataStart);
    IarmScheduler sched(5, 5);
    const auto add_fn = [&](int digit, int k) {
      bank.increment_digit(digit, k, -1);
    };
    // Virtual digit = decoded digit value + 10 per unresolved crossing.
    const auto fabric_virtual = [&]() {
      std::vector<int> out;
      for (int d = 0; d < 5; ++d) {
        JcWord w;
        w.n = 5;
        w.bits.resize(5);
        for (int b = 0; b < 5; ++b)
          w.bits[static_cast<std::size_t>(b)] =
              sa.peek(bank.layout().bit_row(d, b), 0);
        out.push_back(jc_decode(w) + 10 * sa.peek(bank.layout().onext(d), 0));
      }
      return out;
    };
    sched.apply(bank, {9, 9, 9, 9}, add_fn);  // load 9999
    require(sched.virtual_digits() == std::vector<int>{9, 9, 9, 9, 0},
            "trace start state");
    std::vector<std::vector<int>> states;
    for (int step = 0; step < 13; ++step) {
      sched.apply(bank, {9}, add_fn);
      require(sched.virtual_digits() == fabric_virtual(),
              "scheduler and fabric must agree at every trace step");
      states.push_back(sched.virtual_digits());
    }
    require(states[0] == std::vector<int>{18, 9, 9, 9, 0}, "trace step 1");
    require(states[1] == std::vector<int>{17, 10, 9, 9, 0}, "trace step 2");
    require(states[9] == std::vector<int>{19, 17, 9, 9, 0}, "trace step 10");
    require(states[10] == std::vector<int>{18, 18, 9, 9, 0}, "trace step 11");
    require(states[11] == std::vector<int>{17, 19, 9, 9, 0}, "trace step 12");
    require(states[12] == std::vector<int>{16, 10, 10, 9, 0}, "trace step 13");
    for (const auto& st : states)
      for (int v : st)
        require(v <= 19, "virtual digit may exceed 9 by one crossing at most");
    sched.flush(bank);
    require(bank.read_counters()[0].value == 9999 + 13 * 9,
            "flushed trace must decode to 10116");
    require(!bank.any_pending(), "flush must clear every pending flag");
  }
}

// ---------------------------------------------------------------------------
// 6. Tensor kernels against host integer arithmetic.
// ---------------------------------------------------------------------------

void criterion_kernels() {
  std::mt19937_64 rng(616);
  auto dim = [&](int hi) {
    return 1 + static_cast<int>(rng() % static_cast<unsigned>(hi));
  };

  KernelConfig cfg;
  cfg.n = 5;
  cfg.capacity_bits = 16;

  int checked = 0;
  for (int t = 0; t < 100; ++t) {  // binary-matrix vector products
    const int m = dim(32), k = dim(32);
    const MatrixI a01 = make_random_kernel({m, k, 1, 1, false, 0.3, rng()}).a;
    VectorI x(k);
    std::uniform_int_distribution<int> xv(-31, 31);
    for (int j = 0; j < k; ++j) x(j) = xv(rng);
    TensorEngine eng(cfg);
    const KernelResult res = eng.gemv(a01, x);
    const VectorI want = a01 * x;
    for (int i = 0; i < m; ++i)
      require(res.out(i, 0) == want(i), "vector product mismatch");
    ++checked;
  }
  for (int t = 0; t < 100; ++t) {  // binary-mask matrix products
    const int m = dim(16), k = dim(32), n_out = dim(16);
    const MatrixI a = make_random_kernel({m, k, 1, 5, true, 0.2, rng()}).a;
    const MatrixI b01 = make_random_kernel({k, n_out, 1, 1, false, 0.4, rng()}).a;
    TensorEngine eng(cfg);
    const KernelResult res = eng.gemm(a, b01);
    require(res.out == a * b01, "binary-mask matrix product mismatch");
    ++checked;
  }
  for (int t = 0; t < 100; ++t) {  // general integer matrix products
    const int m = dim(16), k = dim(16), n_out = dim(16);
    const bool ternary = t % 5 == 0;
    const bool unsigned_run = t % 7 == 0;
    const MatrixI a =
        make_random_kernel(
            {m, k, 1, 4, !unsigned_run, t % 3 == 0 ? 0.5 : 0.0, rng()})
            .a;
    const MatrixI b =
        make_random_kernel({k, n_out, 1, ternary ? 1 : 4, !unsigned_run,
                            t % 4 == 0 ? 0.5 : 0.0, rng()})
            .a;
    KernelConfig c2 = cfg;
    c2.signed_values = !unsigned_run;
    if (t % 3 == 1) c2.policy = CarryPolicy::kIarm;
    if (t % 9 == 2) c2.strategy = AddStrategy::kUnary;
    TensorEngine eng(c2);
    const KernelResult res = eng.gemm_int(a, b);
    require(res.out == a * b, "integer matrix product mismatch");
    ++checked;
  }
  std::uniform_int_distribution<long long> relu_v(-9999, 9999);
  for (int t = 0; t < 100; ++t) {  // rectifier
    const int w = dim(32);
    Subarray sa(kDataStart + bank_rows(5, 5, true), static_cast<std::size_t>(w),
                FaultModel{});
    CounterBank bank(sa, 5, 5, true, kDataStart);
    std::vector<long long> vals(static_cast<std::size_t>(w));
    for (auto& v : vals) v = relu_v(rng);
    bank_write_values(bank, vals);
    bank_relu(bank);
    const auto got = bank_read_values(bank);
    for (std::size_t c = 0; c < vals.size(); ++c)
      require(got[c] == std::max(vals[c], 0LL), "rectifier mismatch");
    ++checked;
  }
  std::uniform_int_distribution<long long> shift_v(0, 1500);
  for (int t = 0; t < 100; ++t) {  // left shift by repeated doubling
    const int w = dim(32);
    const int shifts = static_cast<int>(rng() % 4);
    const std::size_t rows = bank_rows(5, 5, false);
    Subarray sa(kDataStart + 2 * rows, static_cast<std::size_t>(w),
                FaultModel{});
    CounterBank bank(sa, 5, 5, false, kDataStart);
    CounterBank scratch(sa, 5, 5, false, kDataStart + rows);
    std::vector<long long> vals(static_cast<std::size_t>(w));
    for (auto& v : vals) v = shift_v(rng);
    bank_write_values(bank, vals);
    bank_shift_left(bank, scratch, shifts);
    const auto got = bank_read_values(bank);
    for (std::size_t c = 0; c < vals.size(); ++c)
      require(got[c] == (vals[c] << shifts), "left-shift mismatch");
    ++checked;
  }
  std::uniform_int_distribution<long long> add_a(-20000, 20000);
  std::uniform_int_distribution<long long> add_b(0, 40000);
  for (int t = 0; t < 100; ++t) {  // elementwise vector add
    const int w = dim(32);
    const std::size_t rows = bank_rows(5, 5, true);
    Subarray sa(kDataStart + 2 * rows, static_cast<std::size_t>(w),
                FaultModel{});
    CounterBank dst(sa, 5, 5, true, kDataStart);
    CounterBank src(sa, 5, 5, true, kDataStart + rows);
    std::vector<long long> av(static_cast<std::size_t>(w)),
        bv(static_cast<std::size_t>(w));
    for (auto& v : av) v = add_a(rng);
    for (auto& v : bv) v = add_b(rng);
    bank_write_values(dst, av);
    bank_write_values(src, bv);
    bank_vector_add(dst, src);
    const auto got = bank_read_values(dst);
    for (std::size_t c = 0; c < av.size(); ++c)
      require(got[c] == av[c] + bv[c], "vector add mismatch");
    ++checked;
  }
  // Zero inputs must cost zero counting ops (result copy-out aside).
  {
    TensorEngine eng(cfg);
    MatrixI a01 = MatrixI::Zero(8, 8);
    a01.diagonal().setOnes();
    const KernelResult res = eng.gemv(a01, VectorI::Zero(8));
    require(res.stats.aap == 0 && res.stats.ap == 0 &&
                res.stats.increment_ops == 0,
            "all-zero inputs must cost zero fabric counting ops");
  }
  // Sparser operands cost monotonically fewer counting ops (fixed seeds).
  {
    std::uint64_t prev = ~0ull;
    for (double sparsity : {0.0, 0.5, 0.9}) {
      std::uint64_t ops = 0;
      for (unsigned seed = 1; seed <= 3; ++seed) {
        const KernelOperands op =
            make_random_kernel({16, 16, 16, 4, true, sparsity, seed});
        TensorEngine eng(cfg);
        const KernelResult res = eng.gemm_int(op.a, op.b);
        require(res.out == op.a * op.b, "sparse product mismatch");
        ops += res.stats.increment_ops;
      }
      require(ops < prev, "counting ops must fall as sparsity rises");
      prev = ops;
    }
  }
  note(std::to_string(checked) + " random kernel instances checked");
}

// ---------------------------------------------------------------------------
// 7. Fault protection: exhaustive single-fault audit, whole-program injection
//    sweep, Monte-Carlo agreement, and the analytic rate table.
// ---------------------------------------------------------------------------

void criterion_fault_protection() {
  // (a) unit-level audit: no single likely fault can commit a wrong value.
  for (int r : {2, 4, 6})
    require(single_fault_audit(r) == 0,
            "a single likely fault must never commit silently (r=" +
                std::to_string(r) + ")");

  // Program-level sweep: inject one fault at every majority-activation site
  // of the protected increment. The committed state must always equal the
  // fault-free reference; a logically masked flip may go undetected, but
  // detection must fire whenever the flip would have corrupted state.
  std::uint64_t injections = 0, detections = 0;
  for (bool paired : {false, true}) {
    ProtectionConfig cfg;
    cfg.fr_checks = 2;
    cfg.demorgan_pairing = paired;
    for (int k : {3, 7}) {
      for (int v = 0; v < 10; ++v) {
        const std::size_t mask_row = kDataStart + bank_rows(5, 1, false);
        const std::size_t prot0 = mask_row + 1;
        const auto build = [&](Subarray& sa) {
          CounterBank bank(sa, 5, 1, false, kDataStart);
          sa.write_row(mask_row, {1, 0});
          bank_write_values(bank, {v, v});
          return bank;
        };
        // Fault-free reference.
        Subarray ref(prot0 + kProtRowCount, 2, FaultModel{});
        CounterBank refbank = build(ref);
        const ProtRows pr = make_prot_rows(prot0);
        const ProtProgram prog =
            gen_protected_increment(refbank.layout(), pr, 0, k, mask_row, cfg);
        execute_protected(prog, ref, cfg);
        // One digit plus its pending flag decodes to the full virtual value.
        const auto refvals = bank_read_values(refbank);
        require(refvals[0] == v + k && refvals[1] == v,
                "reference protected run must compute the increment");
        std::size_t maj_sites = 0;
        for (const ProtOp& op : prog.ops)
          if (op.kind == ProtKind::kMaj) ++maj_sites;
        for (std::size_t site = 0; site < maj_sites; ++site) {
          const std::size_t col = site % 5 == 0 ? 1 : 0;  // also hit masked col
          Subarray sa(prot0 + kProtRowCount, 2, FaultModel{});
          CounterBank bank = build(sa);
          sa.inject_fault(site, col);
          const ProtTelemetry tel = execute_protected(prog, sa, cfg);
          ++injections;
          detections += tel.detected ? 1 : 0;
          for (int b = 0; b < 5; ++b)
            require(sa.peek_row(bank.layout().bit_row(0, b)) ==
                        ref.peek_row(refbank.layout().bit_row(0, b)),
                    "no injection may corrupt the committed digit");
          require(sa.peek_row(bank.layout().onext(0)) ==
                      ref.peek_row(refbank.layout().onext(0)),
                  "no injection may corrupt the pending flag");
        }
      }
    }
  }
  require(detections * 2 > injections,
          "the sweep must detect the majority of injected faults");
  {
    std::ostringstream os;
    os << injections << " single-fault injections across every majority site, "
       << "all repaired; " << detections
       << " detected (rest logically masked)";
    note(os.str());
  }

  // (b) Monte-Carlo through the fabric vs the analytic model, 3-sigma bands.
  {
    const FaultRates an = rates_analytic(0.1, 2);
    const FaultRates mc = rates_montecarlo(0.1, 2, 1000000, 20260814);
    std::ostringstream os;
    os.precision(4);
    os << "1e6 trials at p=0.1, r=2: error " << mc.error_rate << " (analytic "
       << an.error_rate << "), detect " << mc.detect_rate << " (analytic "
       << an.detect_rate << ")";
    note(os.str());
    require(an.error_rate >= mc.error_lo && an.error_rate <= mc.error_hi,
            "analytic silent-error rate must sit in the Monte-Carlo 3-sigma band");
    require(an.detect_rate >= mc.detect_lo && an.detect_rate <= mc.detect_hi,
            "analytic detection rate must sit in the Monte-Carlo 3-sigma band");
  }

  // (c) pinned rate table: silent-error and detection rates for
  //     p in {1e-1, 1e-2, 1e-4} x r in {2, 4, 6}; 10% relative tolerance,
  //     read-path floor cells exact.
  struct Cell {
    double p;
    int r;
    double err;  // expected silent-error rate (1e-20 = read-path floor)
    bool floored;
    double detect;  // expected detection rate
  };
  const Cell table[] = {
      {1e-1, 2, 1.4e-3, false, 3.1e-1},  {1e-2, 2, 1.5e-6, false, 3.5e-2},
      {1e-4, 2, 1.5e-12, false, 3.5e-4}, {1e-1, 4, 1.4e-5, false, 4.4e-1},
      {1e-2, 4, 1.5e-10, false, 5.4e-2}, {1e-4, 4, 1e-20, true, 5.5e-4},
      {1e-1, 6, 1.4e-7, false, 5.5e-1},  {1e-2, 6, 1.5e-14, false, 7.3e-2},
      {1e-4, 6, 1e-20, true, 7.5e-4},
  };
  for (const Cell& c : table) {
    const FaultRates fr = rates_analytic(c.p, c.r);
    std::ostringstream os;
    os << "p=" << c.p << ", r=" << c.r;
    if (c.floored)
      require(fr.error_rate == 1e-20,
              "floored cell must return the read-path bound: " + os.str());
    else
      require_close(fr.error_rate, c.err, 0.10,
                    "silent-error rate at " + os.str());
    require_close(fr.detect_rate, c.detect, 0.10,
                  "detection rate at " + os.str());
  }
}

// ---------------------------------------------------------------------------
// 8. Substrate equivalence on exhaustive single-digit cases.
// ---------------------------------------------------------------------------

void criterion_substrates() {
  for (int v = 0; v < 10; ++v) {
    for (int k = 1; k <= 9; ++k) {
      // Charge-sharing reference: raw ring state plus the pending flag.
      Subarray rsa(kDataStart + bank_rows(5, 1, false) + 1, 2, FaultModel{});
      CounterBank ref(rsa, 5, 1, false, kDataStart);
      const std::size_t mask_row = kDataStart + bank_rows(5, 1, false);
      rsa.write_row(mask_row, {1, 0});
      bank_write_values(ref, {v, v});
      ref.increment_digit(0, k, static_cast<long>(mask_row));
      const auto ref_digit = [&](std::size_t col) {
        JcWord w;
        w.n = 5;
        w.bits.resize(5);
        for (int b = 0; b < 5; ++b)
          w.bits[static_cast<std::size_t>(b)] =
              rsa.peek(ref.layout().bit_row(0, b), col);
        return jc_try_decode(w);
      };
      const auto want0 = ref_digit(0);
      const auto want1 = ref_digit(1);
      require(want0.has_value() && want1.has_value(), "reference must decode");
      const std::uint8_t want_pending = rsa.peek(ref.layout().onext(0), 0);

      for (Backend be : {Backend::kPinatubo, Backend::kMagic}) {
        Subarray sa(kDataStart + alt_bank_rows(be, 5, 1), 2, FaultModel{});
        AltBank ab = make_alt_bank(sa, be, 5, 1, kDataStart);
        sa.write_row(ab.mask_row, {1, 0});
        alt_write_digit(sa, ab, 0, v);
        const LogicProgram prog = gen_alt_increment(ab, 0, k, -1, true);
        run_logic(sa, prog, be == Backend::kMagic);
        const auto got = alt_read_digit(sa, ab, 0);
        const auto pend = alt_read_pending(sa, ab, 0);
        require(got[0].has_value() && got[1].has_value(),
                "substrate result must decode");
        require(*got[0] == *want0 && *got[1] == *want1,
                "all substrates must produce the reference digits");
        require(pend[0] == want_pending && pend[1] == 0,
                "all substrates must produce the reference pending flags");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 9. Latency model closed form and monotonicity.
// ---------------------------------------------------------------------------

void criterion_timing() {
  TimingModel tm;
  for (int banks : {1, 2, 4, 8, 16, 32}) {
    const double per_bank = (tm.t_ras + tm.t_rp + tm.slack + tm.t_rrd) /
                            static_cast<double>(banks);
    const double expect = std::max({per_bank, tm.t_rrd, tm.t_faw / 4.0});
    require(std::abs(tm.interval(banks) - expect) < 1e-12,
            "issue interval must match the closed form");
  }
  require(std::abs(tm.speedup(16) - tm.interval(1) / tm.interval(16)) < 1e-12,
          "speedup must be the interval ratio");
  require(std::abs(tm.speedup(16) - 54.13 / 3.63) < 1e-9,
          "16-bank speedup must be 54.13 ns / 3.63 ns");
  double prev = 1e300;
  for (int banks = 1; banks <= 64; ++banks) {
    const double lat = tm.estimate_latency_ns(100000, banks);
    require(lat <= prev + 1e-9, "latency must be non-increasing in bank count");
    prev = lat;
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* desc;
    std::function<void()> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "state codec: exhaustive roundtrip, unit distance, 2n valid states",
       criterion_codec},
      {2, "masked k-ary increments match the oracle exhaustively (n=2..8)",
       criterion_masked_kary},
      {3, "op-count formulas are exact for every program family",
       criterion_op_counts},
      {4, "unary/k-ary mean-op ratio lies in [2,6] on uniform 8-bit streams",
       criterion_stride_ratio},
      {5, "deferred carries: capacity-independent, never worse, exact trace",
       criterion_deferred_carries},
      {6, "tensor kernels equal host integer arithmetic on random instances",
       criterion_kernels},
      {7, "fault protection: audit, injection sweep, Monte-Carlo, rate table",
       criterion_fault_protection},
      {8, "substrates produce identical counter states exhaustively",
       criterion_substrates},
      {9, "latency estimator matches its closed form and is monotone",
       criterion_timing},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    g_notes.clear();
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      c.body();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("%s criterion %d: %s (%.2fs)\n", ok ? "PASS" : "FAIL", c.id,
                c.desc, secs);
    for (const std::string& n : g_notes)
      std::printf("       - %s\n", n.c_str());
    if (!ok) {
      std::printf("       ! %s\n", detail.c_str());
      ++failures;
    }
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
