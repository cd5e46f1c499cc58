#include "jcim/uprog.hpp"

#include <numeric>
#include <sstream>

namespace jcim {

int MicroProgram::count_aap() const {
  int c = 0;
  for (const auto& op : ops) c += op.kind == OpKind::kAap;
  return c;
}

int MicroProgram::count_ap() const {
  int c = 0;
  for (const auto& op : ops) c += op.kind == OpKind::kAp;
  return c;
}

void MicroProgram::emit_aap(const MultiRowAddress& src, const MultiRowAddress& dst,
                            std::string note) {
  ops.push_back(MicroOp{OpKind::kAap, src, dst, std::move(note)});
}

void MicroProgram::emit_ap(const MultiRowAddress& addr, std::string note) {
  ops.push_back(MicroOp{OpKind::kAp, MultiRowAddress{}, addr, std::move(note)});
}

void MicroProgram::append(const MicroProgram& other) {
  ops.insert(ops.end(), other.ops.begin(), other.ops.end());
  step_ops += other.step_ops;
  save_ops += other.save_ops;
  boundary_ops += other.boundary_ops;
}

void run_program(const MicroProgram& prog, Subarray& sa) {
  for (const auto& op : prog.ops) {
    if (op.kind == OpKind::kAap)
      sa.aap(op.src, op.dst);
    else
      sa.ap(op.dst);
  }
}

std::string to_listing(const MicroProgram& prog) {
  std::ostringstream os;
  os << "# " << prog.purpose << " (n=" << prog.n;
  if (prog.k) os << ", k=" << prog.k;
  os << ", ops=" << prog.ops.size() << ")\n";
  std::size_t i = 0;
  for (const auto& op : prog.ops) {
    os << i++ << ": ";
    if (op.kind == OpKind::kAap)
      os << "AAP " << op.src.str() << " -> " << op.dst.str();
    else
      os << "AP  " << op.dst.str();
    if (!op.note.empty()) os << "   ; " << op.note;
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Transition pattern
// ---------------------------------------------------------------------------

int save_width(int n) {
  int w = 1;
  for (int j = 1; j < n; ++j) w = std::max(w, std::gcd(n, j));
  return w;
}

TransitionPattern make_pattern(int n, int k) {
  if (n < 2) throw FabricError("counter order must be >= 2");
  if (k < 1 || k > 2 * n - 1) throw FabricError("k must be in [1, 2n-1]");
  TransitionPattern pat;
  pat.n = n;
  pat.k = k;
  const int kp = k % n;
  auto inverted = [&](int t) { return k <= n ? t < k : t >= kp; };

  if (kp == 0) {  // k == n: every bit feeds back on itself, inverted
    // One save (the MSB) for wrap detection; the MSB step reads it back so
    // every cycle consumes its saved head exactly once.
    pat.save_targets.push_back(n - 1);
    for (int t = 0; t < n; ++t)
      pat.steps.push_back({t, t, true, t == n - 1});
  } else {
    const int g = std::gcd(n, kp);
    const int len = n / g;
    // The cycle whose members include bit n-1 is emitted last, headed by
    // n-1 itself, so the save row still holds the old MSB afterwards.
    const int msb_res = (n - 1) % g;
    std::vector<int> order;
    for (int r = 0; r < g; ++r)
      if (r != msb_res) order.push_back(r);
    order.push_back(msb_res);
    for (int r : order) {
      int head = (r == msb_res) ? n - 1 : r;
      pat.save_targets.push_back(head);
      int t = head;
      for (int j = 0; j < len; ++j) {
        int src = ((t - kp) % n + n) % n;
        bool last = j == len - 1;
        pat.steps.push_back({t, src, inverted(t), last});
        t = src;
      }
    }
  }
  pat.saves = static_cast<int>(pat.save_targets.size());
  return pat;
}

// ---------------------------------------------------------------------------
// Masked shift step (7 ops)
// ---------------------------------------------------------------------------

MicroProgram gen_masked_write(int n, std::size_t target_row, std::size_t src_row,
                              bool inverted, std::size_t mask_row) {
  if (target_row < kDataStart || mask_row < kDataStart)
    throw IllegalAddressError("masked step target/mask must be data rows");
  MicroProgram p;
  p.purpose = "masked step";
  p.n = n;
  auto B = MultiRowAddress::b_addr;
  p.emit_aap(MultiRowAddress::single(mask_row), B(9), "T1=m, DCC1=~m");
  p.emit_aap(MultiRowAddress::single(src_row), B(4), "DCC0=src");
  p.emit_aap(MultiRowAddress::single(kC0), B(0), "T0=0");
  p.emit_aap(MultiRowAddress::single(kC1), B(2), "T2=1");
  MultiRowAddress and_triple = B(11);  // {T0, T1, DCC0}
  if (inverted) and_triple.flag(2);
  p.emit_ap(and_triple, "v = m & src*");
  p.emit_ap(MultiRowAddress::triple(kDcc1, target_row, kT0),
            "w = MAJ3(~m, old, v)");
  p.emit_ap(MultiRowAddress::triple(kT1, target_row, kT2), "bit <- v | w");
  p.step_ops = static_cast<int>(p.ops.size());
  return p;
}

MicroProgram gen_masked_step(const CounterLayout& lay, int digit, int target_bit,
                             int src_bit, bool inverted, std::size_t mask_row) {
  MicroProgram p = gen_masked_write(lay.n, lay.bit_row(digit, target_bit),
                                    lay.bit_row(digit, src_bit), inverted, mask_row);
  p.digit = digit;
  return p;
}

// ---------------------------------------------------------------------------
// Unmasked unit increment: n-1 forward clones + save/feedback pair
// ---------------------------------------------------------------------------

MicroProgram gen_unit_increment(const CounterLayout& lay, int digit) {
  MicroProgram p;
  p.purpose = "unit increment (unmasked)";
  p.n = lay.n;
  p.k = 1;
  p.digit = digit;
  const int n = lay.n;
  // Clone the MSB through the complement port: the write stores ~MSB, which
  // is exactly the feedback value.
  p.emit_aap(MultiRowAddress::single(lay.bit_row(digit, n - 1)),
             MultiRowAddress::b_addr(5), "DCC0 <- ~MSB");
  for (int t = n - 1; t >= 1; --t)
    p.emit_aap(MultiRowAddress::single(lay.bit_row(digit, t - 1)),
               MultiRowAddress::single(lay.bit_row(digit, t)), "shift");
  p.emit_aap(MultiRowAddress::b_addr(4),
             MultiRowAddress::single(lay.bit_row(digit, 0)), "feedback ~MSB");
  p.step_ops = static_cast<int>(p.ops.size());
  return p;
}

// ---------------------------------------------------------------------------
// Wrap detection (6 ops). After the shift steps:
//   increment: wrap = MAJ3(x, theta, ~MSB')   x = 0 (k<=n) or m (k>n)
//   decrement: wrap = MAJ3(x, MSB', ~theta)
// where theta = saved pre-shift MSB. Masked-off columns have MSB' == theta,
// which zeroes the expression in all four variants.
// ---------------------------------------------------------------------------

MicroProgram gen_overflow_check(const CounterLayout& lay, int digit, int k,
                                std::size_t mask_row, Direction dir) {
  MicroProgram p;
  p.purpose = dir == Direction::kIncrement ? "overflow check" : "underflow check";
  p.n = lay.n;
  p.k = k;
  p.digit = digit;
  auto B = MultiRowAddress::b_addr;
  const std::size_t msb = lay.bit_row(digit, lay.n - 1);
  if (dir == Direction::kIncrement) {
    p.emit_aap(MultiRowAddress::single(msb), B(4), "DCC0 <- MSB'");
    p.emit_aap(MultiRowAddress::single(lay.scratch0), B(1), "T1 <- theta");
  } else {
    p.emit_aap(MultiRowAddress::single(lay.scratch0), B(4), "DCC0 <- theta");
    p.emit_aap(MultiRowAddress::single(msb), B(1), "T1 <- MSB'");
  }
  const bool masked_form = k > lay.n;
  p.emit_aap(MultiRowAddress::single(masked_form ? mask_row : kC0), B(0),
             masked_form ? "T0 <- m" : "T0 <- 0");
  p.emit_ap(MultiRowAddress::triple(kT0, kT1, kDcc0).with_flag(2),
            "wrap = MAJ3(x, a, ~b)");
  p.emit_aap(MultiRowAddress::single(kC1), B(2), "T2 <- 1");
  p.emit_ap(MultiRowAddress::triple(kT1, lay.onext(digit), kT2),
            "pending |= wrap");
  p.boundary_ops = static_cast<int>(p.ops.size());
  return p;
}

// ---------------------------------------------------------------------------
// Full k-ary program
// ---------------------------------------------------------------------------

MicroProgram gen_kary_program(const CounterLayout& lay, int digit, int k,
                              std::size_t mask_row, Direction dir) {
  const int n = lay.n;
  if (k < 1 || k > 2 * n - 1) throw FabricError("k must be in [1, 2n-1]");
  // A decrement by k is the increment pattern for 2n-k with a borrow detector.
  const int shift_k = dir == Direction::kIncrement ? k : 2 * n - k;
  TransitionPattern pat = make_pattern(n, shift_k);

  MicroProgram p;
  p.purpose = dir == Direction::kIncrement ? "k-ary increment" : "k-ary decrement";
  p.n = n;
  p.k = k;
  p.digit = digit;

  // Dummy saves pad program length to the worst case over k.
  const int pad = save_width(n) - pat.saves;
  for (int i = 0; i < pad; ++i)
    p.emit_aap(MultiRowAddress::single(kC0), MultiRowAddress::single(lay.scratch0),
               "save-slot pad");
  p.save_ops = pad;

  const std::size_t cycle_len = pat.steps.size() / pat.save_targets.size();
  std::size_t si = 0;
  for (std::size_t c = 0; c < pat.save_targets.size(); ++c) {
    const int head = pat.save_targets[c];
    p.emit_aap(MultiRowAddress::single(lay.bit_row(digit, head)),
               MultiRowAddress::single(lay.scratch0), "save cycle head");
    p.save_ops += 1;
    for (std::size_t j = 0; j < cycle_len; ++j, ++si) {
      const auto& st = pat.steps[si];
      const std::size_t src_row =
          st.src_from_save ? lay.scratch0 : lay.bit_row(digit, st.src);
      p.append(gen_masked_write(n, lay.bit_row(digit, st.target), src_row,
                                st.inverted, mask_row));
    }
  }
  p.append(gen_overflow_check(lay, digit, k, mask_row, dir));
  return p;
}

}  // namespace jcim
