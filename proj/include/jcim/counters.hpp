// Counter bank engine: maps multi-digit Johnson counters onto subarray rows,
// executes digit increments/decrements, propagates pending carries under the
// full-ripple or deferred (IARM) policy, adds counter to counter, and decodes
// per-column values.
#pragma once

#include <cstdint>
#include <vector>

#include "jcim/fabric.hpp"
#include "jcim/jc.hpp"
#include "jcim/uprog.hpp"

namespace jcim {

class IarmScheduler;

struct ConfigError : FabricError {
  using FabricError::FabricError;
};
struct DirectionError : FabricError {
  using FabricError::FabricError;
};

enum class CarryPolicy { kFullRipple, kIarm };
enum class AddStrategy { kUnary, kKary };

// Cost instrumentation. "increment" ops belong to digit add/sub programs;
// "ripple" ops to carry resolution (ripple steps, pending clears, MSD
// resolution); copy_out_aap is charged for results leaving the bank.
struct BankStats {
  std::uint64_t aap = 0;
  std::uint64_t ap = 0;
  std::uint64_t increment_ops = 0;
  std::uint64_t ripple_ops = 0;
  std::uint64_t invocations = 0;  // digit-program invocations incl. ripples
  std::uint64_t copy_out_aap = 0;
  std::uint64_t saturation_events = 0;

  std::uint64_t total_ops() const { return aap + ap + copy_out_aap; }
};

struct ColumnValue {
  long long value = 0;
  bool valid = true;
};

// Rows a bank occupies: mask + 2 scratch + D*(n+1) + optional sign row.
std::size_t bank_rows(int n, int digits, bool has_sign);

class CounterBank {
 public:
  // Lays the bank out at rows [first_row, first_row + bank_rows) of sa,
  // zero-initializes them and sets the default mask to all ones.
  CounterBank(Subarray& sa, int n, int digits, bool has_sign,
              std::size_t first_row);

  const CounterLayout& layout() const { return lay_; }
  Subarray& fabric() { return *sa_; }
  BankStats& stats() { return stats_; }
  const BankStats& stats() const { return stats_; }
  long long capacity() const;  // (2n)^D
  int pending_direction() const { return pending_dir_; }

  // Host-side (free) state management.
  void reset();                        // zero all bank rows, mask back to ones
  bool any_pending(int digit) const;   // host peek at the O_next row
  bool any_pending() const;

  // Digit-level ops. mask_row < 0 means the bank's default (all-ones) mask.
  void increment_digit(int digit, int k, long mask_row = -1);
  void decrement_digit(int digit, int k, long mask_row = -1);

  // Carry/borrow resolution. ripple(d) advances digit d+1 under digit d's
  // pending mask, then clears the mask (requires d < D-1). resolve_msd()
  // folds the MSD pending row into the sign row (signed banks) or records a
  // saturation event and clears it (the bank value has wrapped mod capacity).
  void ripple(int digit);
  void resolve_msd();
  void sweep();  // ripple 0..D-2 then resolve_msd

  // Accumulate a signed value: base-2n digit adds followed by policy-defined
  // resolution. x == 0 costs zero fabric ops. IARM policy requires a
  // scheduler. Returns the number of digit-program invocations spent.
  std::uint64_t accumulate_value(long long x, long mask_row, AddStrategy strategy,
                                 CarryPolicy policy, IarmScheduler* iarm = nullptr);

  // Decoded per-column values; invalid codewords are reported, not masked.
  std::vector<ColumnValue> read_counters() const;

  // Internal-ish: run a program against the fabric with stats bucketing.
  enum class Bucket { kIncrement, kRipple, kOther };
  void run(const MicroProgram& prog, Bucket bucket);

 private:
  std::size_t resolve_mask(long mask_row) const;
  void require_direction(int dir);

  Subarray* sa_;
  CounterLayout lay_;
  BankStats stats_;
  int pending_dir_ = 0;  // +1 carries pending, -1 borrows pending, 0 none
};

// Counter-to-counter add (dst digit += src digit) via 2n mask-guided unit
// increments; pending carries go to dst's O_next row. Both banks must live in
// the same subarray and share n.
void jc_add(CounterBank& dst, int dst_digit, CounterBank& src, int src_digit);

}  // namespace jcim
