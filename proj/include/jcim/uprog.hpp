// MicroPrograms: sequences of AAP/AP commands generated for counter banks.
// Covers the 7-op masked shift step, unmasked unit increment, full k-ary
// increment/decrement programs with hazard-safe cycle ordering, and the
// 6-op wrap-detection block.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jcim/fabric.hpp"

namespace jcim {

// ---------------------------------------------------------------------------
// Row layout of one counter bank inside a subarray.
// ---------------------------------------------------------------------------

struct CounterLayout {
  int n = 0;        // Johnson order: 2n states per digit
  int digits = 1;   // D
  bool has_sign = false;

  std::size_t mask_row = 0;   // engine-owned default mask (all ones)
  std::size_t scratch0 = 0;   // cycle-head save row (theta)
  std::size_t scratch1 = 0;   // aux row (running mask of counter-to-counter add)
  std::vector<std::vector<std::size_t>> bit_rows;  // [digit][bit]
  std::vector<std::size_t> onext_rows;             // [digit] pending-carry rows
  std::size_t osign_row = 0;  // valid only when has_sign

  std::size_t bit_row(int digit, int bit) const {
    return bit_rows[static_cast<std::size_t>(digit)][static_cast<std::size_t>(bit)];
  }
  std::size_t onext(int digit) const {
    return onext_rows[static_cast<std::size_t>(digit)];
  }
};

// ---------------------------------------------------------------------------
// Program IR
// ---------------------------------------------------------------------------

enum class OpKind : std::uint8_t { kAap, kAp };

struct MicroOp {
  OpKind kind;
  MultiRowAddress src;   // AAP only
  MultiRowAddress dst;   // AAP destination / AP triple
  std::string note;
};

struct MicroProgram {
  std::vector<MicroOp> ops;
  std::string purpose;
  int n = 0;
  int k = 0;
  int digit = -1;

  // Accounting buckets (ops, not commands): per-bit shift steps, the save
  // slot (incl. padding), and the wrap-detection block.
  int step_ops = 0;
  int save_ops = 0;
  int boundary_ops = 0;

  std::size_t size() const { return ops.size(); }
  int count_aap() const;
  int count_ap() const;

  void emit_aap(const MultiRowAddress& src, const MultiRowAddress& dst,
                std::string note = {});
  void emit_ap(const MultiRowAddress& addr, std::string note = {});
  void append(const MicroProgram& other);
};

void run_program(const MicroProgram& prog, Subarray& sa);
std::string to_listing(const MicroProgram& prog);

// ---------------------------------------------------------------------------
// k-ary transition pattern: which source feeds each bit, with or without
// inversion, plus a hazard-safe emission order (source cycles; the cycle
// containing the MSB goes last so the saved head doubles as the pre-shift
// MSB for wrap detection).
// ---------------------------------------------------------------------------

struct TransitionPattern {
  struct Step {
    int target;
    int src;
    bool inverted;
    bool src_from_save;  // source row already overwritten; read the save row
  };
  int n = 0;
  int k = 0;
  std::vector<Step> steps;          // emission order
  std::vector<int> save_targets;    // bit whose row is saved before each cycle
  int saves = 0;                    // = save_targets.size()
};

TransitionPattern make_pattern(int n, int k);

// Worst-case saves over all k for a given n (pad width making program length
// k-invariant): max(1, max_j gcd(n, j)).
int save_width(int n);

enum class Direction { kIncrement, kDecrement };

// One masked shift step (7 ops): target_row <- m ? (inverted ? ~src : src)
//                                              : target_row
// src_row may be any single-row-readable address incl. constants and the
// scratch save row; target_row and mask_row must be data rows.
MicroProgram gen_masked_write(int n, std::size_t target_row, std::size_t src_row,
                              bool inverted, std::size_t mask_row);

// Convenience wrapper resolving counter-bank rows.
MicroProgram gen_masked_step(const CounterLayout& lay, int digit, int target_bit,
                             int src_bit, bool inverted, std::size_t mask_row);

// Unmasked +1 on one digit: n+1 row clones (one temp clone for the inverted
// feedback, then the ring shift).
MicroProgram gen_unit_increment(const CounterLayout& lay, int digit);

// Wrap-detection block (6 ops) appended after the shift steps; ORs the event
// into the digit's pending row. Requires scratch0 to hold the pre-shift MSB.
MicroProgram gen_overflow_check(const CounterLayout& lay, int digit, int k,
                                std::size_t mask_row, Direction dir);

// Full masked +/-k on one digit: save-slot padding, per-cycle saves, 7n step
// ops, 6-op wrap block. Length = save_width(n) + 7n + 6 for every k.
MicroProgram gen_kary_program(const CounterLayout& lay, int digit, int k,
                              std::size_t mask_row,
                              Direction dir = Direction::kIncrement);

}  // namespace jcim
