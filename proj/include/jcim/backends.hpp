// Alternative execution substrates for the same counting method:
//  - bitline-logic style (AND/OR/NOT/NOR computed in modified sense amps,
//    nonstateful, sources nondestructive),
//  - memristive NOR-only style (outputs must be initialized to 1 first;
//    counter rows are stored complemented so single NORs implement the
//    masked terms),
//  - a binary ripple-carry adder baseline on the charge-sharing fabric.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jcim/counters.hpp"
#include "jcim/fabric.hpp"
#include "jcim/uprog.hpp"

namespace jcim {

enum class Backend { kAmbit, kPinatubo, kMagic };

Backend backend_from_string(const std::string& s);
std::string to_string(Backend b);

// ---------------------------------------------------------------------------
// Row-wide logic command stream
// ---------------------------------------------------------------------------

enum class LogicOp : std::uint8_t { kAnd2, kOr2, kNor2, kNot1, kCopy, kInit1 };

struct LogicCmd {
  LogicOp op;
  std::size_t dst = 0;
  std::size_t a = 0;
  std::size_t b = 0;
  std::string note;
};

struct LogicProgram {
  std::vector<LogicCmd> cmds;
  std::string purpose;
  int n = 0;
  int k = 0;
  int fixed_ops = 0;     // prologue/postlogue
  int bit_ops = 0;       // per-bit shift work
  int extra_ops = 0;     // polarity saves beyond the k=1 budget (NOR-only)
  int overflow_ops = 0;  // wrap detection
  std::size_t size() const { return cmds.size(); }

  void emit(LogicOp op, std::size_t dst, std::size_t a, std::size_t b = 0,
            std::string note = {});
};

// Executes a stream host-side on the subarray bit matrix. Under nor_only the
// memristive instruction set is enforced and NOR is stateful: outputs can only
// pull a pre-initialized 1 down to 0 (dst &= ~(a|b)). Otherwise ops model
// sense-amp logic and overwrite their destination.
void run_logic(Subarray& sa, const LogicProgram& prog, bool nor_only);

// ---------------------------------------------------------------------------
// Counter banks on the alternative substrates
// ---------------------------------------------------------------------------

struct AltBank {
  Backend backend = Backend::kPinatubo;
  int n = 0;
  int digits = 1;
  std::size_t mask_row = 0;  // true polarity on both substrates
  std::vector<std::vector<std::size_t>> bit_rows;  // complemented storage on MAGIC
  std::vector<std::size_t> onext_rows;             // complemented on MAGIC
  // scratch
  std::size_t mbar = 0, theta = 0, thetabar = 0, nmsb = 0;
  std::vector<std::size_t> v_rows, u_rows;  // bitline-logic per-bit temporaries
  std::size_t tmp0 = 0, tmp1 = 0, tmp2 = 0, tmp3 = 0;

  std::size_t bit_row(int d, int b) const {
    return bit_rows[static_cast<std::size_t>(d)][static_cast<std::size_t>(b)];
  }
  std::size_t onext(int d) const { return onext_rows[static_cast<std::size_t>(d)]; }
};

std::size_t alt_bank_rows(Backend b, int n, int digits);
AltBank make_alt_bank(Subarray& sa, Backend b, int n, int digits,
                      std::size_t first_row);

// Masked +k on one digit. with_overflow appends wrap detection into the
// digit's pending row. Counting budget: 3n+4 (+3 with overflow) on the
// bitline-logic substrate for every k; 6n+4 on the NOR-only substrate for
// k = 1 (general k adds polarity saves, wrap detection is a separate block;
// both surpluses are reported in extra_ops/overflow_ops).
LogicProgram gen_alt_increment(const AltBank& bank, int digit, int k,
                               long mask_row = -1, bool with_overflow = true);

// Encode/decode honoring the substrate's storage polarity (host-side).
void alt_write_digit(Subarray& sa, const AltBank& bank, int digit, int value);
std::vector<std::optional<int>> alt_read_digit(Subarray& sa, const AltBank& bank,
                                               int digit);
std::vector<std::uint8_t> alt_read_pending(Subarray& sa, const AltBank& bank,
                                           int digit);

// ---------------------------------------------------------------------------
// Ripple-carry baseline: acc (w rows, LSB first) += addend (p rows, zero
// extended), both plain binary on the charge-sharing fabric. Constant 12 ops
// per accumulator bit plus 1 carry init; independent of the addend value.
// ---------------------------------------------------------------------------

inline constexpr int kRcaOpsPerBit = 12;

MicroProgram gen_rca_add(const std::vector<std::size_t>& acc_rows,
                         const std::vector<std::size_t>& addend_rows,
                         std::size_t carry_a, std::size_t carry_b);

}  // namespace jcim
