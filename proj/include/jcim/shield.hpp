// Fault protection for the counting programs: every masking AND is embedded
// in an XOR computation (IR1 = x&y, IR2 = x|y, FR = IR2&~IR1 = x^y) whose
// result row has a predictable parity, so any single likely fault flips a
// checked row. Checks gate retries of the enclosing block. Includes the
// analytic silent-error/detection model and a Monte-Carlo driver that runs
// the real fabric.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jcim/counters.hpp"
#include "jcim/fabric.hpp"
#include "jcim/uprog.hpp"

namespace jcim {

struct UnrecoverableFaultError : FabricError {
  using FabricError::FabricError;
};

struct ProtectionConfig {
  int fr_checks = 2;            // r: FR computations per protected bit (even)
  bool demorgan_pairing = false;  // share the inverted-step triple per De Morgan
  int max_retries = 16;
  double p_read_bound = 1e-20;  // read-path fault bound used by the rate model
};

// ---------------------------------------------------------------------------
// Parity helpers (even parity per 8-bit segment, ECC-DIMM style).
// ---------------------------------------------------------------------------

std::vector<std::uint8_t> segment_parity(const std::vector<std::uint8_t>& bits,
                                         int segment = 8);

// The masked terms combined by a step commit must be column-disjoint, which
// is what makes their OR an XOR (and the parity of the commit predictable).
bool masked_or_is_xor_check(const Subarray& sa, std::size_t row_a,
                            std::size_t row_b);

// ---------------------------------------------------------------------------
// Protected program IR. One op = one listing line; MAJ lines carry their
// operand staging internally (read-path class), so the likely-fault sites
// are exactly the MAJ lines.
// ---------------------------------------------------------------------------

struct MajOperand {
  enum class K : std::uint8_t { kRow, kZero, kOne };
  K kind = K::kZero;
  std::size_t row = 0;
  bool invert = false;  // legal on the third (DCC) slot only

  static MajOperand of(std::size_t r, bool inv = false) {
    return MajOperand{K::kRow, r, inv};
  }
  static MajOperand zero() { return MajOperand{K::kZero, 0, false}; }
  static MajOperand one() { return MajOperand{K::kOne, 0, false}; }
};

enum class ProtKind : std::uint8_t { kStage, kMaj };
enum class CheckKind : std::uint8_t { kNone, kShadowRow, kCompareRow };

struct ProtOp {
  ProtKind kind = ProtKind::kStage;
  std::size_t src = 0;  // kStage source
  std::size_t dst = 0;
  MajOperand a, b, c;   // kMaj operands; c may invert
  CheckKind check = CheckKind::kNone;
  std::size_t compare_row = 0;  // CheckKind::kCompareRow reference
  int retry_start = 0;          // restart index when a check fails
  std::string note;
};

struct ProtProgram {
  std::vector<ProtOp> ops;
  int n = 0;
  int k = 0;
  int r = 0;
  bool paired = false;
  std::size_t size() const { return ops.size(); }
};

// Scratch rows for protected execution (16 data rows).
struct ProtRows {
  std::size_t stage_cur, stage_last, bstage;
  std::size_t ir1, ir2, fr, readout, save_a, save_b, x1, x2, pad;
  std::size_t ovf_msb, u_row, u_store, o_old;
};
inline constexpr std::size_t kProtRowCount = 16;
ProtRows make_prot_rows(std::size_t first_row);

// Protected masked +k on one digit. Unpaired length is (5r+3)n + (5r+6);
// pairing shortens inverted-source bits to 5r/2+5 ops.
ProtProgram gen_protected_increment(const CounterLayout& lay, const ProtRows& pr,
                                    int digit, int k, std::size_t mask_row,
                                    const ProtectionConfig& cfg);

// Expected op counts for the generator (used by tests/CLI reporting).
std::size_t protected_ops(int n, int k, const ProtectionConfig& cfg);

struct ProtTelemetry {
  std::uint64_t retries = 0;
  std::uint64_t detected = 0;
};

// Runs a protected program with check-gated retries: a failing check restarts
// its block (the listing's "recompute the IRs" point). Checks compare against
// a fault-free shadow execution, standing in for the ECC-carried parity.
ProtTelemetry execute_protected(const ProtProgram& prog, Subarray& sa,
                                const ProtectionConfig& cfg);

// ---------------------------------------------------------------------------
// Rate model for one protected XOR unit with r FR recomputations.
//   p_delta(p) = p(3-2p)/2     (faulty IRs visible in FR over uniform inputs)
//   error(p,r)  = p_delta * p^r, floored at the read-path bound
//   detect(p,r) = 1 - [p_delta p^r + (1-p_delta)(1-p)^r]
// ---------------------------------------------------------------------------

struct FaultRates {
  double p = 0;
  int r = 0;
  double error_rate = 0;
  double detect_rate = 0;
  double error_lo = 0, error_hi = 0;    // 3-sigma binomial band (MC only)
  double detect_lo = 0, detect_hi = 0;  // 3-sigma binomial band (MC only)
  bool analytic = true;
  std::uint64_t trials = 0;
};

double p_delta(double p);
FaultRates rates_analytic(double p, int r, double p_read_bound = 1e-20);

// Monte-Carlo through the fabric: IR1/IR2 APs, r FR APs from the stored IR
// rows, committed value = host combine of the read-back IR rows.
FaultRates rates_montecarlo(double p, int r, std::uint64_t trials,
                            std::uint64_t seed, double p_read = 0.0);

// Exhaustive single-likely-fault audit of the protected XOR unit: for every
// input pair and every single AP fault site, the unit must either detect the
// fault or commit the correct value. Returns the number of silent errors.
int single_fault_audit(int r);

}  // namespace jcim
