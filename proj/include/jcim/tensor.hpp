// Integer tensor kernels on counter banks: outputs are accumulated by masked
// counting. Binary operand matrices act directly as mask planes; general
// integer operands are decomposed into signed power-of-two slices (canonical
// signed-digit form), each slice contributing a masked, host-shifted add.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "jcim/counters.hpp"
#include "jcim/iarm.hpp"

namespace jcim {

using MatrixI = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using VectorI = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using MaskPlane = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

struct KernelConfig {
  int n = 5;                // Johnson order (base 2n digits)
  int capacity_bits = 32;   // counters sized to the smallest D with (2n)^D >= 2^bits
  CarryPolicy policy = CarryPolicy::kFullRipple;
  AddStrategy strategy = AddStrategy::kKary;
  bool signed_values = true;
  std::uint64_t seed = 0;
};

// Smallest digit count D with (2n)^D >= 2^capacity_bits.
int capacity_digits(int n, int capacity_bits);

// Little-endian base-`base` digits of v (empty for v == 0).
std::vector<int> digits_of(unsigned long long v, int base);

// ---------------------------------------------------------------------------
// Canonical signed-digit decomposition.
// ---------------------------------------------------------------------------

// Non-adjacent-form digits of v as (shift, sign in {-1,+1}) pairs.
std::vector<std::pair<int, int>> csd_digits(std::int64_t v);

struct CsdSlice {
  int shift = 0;
  int sign = 1;
  MaskPlane plane;  // same shape as the decomposed matrix
};

// Slice planes for a matrix. Signed mode uses NAF digits; unsigned mode uses
// the plain binary expansion (and rejects negative entries). Plane count is
// bounded by csd_plane_bound of the entry bit width.
std::vector<CsdSlice> csd_slices(const MatrixI& m, bool signed_values);
int csd_plane_bound(int entry_bits, bool signed_values);  // 2p signed, p unsigned

// ---------------------------------------------------------------------------
// Kernels.
// ---------------------------------------------------------------------------

struct KernelResult {
  MatrixI out;
  BankStats stats;
};

class TensorEngine {
 public:
  explicit TensorEngine(KernelConfig cfg);

  const KernelConfig& config() const { return cfg_; }
  int digits() const { return digits_; }

  // y = A x with binary A (entries in {0,1}): column j of A is the mask plane
  // of input x_j. x_j == 0 costs zero fabric ops.
  KernelResult gemv(const MatrixI& a01, const VectorI& x);

  // C = A B with binary B: row k of B masks the contribution of A(i,k).
  KernelResult gemm(const MatrixI& a, const MatrixI& b01);

  // C = A B with general integer B via signed power-of-two slices.
  KernelResult gemm_int(const MatrixI& a, const MatrixI& b);

 private:
  struct SliceTerm {
    int shift;
    int sign;
    const MaskPlane* plane;
  };
  KernelResult run_gemm(const MatrixI& a, Eigen::Index out_cols,
                        const std::vector<CsdSlice>& slices);

  KernelConfig cfg_;
  int digits_;
};

// ---------------------------------------------------------------------------
// Bank-level vector ops (banks must share a subarray where noted).
// ---------------------------------------------------------------------------

// Host-side load/readback of per-column values (test/CLI fixtures; free).
void bank_write_values(CounterBank& bank, const std::vector<long long>& vals);
std::vector<long long> bank_read_values(const CounterBank& bank);

// dst += src, digit-aligned: 2n mask-guided unit increments per digit, then a
// carry sweep on dst. The addend must be nonnegative (its sign row is not
// read); the destination may be signed.
void bank_vector_add(CounterBank& dst, CounterBank& src);

// Clamp negative columns to zero: masked clears of every digit/pending row
// under the sign mask, then the sign row clears itself. Signed banks only.
void bank_relu(CounterBank& bank);

// value <<= shifts by repeated doubling through `scratch` (same subarray,
// same shape). Unsigned banks only; pendings must be resolved.
void bank_shift_left(CounterBank& bank, CounterBank& scratch, int shifts);

}  // namespace jcim
