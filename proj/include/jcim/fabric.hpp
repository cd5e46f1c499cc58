// Bit-accurate model of a compute-capable DRAM subarray: designated wordline
// groups (B/C/D), dual-contact cells with complement ports, AAP/AP primitives
// with triple-row-activation majority, and per-column fault hooks.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace jcim {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct FabricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Malformed multi-row address (wrong arity, flag on a non-DCC row, ...).
struct IllegalAddressError : FabricError {
  using FabricError::FabricError;
};
// Attempt to overwrite a constant (C-group) row.
struct ConstantRowWriteError : FabricError {
  using FabricError::FabricError;
};
struct SnapshotFormatError : FabricError {
  using FabricError::FabricError;
};

// ---------------------------------------------------------------------------
// Row map. Rows 0..9 are the compute group, data (D-group) rows follow.
// Rows kDcc0Neg / kDcc1Neg are *address aliases*: the complement ports of the
// dual-contact cells in rows kDcc0 / kDcc1. Accessing them reads/writes the
// inverted value of the underlying physical row.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kT0 = 0;
inline constexpr std::size_t kT1 = 1;
inline constexpr std::size_t kT2 = 2;
inline constexpr std::size_t kT3 = 3;
inline constexpr std::size_t kDcc0 = 4;
inline constexpr std::size_t kDcc0Neg = 5;  // alias: ~DCC0
inline constexpr std::size_t kDcc1 = 6;
inline constexpr std::size_t kDcc1Neg = 7;  // alias: ~DCC1
inline constexpr std::size_t kC0 = 8;       // constant zero row
inline constexpr std::size_t kC1 = 9;       // constant one row
inline constexpr std::size_t kDataStart = 10;

// Resolve an address to (physical row, inverted-port?).
struct ResolvedRow {
  std::size_t phys;
  bool inverted;
};
ResolvedRow resolve_row(std::size_t row);

bool is_constant_row(std::size_t row);

// ---------------------------------------------------------------------------
// MultiRowAddress: an ordered list of 1..3 target rows plus per-target
// DCC flags. A flagged target must be a physical DCC row (4 or 6) and stands
// for its complement port: it participates in sensing with the inverted value
// and stores the inverted result.
// ---------------------------------------------------------------------------

class MultiRowAddress {
 public:
  MultiRowAddress() = default;
  explicit MultiRowAddress(std::size_t row);
  MultiRowAddress(std::initializer_list<std::size_t> rows);

  static MultiRowAddress single(std::size_t row);
  static MultiRowAddress pair(std::size_t r0, std::size_t r1);
  static MultiRowAddress triple(std::size_t r0, std::size_t r1, std::size_t r2);

  // Symbolic B-group address B0..B15 (the 16 pre-decoded combinations the
  // fabric exposes over the 8 compute wordlines).
  static MultiRowAddress b_addr(int b);

  MultiRowAddress& flag(std::size_t idx);  // mark target idx as complement port
  MultiRowAddress with_flag(std::size_t idx) const;

  std::size_t size() const { return rows_.size(); }
  std::size_t row(std::size_t idx) const { return rows_[idx]; }
  bool flagged(std::size_t idx) const { return flags_[idx]; }

  std::string str() const;

 private:
  std::vector<std::size_t> rows_;
  std::vector<bool> flags_;
};

// ---------------------------------------------------------------------------
// Fault model: independent per-column Bernoulli flips.
//   p_likely: applied once per AP to the sensed majority (before write-back,
//             so every activated row receives the same faulty value).
//   p_read:   applied per column to every sensed value on AAP / read_row.
// forced injections flip the sensed value of AP number `ap_index` (0-based,
// counted per subarray) at `column`, for deterministic tests.
// ---------------------------------------------------------------------------

struct FaultModel {
  double p_likely = 0.0;
  double p_read = 0.0;
  std::uint64_t seed = 0;
};

struct FaultInjection {
  std::uint64_t ap_index;
  std::size_t column;
};

class Subarray {
 public:
  Subarray(std::size_t data_rows, std::size_t columns,
           FaultModel fm = FaultModel{});

  std::size_t rows() const { return cells_.size(); }  // physical, incl. group
  std::size_t columns() const { return cols_; }
  std::size_t data_start() const { return kDataStart; }

  // Host-side accessors (not DRAM commands, no fault hooks, no op counting).
  void write_row(std::size_t row, const std::vector<std::uint8_t>& bits);
  void fill_row(std::size_t row, std::uint8_t bit);
  const std::vector<std::uint8_t>& peek_row(std::size_t row) const;
  std::uint8_t peek(std::size_t row, std::size_t col) const;

  // AAP: activate src (sense, p_read per column), then activate-activate the
  // destination(s) so the sensed value overwrites them. src must resolve to a
  // single row; dst may have 1 or 2 targets. Flagged targets store the
  // complement of the sensed value.
  void aap(const MultiRowAddress& src, const MultiRowAddress& dst);

  // AP: simultaneous triple-row activation. Exactly 3 targets; the sensed
  // majority (after fault hooks) is written back to all three. Constant rows
  // cannot take part (their cells would be overwritten).
  void ap(const MultiRowAddress& addr);

  // Modeled DRAM read of one row (p_read per column).
  std::vector<std::uint8_t> read_row(std::size_t row);

  // Fault bookkeeping.
  void inject_fault(std::uint64_t ap_index, std::size_t column);
  void clear_injections();
  std::uint64_t ap_count() const { return ap_count_; }
  std::uint64_t aap_count() const { return aap_count_; }
  const FaultModel& fault_model() const { return fm_; }
  void set_fault_model(FaultModel fm);

  // State snapshot: "rows=<r> cols=<c>" header then one '0'/'1' line per row.
  void dump(std::ostream& os) const;
  static Subarray load(std::istream& is);

 private:
  std::vector<std::uint8_t> sense(const MultiRowAddress& src);
  bool draw(double p);

  std::size_t cols_;
  std::vector<std::vector<std::uint8_t>> cells_;
  FaultModel fm_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::vector<FaultInjection> injections_;
  std::uint64_t ap_count_ = 0;
  std::uint64_t aap_count_ = 0;
};

}  // namespace jcim
