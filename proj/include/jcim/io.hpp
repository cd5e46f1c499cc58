// CSV/JSON interchange: per-digit counter dumps, fault-rate tables, integer
// matrices, random kernel specs, and timestamped result directories.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "jcim/counters.hpp"
#include "jcim/shield.hpp"
#include "jcim/tensor.hpp"

namespace jcim {

// Header: column,digit,value,o_next. One row per (column, digit); value is -1
// for an undecodable codeword.
void write_digit_csv(std::ostream& os, const CounterBank& bank);

// Header: p,r,error_rate,detect_rate,ci_low,ci_high,source.
void write_fault_csv(std::ostream& os, const std::vector<FaultRates>& rows);

// First line "R,C", then R comma-separated integer rows.
MatrixI read_matrix_csv(std::istream& is);
void write_matrix_csv(std::ostream& os, const MatrixI& m);

struct RandomKernelSpec {
  int m = 8;
  int k = 8;
  int n_out = 8;
  int bits = 4;          // entry magnitude bits
  bool is_signed = true;
  double sparsity = 0.0; // expected zero fraction
  std::uint64_t seed = 0;
};

// Parses {"M":..,"K":..,"N":..,"bits":..,"signed":..,"sparsity":..,"seed":..};
// every field optional.
RandomKernelSpec kernel_spec_from_json(const std::string& text);

struct KernelOperands {
  MatrixI a;
  MatrixI b;
};
KernelOperands make_random_kernel(const RandomKernelSpec& spec);

// Creates <root>/<experiment>/<UTC timestamp>[-N] and returns it.
std::filesystem::path make_results_dir(const std::filesystem::path& root,
                                       const std::string& experiment);

}  // namespace jcim
