#include "jcim/fabric.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace jcim {

ResolvedRow resolve_row(std::size_t row) {
  if (row == kDcc0Neg) return {kDcc0, true};
  if (row == kDcc1Neg) return {kDcc1, true};
  return {row, false};
}

bool is_constant_row(std::size_t row) { return row == kC0 || row == kC1; }

// ---------------------------------------------------------------------------
// MultiRowAddress
// ---------------------------------------------------------------------------

MultiRowAddress::MultiRowAddress(std::size_t row) { rows_ = {row}; flags_ = {false}; }

MultiRowAddress::MultiRowAddress(std::initializer_list<std::size_t> rows) {
  if (rows.size() < 1 || rows.size() > 3)
    throw IllegalAddressError("multi-row address must name 1..3 rows");
  for (std::size_t r : rows) {
    rows_.push_back(r);
    flags_.push_back(false);
  }
}

MultiRowAddress MultiRowAddress::single(std::size_t row) { return MultiRowAddress(row); }

MultiRowAddress MultiRowAddress::pair(std::size_t r0, std::size_t r1) {
  return MultiRowAddress{r0, r1};
}

MultiRowAddress MultiRowAddress::triple(std::size_t r0, std::size_t r1, std::size_t r2) {
  return MultiRowAddress{r0, r1, r2};
}

MultiRowAddress& MultiRowAddress::flag(std::size_t idx) {
  if (idx >= rows_.size()) throw IllegalAddressError("flag index out of range");
  ResolvedRow rr = resolve_row(rows_[idx]);
  if (rr.phys != kDcc0 && rr.phys != kDcc1)
    throw IllegalAddressError("DCC flag legal only on DCC rows");
  // Normalize: a flagged alias is the same as the flagged physical row.
  rows_[idx] = rr.phys;
  flags_[idx] = true;
  return *this;
}

MultiRowAddress MultiRowAddress::with_flag(std::size_t idx) const {
  MultiRowAddress a = *this;
  a.flag(idx);
  return a;
}

// The 16 symbolic compute-group addresses (8 wordlines, 16 decodings).
MultiRowAddress MultiRowAddress::b_addr(int b) {
  switch (b) {
    case 0: return single(kT0);
    case 1: return single(kT1);
    case 2: return single(kT2);
    case 3: return single(kT3);
    case 4: return single(kDcc0);
    case 5: return single(kDcc0Neg);
    case 6: return single(kDcc1);
    case 7: return single(kDcc1Neg);
    case 8: return pair(kDcc0Neg, kT0);
    case 9: return pair(kDcc1Neg, kT1);
    case 10: return pair(kT2, kT3);
    case 11: return triple(kT0, kT1, kDcc0);
    case 12: return triple(kT0, kT1, kT2);
    case 13: return triple(kT1, kT2, kT3);
    case 14: return triple(kDcc0, kT1, kT2);
    case 15: return triple(kDcc1, kT0, kT3);
    default: throw IllegalAddressError("B-group address must be 0..15");
  }
}

std::string MultiRowAddress::str() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (i) os << ',';
    os << rows_[i];
    if (flags_[i]) os << '~';
  }
  os << '}';
  return os.str();
}

// ---------------------------------------------------------------------------
// Subarray
// ---------------------------------------------------------------------------

Subarray::Subarray(std::size_t data_rows, std::size_t columns, FaultModel fm)
    : cols_(columns), fm_(fm), rng_(fm.seed) {
  cells_.assign(kDataStart + data_rows, std::vector<std::uint8_t>(columns, 0));
  std::fill(cells_[kC1].begin(), cells_[kC1].end(), std::uint8_t{1});
}

void Subarray::set_fault_model(FaultModel fm) {
  fm_ = fm;
  rng_.seed(fm.seed);
}

bool Subarray::draw(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return unit_(rng_) < p;
}

void Subarray::write_row(std::size_t row, const std::vector<std::uint8_t>& bits) {
  ResolvedRow rr = resolve_row(row);
  if (is_constant_row(rr.phys))
    throw ConstantRowWriteError("write to constant row " + std::to_string(row));
  if (bits.size() != cols_) throw FabricError("row width mismatch");
  auto& dst = cells_[rr.phys];
  for (std::size_t c = 0; c < cols_; ++c) {
    std::uint8_t v = bits[c] ? 1 : 0;
    dst[c] = rr.inverted ? static_cast<std::uint8_t>(1 - v) : v;
  }
}

void Subarray::fill_row(std::size_t row, std::uint8_t bit) {
  write_row(row, std::vector<std::uint8_t>(cols_, bit ? 1 : 0));
}

const std::vector<std::uint8_t>& Subarray::peek_row(std::size_t row) const {
  return cells_.at(resolve_row(row).phys);
}

std::uint8_t Subarray::peek(std::size_t row, std::size_t col) const {
  ResolvedRow rr = resolve_row(row);
  std::uint8_t v = cells_.at(rr.phys).at(col);
  return rr.inverted ? static_cast<std::uint8_t>(1 - v) : v;
}

std::vector<std::uint8_t> Subarray::sense(const MultiRowAddress& src) {
  if (src.size() != 1)
    throw IllegalAddressError("AAP source must resolve to one row: " + src.str());
  ResolvedRow rr = resolve_row(src.row(0));
  bool inv = rr.inverted || src.flagged(0);
  std::vector<std::uint8_t> out(cols_);
  const auto& cells = cells_.at(rr.phys);
  for (std::size_t c = 0; c < cols_; ++c) {
    std::uint8_t v = inv ? static_cast<std::uint8_t>(1 - cells[c]) : cells[c];
    if (draw(fm_.p_read)) v = static_cast<std::uint8_t>(1 - v);
    out[c] = v;
  }
  return out;
}

void Subarray::aap(const MultiRowAddress& src, const MultiRowAddress& dst) {
  if (dst.size() < 1 || dst.size() > 2)
    throw IllegalAddressError("AAP destination must name 1 or 2 rows: " + dst.str());
  std::vector<std::uint8_t> v = sense(src);
  for (std::size_t i = 0; i < dst.size(); ++i) {
    ResolvedRow rr = resolve_row(dst.row(i));
    if (is_constant_row(rr.phys))
      throw ConstantRowWriteError("AAP into constant row " + std::to_string(dst.row(i)));
    bool inv = rr.inverted || dst.flagged(i);
    auto& cells = cells_[rr.phys];
    for (std::size_t c = 0; c < cols_; ++c)
      cells[c] = inv ? static_cast<std::uint8_t>(1 - v[c]) : v[c];
  }
  ++aap_count_;
}

void Subarray::ap(const MultiRowAddress& addr) {
  if (addr.size() != 3)
    throw IllegalAddressError("AP requires exactly 3 rows: " + addr.str());
  ResolvedRow rr[3];
  bool inv[3];
  for (int i = 0; i < 3; ++i) {
    rr[i] = resolve_row(addr.row(i));
    if (is_constant_row(rr[i].phys))
      throw ConstantRowWriteError("constant row in AP triple " + addr.str());
    inv[i] = rr[i].inverted || addr.flagged(i);
    for (int j = 0; j < i; ++j)
      if (rr[j].phys == rr[i].phys)
        throw IllegalAddressError("AP triple activates a row twice: " + addr.str());
  }
  for (std::size_t c = 0; c < cols_; ++c) {
    std::uint8_t b[3];
    for (int i = 0; i < 3; ++i) {
      std::uint8_t v = cells_[rr[i].phys][c];
      b[i] = inv[i] ? static_cast<std::uint8_t>(1 - v) : v;
    }
    std::uint8_t maj =
        static_cast<std::uint8_t>((b[0] & b[1]) | (b[0] & b[2]) | (b[1] & b[2]));
    bool flip = draw(fm_.p_likely);
    for (const auto& fi : injections_)
      if (fi.ap_index == ap_count_ && fi.column == c) flip = !flip;
    if (flip) maj = static_cast<std::uint8_t>(1 - maj);
    // Charge sharing is destructive: all three activated rows latch the
    // (possibly faulty) sensed value.
    for (int i = 0; i < 3; ++i)
      cells_[rr[i].phys][c] = inv[i] ? static_cast<std::uint8_t>(1 - maj) : maj;
  }
  ++ap_count_;
}

std::vector<std::uint8_t> Subarray::read_row(std::size_t row) {
  return sense(MultiRowAddress::single(row));
}

void Subarray::inject_fault(std::uint64_t ap_index, std::size_t column) {
  injections_.push_back({ap_index, column});
}

void Subarray::clear_injections() { injections_.clear(); }

void Subarray::dump(std::ostream& os) const {
  os << "rows=" << cells_.size() << " cols=" << cols_ << '\n';
  for (const auto& row : cells_) {
    for (std::uint8_t b : row) os << (b ? '1' : '0');
    os << '\n';
  }
}

Subarray Subarray::load(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw SnapshotFormatError("missing snapshot header");
  std::size_t rows = 0, cols = 0;
  if (std::sscanf(header.c_str(), "rows=%zu cols=%zu", &rows, &cols) != 2)
    throw SnapshotFormatError("bad snapshot header: " + header);
  if (rows < kDataStart) throw SnapshotFormatError("snapshot smaller than compute group");
  Subarray sa(rows - kDataStart, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::string line;
    if (!std::getline(is, line)) throw SnapshotFormatError("truncated snapshot");
    if (line.size() != cols) throw SnapshotFormatError("bad row width in snapshot");
    for (std::size_t c = 0; c < cols; ++c) {
      if (line[c] != '0' && line[c] != '1')
        throw SnapshotFormatError("snapshot rows must be '0'/'1' strings");
      sa.cells_[r][c] = line[c] == '1';
    }
  }
  // Constant rows are part of the image but must still be constant.
  for (std::size_t c = 0; c < cols; ++c) {
    if (sa.cells_[kC0][c] != 0 || sa.cells_[kC1][c] != 1)
      throw SnapshotFormatError("snapshot corrupts constant rows");
  }
  return sa;
}

}  // namespace jcim
