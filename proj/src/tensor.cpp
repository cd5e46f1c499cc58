#include "jcim/tensor.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

namespace jcim {

int capacity_digits(int n, int capacity_bits) {
  if (n < 2) throw ConfigError("counter order must be >= 2");
  if (capacity_bits < 1 || capacity_bits > 120)
    throw ConfigError("capacity bits out of range");
  const __int128 target = static_cast<__int128>(1) << capacity_bits;
  __int128 c = 1;
  int d = 0;
  while (c < target) {
    c *= 2 * n;
    ++d;
  }
  return d;
}

std::vector<int> digits_of(unsigned long long v, int base) {
  if (base < 2) throw ConfigError("base must be >= 2");
  std::vector<int> ds;
  while (v) {
    ds.push_back(static_cast<int>(v % static_cast<unsigned long long>(base)));
    v /= static_cast<unsigned long long>(base);
  }
  return ds;
}

std::vector<std::pair<int, int>> csd_digits(std::int64_t v) {
  std::vector<std::pair<int, int>> out;
  int s = 0;
  while (v != 0) {
    if (v & 1) {
      const int d = 2 - static_cast<int>(((v % 4) + 4) % 4);  // +1 or -1
      out.emplace_back(s, d);
      v -= d;
    }
    v >>= 1;
    ++s;
  }
  return out;
}

int csd_plane_bound(int entry_bits, bool signed_values) {
  return signed_values ? 2 * entry_bits : entry_bits;
}

namespace {

int entry_bits_of(const MatrixI& m, bool signed_values) {
  std::int64_t lo = 0, hi = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      lo = std::min(lo, m(i, j));
      hi = std::max(hi, m(i, j));
    }
  int p = 1;
  if (signed_values) {
    while (lo < -(static_cast<std::int64_t>(1) << (p - 1)) ||
           hi > (static_cast<std::int64_t>(1) << (p - 1)) - 1)
      ++p;
  } else {
    while (hi > (static_cast<std::int64_t>(1) << p) - 1) ++p;
  }
  return p;
}

}  // namespace

std::vector<CsdSlice> csd_slices(const MatrixI& m, bool signed_values) {
  std::map<std::pair<int, int>, MaskPlane> acc;
  auto plane_of = [&](int shift, int sign) -> MaskPlane& {
    auto it = acc.find({shift, sign});
    if (it == acc.end())
      it = acc.emplace(std::make_pair(shift, sign),
                       MaskPlane::Zero(m.rows(), m.cols()))
               .first;
    return it->second;
  };
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const std::int64_t v = m(i, j);
      if (v == 0) continue;
      if (signed_values) {
        for (const auto& [shift, sign] : csd_digits(v))
          plane_of(shift, sign)(i, j) = 1;
      } else {
        if (v < 0) throw ConfigError("negative entry in unsigned decomposition");
        for (int s = 0; s < 63; ++s)
          if ((v >> s) & 1) plane_of(s, 1)(i, j) = 1;
      }
    }
  std::vector<CsdSlice> slices;
  slices.reserve(acc.size());
  for (auto& [key, plane] : acc)
    slices.push_back(CsdSlice{key.first, key.second, std::move(plane)});
  const int bound = csd_plane_bound(entry_bits_of(m, signed_values), signed_values);
  if (static_cast<int>(slices.size()) > bound)
    throw std::logic_error("signed-digit plane count exceeded its bound");
  return slices;
}

// ---------------------------------------------------------------------------
// TensorEngine
// ---------------------------------------------------------------------------

TensorEngine::TensorEngine(KernelConfig cfg) : cfg_(cfg) {
  digits_ = capacity_digits(cfg_.n, cfg_.capacity_bits);
}

namespace {

void require_binary(const MatrixI& m, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0 && m(i, j) != 1)
        throw ConfigError(std::string(what) + " must be a 0/1 matrix");
}

}  // namespace

KernelResult TensorEngine::run_gemm(const MatrixI& a, Eigen::Index out_cols,
                                    const std::vector<CsdSlice>& slices) {
  const Eigen::Index m = a.rows();
  const Eigen::Index kk = a.cols();
  KernelResult res;
  res.out = MatrixI::Zero(m, out_cols);
  if (m == 0 || out_cols == 0) return res;
  for (const CsdSlice& sl : slices)
    if (sl.plane.rows() != kk || sl.plane.cols() != out_cols)
      throw ConfigError("slice plane shape mismatch");

  const int n = cfg_.n;
  const int d = digits_;
  const bool has_sign = cfg_.signed_values;
  const std::size_t bank0 = kDataStart;
  const std::size_t mask_row = bank0 + bank_rows(n, d, has_sign);
  const std::size_t data_rows = bank_rows(n, d, has_sign) + 1;

  FaultModel fm;
  fm.seed = cfg_.seed;
  Subarray sa(data_rows, static_cast<std::size_t>(out_cols), fm);
  CounterBank bank(sa, n, d, has_sign, bank0);
  IarmScheduler iarm(n, d, /*masked=*/true);

  __int128 cap = 1;
  for (int i = 0; i < d; ++i) cap *= 2 * n;

  std::vector<std::uint8_t> mask_bits(static_cast<std::size_t>(out_cols));
  std::vector<__int128> col_sum(static_cast<std::size_t>(out_cols));

  for (Eigen::Index i = 0; i < m; ++i) {
    bank.reset();
    iarm.reset();
    std::fill(col_sum.begin(), col_sum.end(), 0);
    for (Eigen::Index k2 = 0; k2 < kk; ++k2) {
      const std::int64_t v = a(i, k2);
      if (v == 0) continue;  // zero input: zero fabric ops
      if (!has_sign && v < 0)
        throw ConfigError("negative input on an unsigned engine");
      for (const CsdSlice& sl : slices) {
        const __int128 eff128 =
            static_cast<__int128>(v) * sl.sign * (static_cast<__int128>(1) << sl.shift);
        if (eff128 > std::numeric_limits<std::int64_t>::max() ||
            eff128 < std::numeric_limits<std::int64_t>::min())
          throw ConfigError("slice contribution overflows 64 bits");
        const long long eff = static_cast<long long>(eff128);
        const __int128 mag = eff128 < 0 ? -eff128 : eff128;
        for (Eigen::Index j = 0; j < out_cols; ++j) {
          mask_bits[static_cast<std::size_t>(j)] = sl.plane(k2, j);
          if (sl.plane(k2, j)) {
            auto& cs = col_sum[static_cast<std::size_t>(j)];
            cs += mag;
            if (cs >= cap)
              throw ConfigError("accumulation would exceed bank capacity");
          }
        }
        sa.write_row(mask_row, mask_bits);
        bank.accumulate_value(eff, static_cast<long>(mask_row), cfg_.strategy,
                              cfg_.policy, &iarm);
      }
    }
    if (cfg_.policy == CarryPolicy::kIarm) iarm.flush(bank);
    const auto vals = bank.read_counters();
    for (Eigen::Index j = 0; j < out_cols; ++j) {
      const ColumnValue& cv = vals[static_cast<std::size_t>(j)];
      if (!cv.valid) throw FabricError("undecodable counter state in kernel");
      res.out(i, j) = cv.value;
    }
    // Result leaves the bank digit by digit plus the pending row.
    bank.stats().copy_out_aap += static_cast<std::uint64_t>(n + 1) * d;
  }
  res.stats = bank.stats();
  return res;
}

KernelResult TensorEngine::gemv(const MatrixI& a01, const VectorI& x) {
  require_binary(a01, "mask operand");
  if (a01.cols() != x.size()) throw ConfigError("gemv shape mismatch");
  // One output row of width M; input j's mask plane is column j of A.
  MatrixI coeffs(1, a01.cols());
  for (Eigen::Index j = 0; j < x.size(); ++j) coeffs(0, j) = x(j);
  std::vector<CsdSlice> slices(1);
  slices[0].shift = 0;
  slices[0].sign = 1;
  slices[0].plane = MaskPlane::Zero(a01.cols(), a01.rows());
  for (Eigen::Index i = 0; i < a01.rows(); ++i)
    for (Eigen::Index j = 0; j < a01.cols(); ++j)
      slices[0].plane(j, i) = static_cast<std::uint8_t>(a01(i, j));
  KernelResult r = run_gemm(coeffs, a01.rows(), slices);
  MatrixI y(a01.rows(), 1);
  for (Eigen::Index i = 0; i < a01.rows(); ++i) y(i, 0) = r.out(0, i);
  r.out = std::move(y);
  return r;
}

KernelResult TensorEngine::gemm(const MatrixI& a, const MatrixI& b01) {
  require_binary(b01, "mask operand");
  if (a.cols() != b01.rows()) throw ConfigError("gemm shape mismatch");
  std::vector<CsdSlice> slices(1);
  slices[0].shift = 0;
  slices[0].sign = 1;
  slices[0].plane = b01.cast<std::uint8_t>();
  return run_gemm(a, b01.cols(), slices);
}

KernelResult TensorEngine::gemm_int(const MatrixI& a, const MatrixI& b) {
  if (a.cols() != b.rows()) throw ConfigError("gemm shape mismatch");
  return run_gemm(a, b.cols(), csd_slices(b, cfg_.signed_values));
}

// ---------------------------------------------------------------------------
// Bank-level vector ops
// ---------------------------------------------------------------------------

void bank_write_values(CounterBank& bank, const std::vector<long long>& vals) {
  Subarray& sa = bank.fabric();
  const CounterLayout& lay = bank.layout();
  if (vals.size() != sa.columns()) throw ConfigError("value count != columns");
  const long long cap = bank.capacity();
  const int base = 2 * lay.n;
  std::vector<std::vector<std::uint8_t>> bit_img(
      static_cast<std::size_t>(lay.digits) * lay.n,
      std::vector<std::uint8_t>(sa.columns(), 0));
  std::vector<std::uint8_t> sign_img(sa.columns(), 0);
  for (std::size_t c = 0; c < vals.size(); ++c) {
    long long v = vals[c];
    if (v < 0) {
      if (!lay.has_sign) throw ConfigError("negative value on unsigned bank");
      if (v <= -cap) throw ConfigError("value exceeds bank range");
      sign_img[c] = 1;
      v += cap;
    } else if (v >= cap) {
      throw ConfigError("value exceeds bank range");
    }
    const auto ds = digits_of(static_cast<unsigned long long>(v), base);
    for (int d = 0; d < lay.digits; ++d) {
      const int dv = d < static_cast<int>(ds.size()) ? ds[static_cast<std::size_t>(d)] : 0;
      const JcWord w = jc_encode(dv, lay.n);
      for (int b = 0; b < lay.n; ++b)
        bit_img[static_cast<std::size_t>(d * lay.n + b)][c] =
            w.bits[static_cast<std::size_t>(b)];
    }
  }
  for (int d = 0; d < lay.digits; ++d) {
    for (int b = 0; b < lay.n; ++b)
      sa.write_row(lay.bit_row(d, b), bit_img[static_cast<std::size_t>(d * lay.n + b)]);
    sa.fill_row(lay.onext(d), 0);
  }
  if (lay.has_sign) sa.write_row(lay.osign_row, sign_img);
}

std::vector<long long> bank_read_values(const CounterBank& bank) {
  const auto vals = bank.read_counters();
  std::vector<long long> out(vals.size());
  for (std::size_t c = 0; c < vals.size(); ++c) {
    if (!vals[c].valid) throw FabricError("undecodable counter state");
    out[c] = vals[c].value;
  }
  return out;
}

void bank_vector_add(CounterBank& dst, CounterBank& src) {
  if (dst.layout().digits != src.layout().digits)
    throw ConfigError("operand digit counts differ");
  if (src.layout().has_sign) {
    // Digit-aligned addition reads only the addend's digit rows; a set sign
    // bit would silently contribute +capacity instead of a negation.
    const auto& sign = src.fabric().peek_row(src.layout().osign_row);
    for (std::uint8_t bit : sign)
      if (bit) throw ConfigError("addend bank must be nonnegative");
  }
  for (int d = 0; d < dst.layout().digits; ++d) jc_add(dst, d, src, d);
  dst.sweep();
}

void bank_relu(CounterBank& bank) {
  const CounterLayout& lay = bank.layout();
  if (!lay.has_sign) throw ConfigError("relu requires a signed bank");
  if (bank.any_pending())
    throw ConfigError("resolve pending carries before relu");
  for (int d = 0; d < lay.digits; ++d)
    for (int b = 0; b < lay.n; ++b)
      bank.run(gen_masked_write(lay.n, lay.bit_row(d, b), kC0, false,
                                lay.osign_row),
               CounterBank::Bucket::kOther);
  bank.run(gen_masked_write(lay.n, lay.osign_row, kC0, false, lay.osign_row),
           CounterBank::Bucket::kOther);
}

void bank_shift_left(CounterBank& bank, CounterBank& scratch, int shifts) {
  if (&bank.fabric() != &scratch.fabric())
    throw ConfigError("shift scratch must share the subarray");
  if (bank.layout().has_sign || scratch.layout().has_sign)
    throw ConfigError("shift is defined for unsigned banks");
  if (bank.layout().n != scratch.layout().n ||
      bank.layout().digits != scratch.layout().digits)
    throw ConfigError("shift scratch shape mismatch");
  if (shifts < 0) throw ConfigError("negative shift");
  const CounterLayout& lay = bank.layout();
  for (int s = 0; s < shifts; ++s) {
    if (bank.any_pending())
      throw ConfigError("resolve pending carries before shifting");
    scratch.reset();
    MicroProgram cp;
    cp.n = lay.n;
    cp.purpose = "clone digits into shift scratch";
    for (int d = 0; d < lay.digits; ++d)
      for (int b = 0; b < lay.n; ++b)
        cp.emit_aap(MultiRowAddress::single(lay.bit_row(d, b)),
                    MultiRowAddress::single(scratch.layout().bit_row(d, b)));
    bank.run(cp, CounterBank::Bucket::kOther);
    bank_vector_add(bank, scratch);
  }
}

}  // namespace jcim
