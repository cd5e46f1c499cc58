#include "jcim/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace jcim {

void write_digit_csv(std::ostream& os, const CounterBank& bank) {
  const CounterLayout& lay = bank.layout();
  const Subarray& sa = const_cast<CounterBank&>(bank).fabric();
  os << "column,digit,value,o_next\n";
  for (std::size_t c = 0; c < sa.columns(); ++c) {
    for (int d = 0; d < lay.digits; ++d) {
      JcWord w;
      w.n = lay.n;
      w.bits.resize(static_cast<std::size_t>(lay.n));
      for (int b = 0; b < lay.n; ++b)
        w.bits[static_cast<std::size_t>(b)] = sa.peek(lay.bit_row(d, b), c);
      const auto v = jc_try_decode(w);
      os << c << ',' << d << ',' << (v ? static_cast<int>(*v) : -1) << ','
         << static_cast<int>(sa.peek(lay.onext(d), c)) << '\n';
    }
  }
}

void write_fault_csv(std::ostream& os, const std::vector<FaultRates>& rows) {
  os << "p,r,error_rate,detect_rate,ci_low,ci_high,source\n";
  char buf[200];
  for (const FaultRates& fr : rows) {
    std::snprintf(buf, sizeof buf, "%.6g,%d,%.9g,%.9g,%.9g,%.9g,%s\n", fr.p,
                  fr.r, fr.error_rate, fr.detect_rate, fr.error_lo, fr.error_hi,
                  fr.analytic ? "analytic" : "montecarlo");
    os << buf;
  }
}

MatrixI read_matrix_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty matrix file");
  auto parse_cells = [](const std::string& s) {
    std::vector<long long> cells;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      cells.push_back(std::stoll(tok));
    }
    return cells;
  };
  const auto dims = parse_cells(line);
  if (dims.size() != 2 || dims[0] < 0 || dims[1] < 0)
    throw ConfigError("matrix header must be 'rows,cols'");
  MatrixI m(dims[0], dims[1]);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!std::getline(is, line)) throw ConfigError("truncated matrix file");
    const auto cells = parse_cells(line);
    if (static_cast<Eigen::Index>(cells.size()) != m.cols())
      throw ConfigError("matrix row width mismatch");
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = cells[static_cast<std::size_t>(j)];
  }
  return m;
}

void write_matrix_csv(std::ostream& os, const MatrixI& m) {
  os << m.rows() << ',' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << m(i, j) << (j + 1 == m.cols() ? '\n' : ',');
    if (m.cols() == 0) os << '\n';
  }
}

RandomKernelSpec kernel_spec_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RandomKernelSpec s;
  s.m = j.value("M", s.m);
  s.k = j.value("K", s.k);
  s.n_out = j.value("N", s.n_out);
  s.bits = j.value("bits", s.bits);
  s.is_signed = j.value("signed", s.is_signed);
  s.sparsity = j.value("sparsity", s.sparsity);
  s.seed = j.value("seed", s.seed);
  if (s.m < 1 || s.k < 1 || s.n_out < 1) throw ConfigError("bad kernel shape");
  if (s.bits < 1 || s.bits > 16) throw ConfigError("entry bits out of range");
  if (s.sparsity < 0.0 || s.sparsity > 1.0) throw ConfigError("bad sparsity");
  return s;
}

KernelOperands make_random_kernel(const RandomKernelSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution drop(spec.sparsity);
  const std::int64_t hi = (static_cast<std::int64_t>(1) << spec.bits) - 1;
  const std::int64_t lo = spec.is_signed ? -hi : 0;
  std::uniform_int_distribution<std::int64_t> val(lo, hi);
  auto fill = [&](Eigen::Index r, Eigen::Index c) {
    MatrixI m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j)
        m(i, j) = drop(rng) ? 0 : val(rng);
    return m;
  };
  KernelOperands out;
  out.a = fill(spec.m, spec.k);
  out.b = fill(spec.k, spec.n_out);
  return out;
}

std::filesystem::path make_results_dir(const std::filesystem::path& root,
                                       const std::string& experiment) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
  std::filesystem::path dir = root / experiment / stamp;
  for (int i = 1; std::filesystem::exists(dir); ++i)
    dir = root / experiment / (std::string(stamp) + "-" + std::to_string(i));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace jcim
