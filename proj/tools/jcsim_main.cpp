// jcsim: command-line driver for the counting-fabric simulator.
//
//   jcsim opcount     mean fabric ops per accumulated input, per policy
//   jcsim faults      silent-error / detection rates (analytic + Monte-Carlo)
//   jcsim kernel      integer matrix kernels with a host oracle check
//   jcsim trace-iarm  deferred-carry walk with per-step actions and states
//   jcsim uprog       program listings for every substrate
//
// Each run writes <out-root>/<verb>/<timestamp>/ with config.json and its
// result files, and prints a human-readable summary to stdout.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jcim/backends.hpp"
#include "jcim/counters.hpp"
#include "jcim/iarm.hpp"
#include "jcim/io.hpp"
#include "jcim/jc.hpp"
#include "jcim/shield.hpp"
#include "jcim/tensor.hpp"
#include "jcim/timing.hpp"
#include "jcim/uprog.hpp"

using namespace jcim;
using nlohmann::json;

namespace {

std::filesystem::path prepare_dir(const std::string& root,
                                  const std::string& verb, const json& config) {
  const std::filesystem::path dir = make_results_dir(root, verb);
  std::ofstream cfg(dir / "config.json");
  cfg << config.dump(2) << "\n";
  return dir;
}

// ---------------------------------------------------------------------------
// opcount
// ---------------------------------------------------------------------------

struct OpcountArgs {
  std::vector<int> radices = {4, 6, 8, 10, 12, 16};
  std::vector<int> capacities = {16, 32, 64};
  int samples = 10000;
  std::uint64_t seed = 1;
};

int run_opcount(const OpcountArgs& a, const std::string& out_root) {
  json cfg{{"radices", a.radices},
           {"capacities", a.capacities},
           {"samples", a.samples},
           {"seed", a.seed}};
  const auto dir = prepare_dir(out_root, "opcount", cfg);

  std::ostringstream csv;
  csv << "radix,capacity,policy,mean_ops_per_input\n";
  auto emit = [&](int radix, int bits, const std::string& policy, double mean) {
    csv << radix << "," << bits << "," << policy << "," << mean << "\n";
    std::printf("  radix %2d, %2d-bit: %-17s %10.2f ops/input\n", radix, bits,
                policy.c_str(), mean);
  };

  for (int radix : a.radices) {
    if (radix < 4 || radix % 2 != 0) {
      std::fprintf(stderr, "radix must be even and >= 4, got %d\n", radix);
      return 1;
    }
    const int n = radix / 2;
    std::mt19937_64 rng(a.seed + static_cast<std::uint64_t>(radix));
    std::uniform_int_distribution<int> dist(0, 255);
    std::vector<int> inputs(static_cast<std::size_t>(a.samples));
    for (int& x : inputs) x = dist(rng);
    for (int bits : a.capacities) {
      const int d = capacity_digits(n, bits);
      struct Policy {
        const char* name;
        AddStrategy strategy;
        CarryPolicy policy;
      };
      const Policy policies[] = {
          {"unary_full_ripple", AddStrategy::kUnary, CarryPolicy::kFullRipple},
          {"kary_full_ripple", AddStrategy::kKary, CarryPolicy::kFullRipple},
          {"kary_iarm", AddStrategy::kKary, CarryPolicy::kIarm},
      };
      for (const Policy& p : policies) {
        Subarray sa(kDataStart + bank_rows(n, d, false), 1, FaultModel{});
        CounterBank bank(sa, n, d, false, kDataStart);
        IarmScheduler sched(n, d);
        IarmScheduler* ip = p.policy == CarryPolicy::kIarm ? &sched : nullptr;
        for (int x : inputs)
          bank.accumulate_value(x, -1, p.strategy, p.policy, ip);
        if (ip) sched.flush(bank);
        emit(radix, bits,
             p.name,
             static_cast<double>(bank.stats().total_ops()) /
                 static_cast<double>(a.samples));
      }
    }
  }
  // Binary ripple-carry baseline: value-invariant, radix-free (reported as
  // radix 2), one full-width add per input.
  for (int bits : a.capacities) {
    std::vector<std::size_t> acc, add;
    for (int i = 0; i < bits; ++i)
      acc.push_back(kDataStart + static_cast<std::size_t>(i));
    for (int i = 0; i < 8; ++i)
      add.push_back(kDataStart + static_cast<std::size_t>(bits + i));
    const MicroProgram p =
        gen_rca_add(acc, add, kDataStart + static_cast<std::size_t>(bits) + 8,
                    kDataStart + static_cast<std::size_t>(bits) + 9);
    emit(2, bits, "rca", static_cast<double>(p.size()));
  }

  std::ofstream out(dir / "results.csv");
  out << csv.str();
  std::printf("wrote %s\n", (dir / "results.csv").c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// faults
// ---------------------------------------------------------------------------

struct FaultsArgs {
  std::vector<double> ps = {1e-1, 1e-2, 1e-4};
  std::vector<int> rs = {2, 4, 6};
  std::uint64_t mc_trials = 0;
  std::uint64_t seed = 1;
};

int run_faults(const FaultsArgs& a, const std::string& out_root) {
  json cfg{{"p", a.ps}, {"r", a.rs}, {"mc_trials", a.mc_trials},
           {"seed", a.seed}};
  const auto dir = prepare_dir(out_root, "faults", cfg);

  std::vector<FaultRates> rows;
  for (int r : a.rs) {
    for (double p : a.ps) {
      rows.push_back(rates_analytic(p, r));
      if (a.mc_trials > 0)
        rows.push_back(rates_montecarlo(p, r, a.mc_trials, a.seed));
    }
  }
  for (const FaultRates& fr : rows) {
    std::printf("  p=%-8g r=%d  error %-12.4g detect %-10.4g %s\n", fr.p, fr.r,
                fr.error_rate, fr.detect_rate,
                fr.analytic ? "analytic" : "montecarlo");
  }
  std::ofstream out(dir / "results.csv");
  write_fault_csv(out, rows);
  std::printf("wrote %s\n", (dir / "results.csv").c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// kernel
// ---------------------------------------------------------------------------

struct KernelArgs {
  std::string spec_file;
  std::string a_file;
  std::string b_file;
  std::string mode = "auto";  // auto | vector | binary | int
  int n = 5;
  int bits = 32;
  std::string policy = "ripple";    // ripple | iarm
  std::string strategy = "kary";    // kary | unary
  bool unsigned_values = false;
  bool no_oracle = false;
  int banks = 16;
  std::uint64_t seed = 1;
};

bool is_binary(const MatrixI& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0 && m(i, j) != 1) return false;
  return true;
}

MatrixI load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_matrix_csv(in);
}

int run_kernel(const KernelArgs& a, const std::string& out_root) {
  MatrixI ma, mb;
  if (!a.spec_file.empty()) {
    std::ifstream in(a.spec_file);
    if (!in) throw ConfigError("cannot open " + a.spec_file);
    std::stringstream ss;
    ss << in.rdbuf();
    RandomKernelSpec spec = kernel_spec_from_json(ss.str());
    if (spec.seed == 0) spec.seed = a.seed;
    const KernelOperands ops = make_random_kernel(spec);
    ma = ops.a;
    mb = ops.b;
  } else if (!a.a_file.empty() && !a.b_file.empty()) {
    ma = load_matrix(a.a_file);
    mb = load_matrix(a.b_file);
  } else {
    std::fprintf(stderr, "kernel needs either --spec or both --a and --b\n");
    return 1;
  }

  std::string mode = a.mode;
  if (mode == "auto") {
    if (mb.cols() == 1 && is_binary(ma))
      mode = "vector";
    else if (is_binary(mb))
      mode = "binary";
    else
      mode = "int";
  }

  KernelConfig kc;
  kc.n = a.n;
  kc.capacity_bits = a.bits;
  kc.policy = a.policy == "iarm" ? CarryPolicy::kIarm : CarryPolicy::kFullRipple;
  kc.strategy = a.strategy == "unary" ? AddStrategy::kUnary : AddStrategy::kKary;
  kc.signed_values = !a.unsigned_values;
  kc.seed = a.seed;
  TensorEngine eng(kc);

  KernelResult res;
  if (mode == "vector") {
    res = eng.gemv(ma, VectorI(mb.col(0)));
  } else if (mode == "binary") {
    res = eng.gemm(ma, mb);
  } else {
    res = eng.gemm_int(ma, mb);
  }

  const MatrixI expect = ma * mb;
  const bool match = res.out == expect;
  if (!a.no_oracle && !match) {
    std::fprintf(stderr, "FAIL: kernel output disagrees with the host oracle\n");
    return 1;
  }

  json cfg{{"mode", mode},
           {"M", ma.rows()},
           {"K", ma.cols()},
           {"N", mb.cols()},
           {"n", a.n},
           {"capacity_bits", a.bits},
           {"digits", eng.digits()},
           {"policy", a.policy},
           {"strategy", a.strategy},
           {"signed", !a.unsigned_values},
           {"banks", a.banks},
           {"seed", a.seed}};
  const auto dir = prepare_dir(out_root, "kernel", cfg);
  {
    std::ofstream out(dir / "out.csv");
    write_matrix_csv(out, res.out);
  }

  const TimingModel tm;
  const std::uint64_t total = res.stats.total_ops();
  std::printf("kernel %s: %lldx%lld * %lldx%lld -> %lldx%lld  oracle: %s\n",
              mode.c_str(), static_cast<long long>(ma.rows()),
              static_cast<long long>(ma.cols()),
              static_cast<long long>(mb.rows()),
              static_cast<long long>(mb.cols()),
              static_cast<long long>(res.out.rows()),
              static_cast<long long>(res.out.cols()),
              a.no_oracle ? "skipped" : (match ? "match" : "MISMATCH"));
  std::printf("  ops: %llu total (%llu copy, %llu majority; "
              "%llu counting, %llu carry, %llu copy-out)\n",
              static_cast<unsigned long long>(total),
              static_cast<unsigned long long>(res.stats.aap),
              static_cast<unsigned long long>(res.stats.ap),
              static_cast<unsigned long long>(res.stats.increment_ops),
              static_cast<unsigned long long>(res.stats.ripple_ops),
              static_cast<unsigned long long>(res.stats.copy_out_aap));
  std::printf("  latency @ %d bank(s): %.3f us  (x%.2f vs 1 bank)\n", a.banks,
              tm.estimate_latency_ns(total, a.banks) / 1e3, tm.speedup(a.banks));
  std::printf("wrote %s\n", (dir / "out.csv").c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// trace-iarm
// ---------------------------------------------------------------------------

struct TraceArgs {
  long long start = 9999;
  int add = 9;
  int steps = 13;
  int n = 5;
  // 9999 + 13*9 = 10116 needs a fifth base-10 digit.
  int digits = 5;
  std::string dump_counters;
  std::string dump_state;
};

std::string action_str(const IarmScheduler::Action& act) {
  switch (act.kind) {
    case IarmScheduler::Action::Kind::kAdd:
      return "add(d" + std::to_string(act.digit) + ",+" +
             std::to_string(act.k) + ")";
    case IarmScheduler::Action::Kind::kRipple:
      return "ripple(d" + std::to_string(act.digit) + ")";
    case IarmScheduler::Action::Kind::kResolveMsd:
      return "resolve-msd";
  }
  return "?";
}

std::string digits_str(const std::vector<int>& ds) {
  std::string s = "{";
  for (std::size_t i = 0; i < ds.size(); ++i)
    s += (i ? "," : "") + std::to_string(ds[i]);
  return s + "}";
}

int run_trace(const TraceArgs& a, const std::string& out_root) {
  json cfg{{"start", a.start}, {"add", a.add}, {"steps", a.steps},
           {"n", a.n},         {"digits", a.digits}};
  const auto dir = prepare_dir(out_root, "trace-iarm", cfg);
  std::ostringstream log;

  Subarray sa(kDataStart + bank_rows(a.n, a.digits, false), 1, FaultModel{});
  CounterBank bank(sa, a.n, a.digits, false, kDataStart);
  IarmScheduler sched(a.n, a.digits);
  const auto add_fn = [&](int digit, int k) {
    bank.increment_digit(digit, k, -1);
  };
  const auto execute = [&](const std::vector<IarmScheduler::Action>& acts) {
    std::string s;
    for (const auto& act : acts) {
      s += (s.empty() ? "" : " ") + action_str(act);
      switch (act.kind) {
        case IarmScheduler::Action::Kind::kAdd:
          add_fn(act.digit, act.k);
          break;
        case IarmScheduler::Action::Kind::kRipple:
          bank.ripple(act.digit);
          break;
        case IarmScheduler::Action::Kind::kResolveMsd:
          bank.resolve_msd();
          break;
      }
    }
    return s.empty() ? std::string("(none)") : s;
  };
  auto line = [&](const std::string& s) {
    std::printf("%s\n", s.c_str());
    log << s << "\n";
  };

  const std::vector<int> start_ds =
      digits_of(static_cast<unsigned long long>(a.start), 2 * a.n);
  if (static_cast<int>(start_ds.size()) > a.digits)
    throw ConfigError("start value does not fit in the configured digits");
  line("load " + std::to_string(a.start) + ": " +
       execute(sched.plan(start_ds)) + "  virtual " +
       digits_str(sched.virtual_digits()));
  const std::vector<int> add_ds =
      digits_of(static_cast<unsigned long long>(a.add), 2 * a.n);
  for (int step = 1; step <= a.steps; ++step) {
    line("step " + std::to_string(step) + " (+" + std::to_string(a.add) +
         "): " + execute(sched.plan(add_ds)) + "  virtual " +
         digits_str(sched.virtual_digits()));
  }
  line("flush: " + execute(sched.plan_flush()) + "  virtual " +
       digits_str(sched.virtual_digits()));
  const auto vals = bank.read_counters();
  const long long expect =
      a.start + static_cast<long long>(a.steps) * a.add;
  line("decoded " + std::to_string(vals[0].value) + " (expected " +
       std::to_string(expect) + (vals[0].value == expect ? ", ok)" : ", BAD)"));
  line("planned ripples: " + std::to_string(sched.planned_ripples()));

  std::ofstream(dir / "trace.txt") << log.str();
  if (!a.dump_counters.empty()) {
    std::ofstream out(a.dump_counters);
    write_digit_csv(out, bank);
  }
  if (!a.dump_state.empty()) {
    std::ofstream out(a.dump_state);
    sa.dump(out);
  }
  std::printf("wrote %s\n", (dir / "trace.txt").c_str());
  return vals[0].value == expect ? 0 : 1;
}

// ---------------------------------------------------------------------------
// uprog
// ---------------------------------------------------------------------------

struct UprogArgs {
  int n = 5;
  int k = 1;
  std::string backend = "ambit";
  bool protect = false;
  int r = 2;
  bool paired = false;
};

const char* logic_op_name(LogicOp op) {
  switch (op) {
    case LogicOp::kAnd2: return "AND";
    case LogicOp::kOr2: return "OR";
    case LogicOp::kNor2: return "NOR";
    case LogicOp::kNot1: return "NOT";
    case LogicOp::kCopy: return "COPY";
    case LogicOp::kInit1: return "INIT1";
  }
  return "?";
}

int run_uprog(const UprogArgs& a, const std::string& out_root) {
  json cfg{{"n", a.n},       {"k", a.k},   {"backend", a.backend},
           {"protected", a.protect}, {"r", a.r}, {"paired", a.paired}};
  const auto dir = prepare_dir(out_root, "uprog", cfg);
  std::ostringstream listing;

  const Backend be = backend_from_string(a.backend);
  if (be == Backend::kAmbit) {
    Subarray sa(kDataStart + bank_rows(a.n, 1, false) + 1 + kProtRowCount, 1,
                FaultModel{});
    CounterBank bank(sa, a.n, 1, false, kDataStart);
    if (a.protect) {
      const std::size_t mask_row = kDataStart + bank_rows(a.n, 1, false);
      ProtectionConfig pc;
      pc.fr_checks = a.r;
      pc.demorgan_pairing = a.paired;
      const ProtProgram p = gen_protected_increment(
          bank.layout(), make_prot_rows(mask_row + 1), 0, a.k, mask_row, pc);
      listing << "; protected +"<< a.k << " (n=" << a.n << ", r=" << a.r
              << (a.paired ? ", paired" : "") << "): " << p.size() << " ops\n";
      for (std::size_t i = 0; i < p.ops.size(); ++i) {
        const ProtOp& op = p.ops[i];
        listing << i << ": "
                << (op.kind == ProtKind::kStage ? "STAGE" : "MAJ  ") << " -> r"
                << op.dst;
        if (op.check != CheckKind::kNone) listing << "  [checked]";
        if (!op.note.empty()) listing << "  ; " << op.note;
        listing << "\n";
      }
    } else {
      const MicroProgram p =
          gen_kary_program(bank.layout(), 0, a.k, bank.layout().mask_row);
      listing << to_listing(p);
    }
  } else {
    Subarray sa(kDataStart + alt_bank_rows(be, a.n, 1), 1, FaultModel{});
    AltBank ab = make_alt_bank(sa, be, a.n, 1, kDataStart);
    const LogicProgram p = gen_alt_increment(ab, 0, a.k, -1, true);
    listing << "; " << to_string(be) << " +" << a.k << " (n=" << a.n
            << "): " << p.size() << " ops (" << p.overflow_ops
            << " overflow, " << p.extra_ops << " extra)\n";
    for (std::size_t i = 0; i < p.cmds.size(); ++i) {
      const LogicCmd& c = p.cmds[i];
      listing << i << ": " << logic_op_name(c.op) << " r" << c.dst;
      if (c.op != LogicOp::kInit1) {
        listing << " <- r" << c.a;
        if (c.op == LogicOp::kAnd2 || c.op == LogicOp::kOr2 ||
            c.op == LogicOp::kNor2)
          listing << ", r" << c.b;
      }
      if (!c.note.empty()) listing << "  ; " << c.note;
      listing << "\n";
    }
  }

  std::fputs(listing.str().c_str(), stdout);
  std::ofstream(dir / "listing.txt") << listing.str();
  std::printf("wrote %s\n", (dir / "listing.txt").c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"counting-fabric simulator"};
  app.require_subcommand(1);
  std::string out_root = "results";
  app.add_option("--out-dir", out_root, "results root directory");

  OpcountArgs oa;
  CLI::App* op = app.add_subcommand("opcount", "mean ops per input, per policy");
  op->add_option("--radices", oa.radices, "even radices (2n)")->delimiter(',');
  op->add_option("--capacities", oa.capacities, "counter capacities in bits")
      ->delimiter(',');
  op->add_option("--samples", oa.samples, "inputs per stream");
  op->add_option("--seed", oa.seed, "random seed");

  FaultsArgs fa;
  CLI::App* fl = app.add_subcommand("faults", "fault rate tables");
  fl->add_option("--p", fa.ps, "likely-fault probabilities")->delimiter(',');
  fl->add_option("--r", fa.rs, "recomputation counts (even)")->delimiter(',');
  fl->add_option("--mc-trials", fa.mc_trials,
                 "Monte-Carlo trials per cell (0 = analytic only)");
  fl->add_option("--seed", fa.seed, "random seed");

  KernelArgs ka;
  CLI::App* kn = app.add_subcommand("kernel", "integer matrix kernels");
  kn->add_option("--spec", ka.spec_file, "random-kernel JSON spec file");
  kn->add_option("--a", ka.a_file, "left operand CSV");
  kn->add_option("--b", ka.b_file, "right operand CSV");
  kn->add_option("--mode", ka.mode, "auto|vector|binary|int");
  kn->add_option("--n", ka.n, "Johnson order");
  kn->add_option("--bits", ka.bits, "counter capacity in bits");
  kn->add_option("--policy", ka.policy, "ripple|iarm");
  kn->add_option("--strategy", ka.strategy, "kary|unary");
  kn->add_flag("--unsigned", ka.unsigned_values, "unsigned accumulators");
  kn->add_flag("--no-oracle", ka.no_oracle, "skip the host oracle check");
  kn->add_option("--banks", ka.banks, "banks for the latency estimate");
  kn->add_option("--seed", ka.seed, "random seed");

  TraceArgs ta;
  CLI::App* tr = app.add_subcommand("trace-iarm", "deferred-carry walk");
  tr->add_option("--start", ta.start, "initial counter value");
  tr->add_option("--add", ta.add, "value added per step");
  tr->add_option("--steps", ta.steps, "number of steps");
  tr->add_option("--n", ta.n, "Johnson order");
  tr->add_option("--digits", ta.digits, "counter digits");
  tr->add_option("--dump-counters", ta.dump_counters, "digit CSV output path");
  tr->add_option("--dump-state", ta.dump_state, "subarray snapshot path");

  UprogArgs ua;
  CLI::App* up = app.add_subcommand("uprog", "program listings");
  up->add_option("--n", ua.n, "Johnson order");
  up->add_option("--k", ua.k, "stride");
  up->add_option("--backend", ua.backend, "ambit|pinatubo|magic");
  up->add_flag("--protected", ua.protect, "fault-protected program");
  up->add_option("--r", ua.r, "recomputations per protected bit");
  up->add_flag("--paired", ua.paired, "pair inverted steps");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*op) return run_opcount(oa, out_root);
    if (*fl) return run_faults(fa, out_root);
    if (*kn) return run_kernel(ka, out_root);
    if (*tr) return run_trace(ta, out_root);
    if (*up) return run_uprog(ua, out_root);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
