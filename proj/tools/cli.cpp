#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>

#include "ssync/bitstream.hpp"
#include "ssync/errors.hpp"
#include "ssync/fastpath.hpp"
#include "ssync/oracle.hpp"
#include "ssync/ranksupport.hpp"
#include "ssync/recompress.hpp"
#include "ssync/runs.hpp"
#include "ssync/sparsecodec.hpp"
#include "ssync/syncset.hpp"
#include "ssync/transducer.hpp"

namespace ssync::cli {

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  uint64_t sigma = 256;
  uint64_t table_n = kDefaultTableN;
  double fallback_threshold = 256.0;
  uint64_t seed = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

PackedText load_text(const std::string& path, const Config& cfg) {
  std::string raw = read_file(path);
  std::vector<uint32_t> sym(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) sym[i] = static_cast<unsigned char>(raw[i]);
  return PackedText::from_symbols(sym, cfg.sigma);
}

SparseEncoding load_sparse(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  Container c = read_container(in);
  return SparseEncoding{std::move(c.bits), c.decoded_len};
}

// Writes to `path`, or to `out` when path is empty.
template <class F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  write(f);
  if (!f) throw IoError("write failed for " + path);
}

void write_sparse(std::ostream& os, const SparseEncoding& e) { write_container(os, Container{e.decoded_len, e.stream}); }

SyncOptions sync_options(const Config& cfg) {
  SyncOptions o;
  o.recompress.table_n = cfg.table_n;
  o.recompress.fallback_threshold = cfg.fallback_threshold;
  return o;
}

FastPathOptions fast_options(const Config& cfg) {
  FastPathOptions o;
  o.sync = sync_options(cfg);
  o.accel.table_n = cfg.table_n;
  return o;
}

void check_tau(uint64_t tau, uint64_t n) {
  if (tau < 1 || 2 * tau > n)
    throw UsageError("tau must lie in [1..n/2] (n = " + std::to_string(n) + "), got " + std::to_string(tau));
}

std::vector<uint64_t> parse_numbers(const std::string& s) {
  std::vector<uint64_t> v;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    size_t used = 0;
    uint64_t x = 0;
    try {
      x = std::stoull(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok[0] == '-') throw UsageError("not a decimal number: " + tok);
    v.push_back(x);
  }
  return v;
}

template <class Clock = std::chrono::steady_clock>
uint64_t elapsed_ns(typename Clock::time_point since) {
  return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - since).count());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"string synchronizing sets"};
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  app.add_option("--sigma", cfg.sigma, "alphabet size of the input text")->check(CLI::Range(uint64_t{1}, uint64_t{1} << 31));
  app.add_option("--table-n", cfg.table_n, "lookup table parameter N")->check(CLI::Range(uint64_t{2}, uint64_t{1} << 24));
  app.add_option("--fallback-threshold", cfg.fallback_threshold, "packed recompression when log_sigma n reaches this");
  app.add_option("--seed", cfg.seed, "seed for generated texts");

  std::string input, container, out_path, format = "list";
  uint64_t tau = 0;
  bool support = false, verify = false;

  auto* sync = app.add_subcommand("sync", "compute a synchronizing set");
  sync->add_option("input", input, "text file")->required();
  sync->add_option("--tau", tau)->required();
  sync->add_option("--format", format)->check(CLI::IsMember({"list", "bitmask", "sparse"}));
  sync->add_flag("--support", support, "build rank/select support for sparse output");
  sync->add_flag("--verify", verify, "check the result against the oracle");
  sync->add_option("--out", out_path);

  std::optional<uint64_t> rank_arg, select_arg, pred_arg;
  auto* query = app.add_subcommand("query", "rank/select on a sparse container");
  query->add_option("container", container)->required();
  query->add_option("--rank", rank_arg);
  query->add_option("--select", select_arg);
  query->add_option("--pred", pred_arg);

  auto* encode = app.add_subcommand("encode", "decimal array to sparse container");
  encode->add_option("input", input, "whitespace-separated decimals")->required();
  encode->add_option("--out", out_path);

  auto* decode = app.add_subcommand("decode", "sparse container to decimal array");
  decode->add_option("container", container)->required();
  decode->add_option("--out", out_path);

  auto* verify_cmd = app.add_subcommand("verify", "check a saved synchronizing set against its text");
  verify_cmd->add_option("input", input, "text file")->required();
  verify_cmd->add_option("container", container)->required();
  verify_cmd->add_option("--tau", tau)->required();
  verify_cmd->add_option("--format", format)->check(CLI::IsMember({"bitmask", "sparse"}));

  std::string tau_list = "8,64,512";
  uint64_t gen_n = uint64_t{1} << 16;
  auto* bench = app.add_subcommand("bench", "timings and sizes per tau as CSV");
  bench->add_option("input", input, "text file (random text when omitted)");
  bench->add_option("--tau-list", tau_list);
  bench->add_option("--n", gen_n, "length of the generated text");
  bench->add_flag("--support", support);
  bench->add_option("--out", out_path);

  int level = -1;
  auto* recompress = app.add_subcommand("recompress", "boundary set sizes per level");
  recompress->add_option("input", input)->required();
  recompress->add_option("--level", level, "print the positions of one level");

  uint64_t ell = 0;
  auto* runs = app.add_subcommand("runs", "runs of length >= ell and period <= tau/3");
  runs->add_option("input", input)->required();
  runs->add_option("--tau", tau)->required();
  runs->add_option("--ell", ell, "minimum length (default tau)");

  std::string program = "decrement";
  uint64_t threshold = 1;
  auto* transduce = app.add_subcommand("transduce", "run a built-in transducer on a sparse container");
  transduce->add_option("container", container)->required();
  transduce->add_option("--program", program)->check(CLI::IsMember({"decrement", "threshold"}));
  transduce->add_option("--threshold", threshold, "outputs 1 where the input is at least this");
  transduce->add_option("--out", out_path);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (sync->parsed()) {
      PackedText t = load_text(input, cfg);
      check_tau(tau, t.n());
      std::vector<uint64_t> set;
      if (format == "list") {
        set = build_sync_explicit(t, tau, sync_options(cfg));
        emit(out_path, out, [&](std::ostream& os) {
          for (uint64_t i : set) os << i << "\n";
        });
      } else if (format == "bitmask") {
        BitStream m = build_sync_bitmask(t, tau, sync_options(cfg));
        set = bitmask_to_list(m);
        emit(out_path, out, [&](std::ostream& os) { write_container(os, Container{t.n(), m}); });
      } else {
        FastSync f(t, fast_options(cfg));
        SparseEncoding m;
        if (support) {
          SyncSetHandle h = f.sync_with_support(tau);
          err << "support: " << h.size() << " positions, space parameter " << h.space() << "\n";
          m = h.encoding();
        } else {
          m = f.sync_sparse(tau);
        }
        set = senc_to_positions(m);
        emit(out_path, out, [&](std::ostream& os) { write_sparse(os, m); });
      }
      if (verify) {
        oracle::Report r = oracle::verify_sync(t.symbols(), tau, set);
        if (!r) {
          err << "verification failed: " << r.condition << " at " << r.position << " " << r.detail << "\n";
          return kVerifyFailed;
        }
        err << "verified " << set.size() << " positions\n";
      }
      return kOk;
    }
    if (query->parsed()) {
      int given = !!rank_arg + !!select_arg + !!pred_arg;
      if (given != 1) throw UsageError("give exactly one of --rank, --select, --pred");
      SparseEncoding e = load_sparse(container);
      SparseMaskSupport s(e, cfg.table_n);
      if (rank_arg) {
        if (*rank_arg > s.n()) throw UsageError("rank argument exceeds n");
        out << s.rank(*rank_arg) << "\n";
      } else if (select_arg) {
        if (*select_arg < 1 || *select_arg > s.ones())
          throw UsageError("select argument must lie in [1.." + std::to_string(s.ones()) + "]");
        out << s.select(*select_arg) << "\n";
      } else {
        if (*pred_arg >= s.n()) throw UsageError("pred argument must be below n");
        auto p = s.pred(*pred_arg);
        if (p)
          out << *p << "\n";
        else
          out << "none\n";
      }
      return kOk;
    }
    if (encode->parsed()) {
      std::vector<uint64_t> v = parse_numbers(read_file(input));
      for (uint64_t x : v)
        if (x > kMaxLiteral) throw UsageError("value exceeds 2^62");
      SparseEncoding e = senc_encode(v);
      emit(out_path, out, [&](std::ostream& os) { write_sparse(os, e); });
      return kOk;
    }
    if (decode->parsed()) {
      std::vector<uint64_t> v = senc_decode(load_sparse(container));
      emit(out_path, out, [&](std::ostream& os) {
        for (size_t i = 0; i < v.size(); ++i) os << v[i] << (i + 1 == v.size() ? "\n" : " ");
      });
      return kOk;
    }
    if (verify_cmd->parsed()) {
      PackedText t = load_text(input, cfg);
      check_tau(tau, t.n());
      std::vector<uint64_t> set;
      try {
        std::ifstream in(container, std::ios::binary);
        if (!in) throw IoError("cannot open " + container);
        Container c = read_container(in);
        if (c.decoded_len != t.n()) throw FormatError("container length differs from the text");
        if (format == "bitmask") {
          if (c.bits.size() != t.n()) throw FormatError("bitmask length differs from the text");
          set = bitmask_to_list(c.bits);
        } else {
          set = senc_to_positions(SparseEncoding{c.bits, c.decoded_len});
        }
      } catch (const FormatError& e) {
        err << "verification failed: " << e.what() << "\n";
        return kVerifyFailed;
      } catch (const DecodeError& e) {
        err << "verification failed: " << e.what() << "\n";
        return kVerifyFailed;
      } catch (const InvalidInput& e) {
        err << "verification failed: " << e.what() << "\n";
        return kVerifyFailed;
      }
      oracle::Report r = oracle::verify_sync(t.symbols(), tau, set);
      if (!r) {
        err << "verification failed: " << r.condition << " at " << r.position << " " << r.detail << "\n";
        return kVerifyFailed;
      }
      if (set != build_sync_explicit(t, tau, sync_options(cfg))) {
        err << "verification failed: set differs from the construction\n";
        return kVerifyFailed;
      }
      out << "ok " << set.size() << " positions\n";
      return kOk;
    }
    if (bench->parsed()) {
      PackedText t;
      if (input.empty()) {
        std::mt19937_64 rng(cfg.seed);
        std::vector<uint32_t> sym(gen_n);
        uint64_t sigma = std::min<uint64_t>(cfg.sigma, 256);
        for (auto& c : sym) c = static_cast<uint32_t>(rng() % sigma);
        t = PackedText::from_symbols(sym, sigma);
      } else {
        t = load_text(input, cfg);
      }
      std::string list = tau_list;
      std::replace(list.begin(), list.end(), ',', ' ');
      std::vector<uint64_t> taus = parse_numbers(list);
      for (uint64_t x : taus) check_tau(x, t.n());
      uint64_t n = t.n();
      auto start = std::chrono::steady_clock::now();
      SyncBuilder builder(t, sync_options(cfg));
      uint64_t build_explicit = elapsed_ns(start);
      start = std::chrono::steady_clock::now();
      FastSync fast(t, fast_options(cfg));
      uint64_t build_fast = elapsed_ns(start);
      unsigned lg_n = std::max(1u, ceil_lg(std::max<uint64_t>(n, 2)));
      emit(out_path, out, [&](std::ostream& os) {
        os << kBenchHeader << "\n";
        for (uint64_t x : taus) {
          auto row = [&](const char* repr, uint64_t bits, uint64_t build_ns, uint64_t query_ns) {
            os << n << "," << t.sigma_in() << "," << x << "," << repr << "," << bits << "," << build_ns << ","
               << query_ns << "\n";
          };
          auto q0 = std::chrono::steady_clock::now();
          auto set = builder.explicit_set(x);
          row("list", set.size() * lg_n, build_explicit, elapsed_ns(q0));
          q0 = std::chrono::steady_clock::now();
          BitStream m = builder.bitmask(x);
          row("bitmask", m.size(), build_explicit, elapsed_ns(q0));
          q0 = std::chrono::steady_clock::now();
          SparseEncoding s = fast.sync_sparse(x);
          row("sparse", s.stream.size(), build_fast, elapsed_ns(q0));
          if (support) {
            q0 = std::chrono::steady_clock::now();
            SyncSetHandle h = fast.sync_with_support(x);
            row("sparse+support", h.encoding().stream.size(), build_fast, elapsed_ns(q0));
          }
        }
      });
      return kOk;
    }
    if (recompress->parsed()) {
      PackedText t = load_text(input, cfg);
      Recompressor rec(t, sync_options(cfg).recompress);
      if (level >= 0) {
        for (uint64_t i : rec.bk_explicit(static_cast<unsigned>(level))) out << i << "\n";
        return kOk;
      }
      out << "level,size,packed\n";
      for (unsigned k = 0; k <= rec.q(); ++k)
        out << k << "," << rec.bk_explicit(k).size() << "," << (rec.packed() && k < rec.K() ? 1 : 0) << "\n";
      return kOk;
    }
    if (runs->parsed()) {
      PackedText t = load_text(input, cfg);
      if (tau < 1 || tau > t.n()) throw UsageError("tau must lie in [1..n]");
      uint64_t len = ell ? ell : tau;
      if (len < 2 * (tau / 3)) throw UsageError("ell must be at least 2 floor(tau/3)");
      for (const Run& r : enumerate_runs(t, len, tau / 3)) out << r.b << " " << r.e << " " << r.p << "\n";
      return kOk;
    }
    if (transduce->parsed()) {
      SparseEncoding e = load_sparse(container);
      TransducerSpec spec;
      if (program == "decrement") {
        spec.delta = [](State, std::span<const uint64_t> c) { return Step{0, c[0] > 0 ? c[0] - 1 : 0}; };
      } else {
        spec.delta = [threshold](State, std::span<const uint64_t> c) {
          return Step{0, c[0] >= threshold ? 1u : 0u};
        };
      }
      AccelOptions opt;
      opt.table_n = cfg.table_n;
      SparseEncoding r = AcceleratedTransducer(spec, opt).run(e);
      emit(out_path, out, [&](std::ostream& os) { write_sparse(os, r); });
      return kOk;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const DecodeError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace ssync::cli
