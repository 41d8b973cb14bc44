#include "ssync/transducer.hpp"

#include <algorithm>
#include <stdexcept>

#include "ssync/errors.hpp"

namespace ssync {

NaiveRun run_naive(const TransducerSpec& spec, const std::vector<std::vector<uint64_t>>& inputs) {
  if (inputs.size() != spec.t) throw std::invalid_argument("input arity differs from the transducer");
  NaiveRun r;
  r.final_state = spec.s0;
  if (inputs.empty()) return r;
  uint64_t n = inputs[0].size();
  for (const auto& in : inputs)
    if (in.size() != n) throw std::invalid_argument("input streams differ in length");
  r.output.reserve(n);
  std::vector<uint64_t> col(spec.t);
  State s = spec.s0;
  for (uint64_t i = 0; i < n; ++i) {
    for (unsigned j = 0; j < spec.t; ++j) {
      col[j] = inputs[j][i];
      if (spec.sigma != 0 && col[j] >= spec.sigma) throw InvalidInput("symbol outside the input alphabet");
    }
    Step st = spec.delta(s, col);
    s = st.next;
    r.output.push_back(st.out);
  }
  r.final_state = s;
  return r;
}

JumpStructure::JumpStructure(const std::vector<int64_t>& next) {
  uint32_t n = static_cast<uint32_t>(next.size());
  depth_.assign(n, 0);
  pre_.assign(n, 0);
  cycle_.assign(n, -1);
  cycle_pos_.assign(n, 0);
  root_.assign(n, 0);
  std::vector<uint8_t> color(n, 0);
  std::vector<uint8_t> on_cycle(n, 0);
  std::vector<uint32_t> path;
  for (uint32_t v = 0; v < n; ++v) {
    if (color[v]) continue;
    path.clear();
    uint32_t u = v;
    while (true) {
      color[u] = 1;
      path.push_back(u);
      int64_t w = next[u];
      if (w < 0) break;
      if (static_cast<uint64_t>(w) >= n) throw std::invalid_argument("edge target out of range");
      uint32_t x = static_cast<uint32_t>(w);
      if (color[x] == 1) {
        std::vector<uint32_t> cyc;
        auto it = std::find(path.begin(), path.end(), x);
        for (; it != path.end(); ++it) {
          cycle_pos_[*it] = static_cast<uint32_t>(cyc.size());
          cycle_[*it] = static_cast<int32_t>(cycles_.size());
          on_cycle[*it] = 1;
          cyc.push_back(*it);
        }
        cycles_.push_back(std::move(cyc));
        break;
      }
      if (color[x] == 2) break;
      u = x;
    }
    for (uint32_t p : path) color[p] = 2;
  }
  std::vector<std::vector<uint32_t>> children(n);
  for (uint32_t v = 0; v < n; ++v)
    if (next[v] >= 0 && !on_cycle[v]) children[static_cast<uint32_t>(next[v])].push_back(v);
  uint32_t counter = 0;
  std::vector<uint32_t> stack;
  for (uint32_t r = 0; r < n; ++r) {
    if (!(next[r] < 0 || on_cycle[r])) continue;
    stack.push_back(r);
    while (!stack.empty()) {
      uint32_t v = stack.back();
      stack.pop_back();
      pre_[v] = counter++;
      root_[v] = r;
      cycle_[v] = cycle_[r];
      cycle_pos_[v] = cycle_pos_[r];
      if (by_depth_.size() <= depth_[v]) by_depth_.resize(depth_[v] + 1);
      by_depth_[depth_[v]].push_back(v);
      for (auto it = children[v].rbegin(); it != children[v].rend(); ++it) {
        depth_[*it] = depth_[v] + 1;
        stack.push_back(*it);
      }
    }
  }
}

std::optional<uint32_t> JumpStructure::jump(uint32_t v, uint64_t d) const {
  if (d <= depth_[v]) {
    const auto& level = by_depth_[depth_[v] - d];
    auto it = std::upper_bound(level.begin(), level.end(), pre_[v],
                               [&](uint32_t p, uint32_t node) { return p < pre_[node]; });
    return *std::prev(it);
  }
  if (cycle_[v] < 0) return std::nullopt;
  const auto& cyc = cycles_[static_cast<size_t>(cycle_[v])];
  uint64_t steps = d - depth_[v];
  return cyc[(cycle_pos_[v] + steps % cyc.size()) % cyc.size()];
}

uint64_t JumpStructure::furthest(uint32_t v) const { return cycle_[v] >= 0 ? kInfiniteJump : depth_[v]; }

unsigned accel_window_bits(const AccelOptions& opt) {
  if (opt.table_n < 2) throw std::invalid_argument("table parameter must be at least 2");
  unsigned m = opt.window_bits != 0 ? opt.window_bits : ceil_lg(opt.table_n) / 4;
  return std::clamp(m, 2u, 16u);
}

namespace {

struct Window {
  uint8_t b = 0;
  bool valid = true;
  bool leading_run = false, trailing_run = false;
  std::vector<uint64_t> decoded;
};

Window parse_window(const ParseTable& pt, uint64_t w, unsigned m, uint64_t sigma) {
  BitStream bs;
  bs.append_bits(w, m);
  ParseInfo info = pt.parse(bs, 0, m);
  Window out;
  out.b = static_cast<uint8_t>(info.b);
  if (info.ntok > 0) {
    out.leading_run = !info.tok[0].literal;
    out.trailing_run = !info.tok[info.ntok - 1].literal;
  }
  out.decoded = info.decode();
  if (sigma != 0)
    for (uint64_t v : out.decoded)
      if (v >= sigma) out.valid = false;
  return out;
}

}  // namespace

Step AcceleratedTransducer::step(State s, uint64_t x) const {
  if (spec_.sigma != 0 && x >= spec_.sigma) throw InvalidInput("symbol outside the input alphabet");
  uint64_t col[1] = {x};
  return spec_.delta(s, std::span<const uint64_t>(col, 1));
}

AcceleratedTransducer::Entry AcceleratedTransducer::simulate(State s, const std::vector<uint64_t>& input,
                                                             BitStream& pool) const {
  Entry e;
  e.a = input.size();
  std::vector<uint64_t> out;
  out.reserve(input.size());
  try {
    for (uint64_t x : input) {
      Step st = step(s, x);
      if (st.next >= spec_.q) return e;
      if (st.out > kMaxLiteral) return e;
      s = st.next;
      out.push_back(st.out);
    }
  } catch (const std::exception&) {
    return e;
  }
  e.next = s;
  e.valid = true;
  uint64_t lead = 0;
  while (lead < out.size() && out[lead] == 0) ++lead;
  if (lead == out.size()) {
    e.z1 = e.z2 = lead;
    return e;
  }
  uint64_t trail = 0;
  while (out[out.size() - 1 - trail] == 0) ++trail;
  e.z1 = lead;
  e.z2 = trail;
  SparseEncoding mid = senc_encode(std::span<const uint64_t>(out).subspan(lead, out.size() - lead - trail));
  e.from = pool.size();
  pool.append_stream(mid.stream);
  e.to = pool.size();
  return e;
}

AcceleratedTransducer::AcceleratedTransducer(TransducerSpec spec, AccelOptions opt)
    : spec_(std::move(spec)), m_(accel_window_bits(opt)) {
  if (spec_.t != 1) throw std::invalid_argument("acceleration needs a single-stream transducer");
  if (spec_.q == 0 || spec_.s0 >= spec_.q) throw std::invalid_argument("bad state set");
  if (!spec_.delta) throw std::invalid_argument("missing transition function");
  fixed_ = uint64_t{1} << (m_ / 4);
  auto table = ParseTable::shared(uint64_t{1} << m_);
  const ParseTable& pt = *table;
  uint64_t windows = uint64_t{1} << m_;
  std::vector<Window> parsed;
  parsed.reserve(windows);
  for (uint64_t w = 0; w < windows; ++w) parsed.push_back(parse_window(pt, w, m_, spec_.sigma));
  window_.resize(spec_.q * windows);
  zeros_.resize(spec_.q * (fixed_ + 1));
  std::vector<int64_t> next(spec_.q, -1);
  for (State s = 0; s < spec_.q; ++s) {
    for (uint64_t w = 0; w < windows; ++w) {
      const Window& win = parsed[w];
      Entry& e = window_[(uint64_t{s} << m_) | w];
      if (win.b == 0 || !win.valid) continue;
      e = simulate(s, win.decoded, pool_);
      e.b = win.b;
      e.leading_run = win.leading_run;
      e.trailing_run = win.trailing_run;
    }
    for (uint64_t y = 1; y <= fixed_; ++y)
      zeros_[s * (fixed_ + 1) + y] = simulate(s, std::vector<uint64_t>(y, 0), pool_);
    try {
      Step st = step(s, 0);
      if (st.out == 0 && st.next < spec_.q) next[s] = st.next;
    } catch (const std::exception&) {
    }
  }
  jumps_ = JumpStructure(next);
}

SparseEncoding AcceleratedTransducer::run(const SparseEncoding& in, RunStats* stats) const {
  const BitStream& X = in.stream;
  uint64_t len = X.size();
  SencWriter w;
  State s = spec_.s0;
  uint64_t x = 0;
  uint64_t prev_b = 0;
  bool have_prev = false;
  bool trailing_run = false;
  RunStats local;
  auto emit = [&](const Entry& e) {
    if (e.z1 == e.a)
      w.append_zeros(e.a);
    else
      w.append_piece(e.z1, pool_, e.from, e.to, e.a - e.z1 - e.z2, e.z2);
  };
  while (x < len) {
    uint64_t rem = len - x;
    uint64_t win = X.read_bits(x, m_);
    if (rem < m_) win |= uint64_t{1} << rem;
    const Entry& e = window_[(uint64_t{s} << m_) | win];
    uint64_t consumed;
    if (e.b > 0 && e.valid && e.b <= rem) {
      if (trailing_run && e.leading_run) throw DecodeError("consecutive zero-run tokens", x);
      emit(e);
      s = e.next;
      consumed = e.b;
      trailing_run = e.trailing_run;
      ++local.table_steps;
    } else {
      Token tk = read_token(X, x);
      if (tk.literal) {
        Step st = step(s, tk.value);
        if (st.next >= spec_.q) throw std::logic_error("transition left the state set");
        w.append_value(st.out);
        s = st.next;
        trailing_run = false;
      } else {
        if (trailing_run) throw DecodeError("consecutive zero-run tokens", x);
        uint64_t y = tk.value;
        if (w.decoded_len() + y > in.decoded_len) throw DecodeError("encoding longer than declared", x);
        bool flexible = true;
        while (y > 0) {
          ++local.micro_steps;
          if (flexible) {
            uint64_t l = std::min(y, jumps_.furthest(s));
            if (l > 0) {
              s = *jumps_.jump(s, l);
              w.append_zeros(l);
              y -= l;
            }
          } else {
            uint64_t k = std::min(y, fixed_);
            const Entry& z = zeros_[s * (fixed_ + 1) + k];
            if (!z.valid) {
              step(s, 0);
              throw std::logic_error("transition on zero failed");
            }
            emit(z);
            s = z.next;
            y -= k;
          }
          flexible = !flexible;
        }
        trailing_run = true;
      }
      consumed = tk.bits;
    }
    ++local.macro_steps;
    if (have_prev && prev_b + consumed <= m_) ++local.short_pairs;
    have_prev = true;
    prev_b = consumed;
    x += consumed;
    if (w.decoded_len() > in.decoded_len) throw DecodeError("encoding longer than declared", x);
  }
  if (w.decoded_len() != in.decoded_len) throw DecodeError("encoding shorter than declared", x);
  if (stats) {
    stats->macro_steps += local.macro_steps;
    stats->table_steps += local.table_steps;
    stats->micro_steps += local.micro_steps;
    stats->short_pairs += local.short_pairs;
  }
  return w.finish();
}

std::shared_ptr<const AcceleratedTransducer> accelerate_single(TransducerSpec spec, AccelOptions opt) {
  return std::make_shared<const AcceleratedTransducer>(std::move(spec), opt);
}

SparseEncoding run_sparse(const AcceleratedTransducer& h, const SparseEncoding& in, RunStats* stats) {
  return h.run(in, stats);
}

uint64_t zip_symbol(std::span<const uint64_t> column) {
  bool any = false;
  for (uint64_t v : column) any |= v != 0;
  if (!any) return 0;
  uint64_t acc = 1;
  unsigned len = 0;
  auto push = [&](uint64_t bits, unsigned count) {
    len += count;
    if (len > 61) throw InvalidInput("zipped column too wide");
    acc = (acc << count) | bits;
  };
  auto token = [&](bool literal, uint64_t v) {
    push(literal ? 1 : 0, 1);
    push(v, 2 * floor_lg(v) + 1);
  };
  uint64_t zeros = 0;
  for (uint64_t v : column) {
    if (v == 0) {
      ++zeros;
      continue;
    }
    if (zeros) token(false, zeros);
    zeros = 0;
    token(true, v);
  }
  if (zeros) token(false, zeros);
  return acc;
}

std::vector<uint64_t> unzip_symbol(uint64_t x, unsigned t) {
  std::vector<uint64_t> out;
  if (x == 0) return std::vector<uint64_t>(t, 0);
  unsigned len = floor_lg(x);
  unsigned pos = 0;
  auto bit = [&](unsigned i) { return (x >> (len - 1 - i)) & 1u; };
  bool prev_zero = false;
  while (pos < len) {
    bool literal = bit(pos) != 0;
    unsigned z = 0;
    while (pos + 1 + z < len && bit(pos + 1 + z) == 0) ++z;
    if (pos + 1 + 2 * z + 1 > len) throw DecodeError("malformed zipped symbol", pos);
    uint64_t v = (x >> (len - (pos + 1 + 2 * z + 1))) & low_bits(z + 1);
    pos += 2 * z + 2;
    if (literal) {
      out.push_back(v);
    } else {
      if (prev_zero) throw DecodeError("malformed zipped symbol", pos);
      if (out.size() + v > t) throw DecodeError("zipped symbol wider than expected", pos);
      out.resize(out.size() + v, 0);
    }
    prev_zero = !literal;
    if (out.size() > t) throw DecodeError("zipped symbol wider than expected", pos);
  }
  if (out.size() != t) throw DecodeError("zipped symbol narrower than expected", pos);
  return out;
}

std::vector<uint64_t> zip_naive(const std::vector<std::vector<uint64_t>>& inputs) {
  std::vector<uint64_t> out;
  if (inputs.empty()) return out;
  uint64_t n = inputs[0].size();
  for (const auto& in : inputs)
    if (in.size() != n) throw std::invalid_argument("input streams differ in length");
  std::vector<uint64_t> col(inputs.size());
  out.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < inputs.size(); ++j) col[j] = inputs[j][i];
    out.push_back(zip_symbol(col));
  }
  return out;
}

namespace {

uint64_t combine(uint64_t left, uint64_t right, unsigned left_arity) {
  if (left_arity == 0) {
    uint64_t col[2] = {left, right};
    return zip_symbol(col);
  }
  std::vector<uint64_t> col = unzip_symbol(left, left_arity);
  col.push_back(right);
  return zip_symbol(col);
}

struct Prefix {
  uint8_t bits;
  uint64_t a;
  uint64_t trailing;  // trailing zeros of the decoded prefix
  bool all_zero;
};

std::vector<Prefix> window_prefixes(const ParseTable& pt, uint64_t w, unsigned m, std::vector<uint64_t>& decoded) {
  BitStream bs;
  bs.append_bits(w, m);
  ParseInfo info = pt.parse(bs, 0, m);
  decoded = info.decode();
  std::vector<Prefix> out;
  out.push_back({0, 0, 0, true});
  uint64_t a = 0, trailing = 0;
  bool all_zero = true;
  for (uint32_t i = 0; i < info.ntok; ++i) {
    const ParseToken& tk = info.tok[i];
    if (tk.literal) {
      ++a;
      trailing = 0;
      all_zero = false;
    } else {
      a += tk.value;
      trailing += tk.value;
    }
    out.push_back({static_cast<uint8_t>(tk.end), a, trailing, all_zero});
  }
  return out;
}

}  // namespace

struct ZipEngine::PairTable {
  struct Entry {
    uint32_t z1p = 0, z2p = 0;
    uint32_t ell = 0, r = 0;
    uint32_t from = 0, to = 0;
    uint8_t x = 0, y = 0;
    bool valid = false;
  };
  unsigned m = 0;
  uint64_t M = 0;
  std::vector<Entry> entries;
  BitStream pool;

  uint64_t index(uint64_t X, uint64_t Y, uint64_t zi) const { return ((X << m) | Y) * (2 * M + 1) + zi; }

  PairTable(unsigned bits, unsigned left_arity) : m(bits), M(uint64_t{1} << bits) {
    uint64_t windows = uint64_t{1} << m;
    auto table = ParseTable::shared(M);
    const ParseTable& pt = *table;
    std::vector<std::vector<Prefix>> pre(windows);
    std::vector<std::vector<uint64_t>> dec(windows);
    for (uint64_t w = 0; w < windows; ++w) pre[w] = window_prefixes(pt, w, m, dec[w]);
    entries.resize(windows * windows * (2 * M + 1));
    std::vector<uint64_t> xs, ys;
    for (uint64_t X = 0; X < windows; ++X) {
      for (uint64_t Y = 0; Y < windows; ++Y) {
        for (uint64_t zi = 0; zi <= 2 * M; ++zi) {
          uint64_t z1 = zi >= 1 && zi <= M ? zi : 0;
          uint64_t z2 = zi > M ? zi - M : 0;
          const Prefix* bx = nullptr;
          const Prefix* by = nullptr;
          for (const Prefix& px : pre[X]) {
            for (const Prefix& py : pre[Y]) {
              uint64_t lx = z1 + px.a, ly = z2 + py.a;
              uint64_t tx = px.all_zero ? lx : px.trailing;
              uint64_t ty = py.all_zero ? ly : py.trailing;
              if (lx < ly && ty < ly - lx) continue;
              if (lx > ly && tx < lx - ly) continue;
              if (!bx || px.bits + py.bits > bx->bits + by->bits ||
                  (px.bits + py.bits == bx->bits + by->bits && px.bits > bx->bits)) {
                bx = &px;
                by = &py;
              }
            }
          }
          Entry& e = entries[index(X, Y, zi)];
          e.x = bx->bits;
          e.y = by->bits;
          xs.assign(z1, 0);
          xs.insert(xs.end(), dec[X].begin(), dec[X].begin() + static_cast<int64_t>(bx->a));
          ys.assign(z2, 0);
          ys.insert(ys.end(), dec[Y].begin(), dec[Y].begin() + static_cast<int64_t>(by->a));
          uint64_t lo = std::min(xs.size(), ys.size());
          uint64_t ell = 0;
          while (ell < lo && xs[ell] == 0 && ys[ell] == 0) ++ell;
          uint64_t r = 0;
          for (uint64_t i = xs.size(); i-- > 0;)
            if (xs[i] != 0) {
              r = i + 1;
              break;
            }
          for (uint64_t i = ys.size(); i-- > r;)
            if (ys[i] != 0) {
              r = i + 1;
              break;
            }
          e.ell = static_cast<uint32_t>(ell);
          e.r = static_cast<uint32_t>(r);
          e.z1p = static_cast<uint32_t>(xs.size() - r);
          e.z2p = static_cast<uint32_t>(ys.size() - r);
          e.valid = true;
          if (r > 0) {
            SencWriter cw;
            try {
              for (uint64_t i = ell; i < r; ++i) cw.append_value(combine(xs[i], ys[i], left_arity));
            } catch (const std::exception&) {
              e.valid = false;
              continue;
            }
            SparseEncoding c = cw.finish();
            e.from = static_cast<uint32_t>(pool.size());
            pool.append_stream(c.stream);
            e.to = static_cast<uint32_t>(pool.size());
          }
        }
      }
    }
  }
};

ZipEngine::ZipEngine(AccelOptions opt) : opt_(opt), m_(std::min(accel_window_bits(opt), 6u)) {
  TransducerSpec relabel;
  relabel.q = 1;
  relabel.delta = [](State, std::span<const uint64_t> c) {
    return Step{0, c[0] == 0 ? 0 : zip_symbol(c.first(1))};
  };
  relabel_ = accelerate_single(std::move(relabel), opt);
}

ZipEngine::~ZipEngine() = default;

const ZipEngine::PairTable& ZipEngine::table(unsigned left_arity) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto& slot = tables_[left_arity];
  if (!slot) slot = std::make_unique<PairTable>(m_, left_arity);
  return *slot;
}

SparseEncoding ZipEngine::merge(const SparseEncoding& a, const SparseEncoding& b, unsigned left_arity) const {
  if (a.decoded_len != b.decoded_len) throw std::invalid_argument("zipped streams differ in length");
  const PairTable& tab = table(left_arity);
  const BitStream& B1 = a.stream;
  const BitStream& B2 = b.stream;
  uint64_t M = tab.M;
  uint64_t b1 = 0, b2 = 0, z1 = 0, z2 = 0;
  SencWriter w;
  auto window = [&](const BitStream& s, uint64_t off) {
    uint64_t v = s.read_bits(off, m_);
    if (off >= s.size()) return uint64_t{1};
    if (s.size() - off < m_) v |= uint64_t{1} << (s.size() - off);
    return v;
  };
  while (true) {
    uint64_t z = std::min(z1, z2);
    if (z) {
      z1 -= z;
      z2 -= z;
      w.append_zeros(z);
    }
    bool e1 = b1 >= B1.size(), e2 = b2 >= B2.size();
    if (e1 && e2) {
      if (z1 || z2) throw DecodeError("zipped streams differ in length", b1);
      break;
    }
    uint64_t zi = z1 > 0 ? std::min(z1, M) : z2 > 0 ? M + std::min(z2, M) : 0;
    const PairTable::Entry& en = tab.entries[tab.index(window(B1, b1), window(B2, b2), zi)];
    bool inside = b1 + en.x <= B1.size() && b2 + en.y <= B2.size();
    if (en.valid && inside && (en.x || en.y)) {
      b1 += en.x;
      b2 += en.y;
      uint64_t nz1 = en.z1p, nz2 = en.z2p;
      if (z1 > M) nz1 += z1 - M;
      if (z2 > M) nz2 += z2 - M;
      if (en.r > 0) w.append_piece(en.ell, tab.pool, en.from, en.to, en.r - en.ell, 0);
      z1 = nz1;
      z2 = nz2;
      continue;
    }
    if (!e1 && !B1.get(b1)) {
      Token tk = read_token(B1, b1);
      b1 += tk.bits;
      z1 += tk.value;
      continue;
    }
    if (!e2 && !B2.get(b2)) {
      Token tk = read_token(B2, b2);
      b2 += tk.bits;
      z2 += tk.value;
      continue;
    }
    uint64_t v1 = 0, v2 = 0;
    if (z1 == 0) {
      if (e1) throw DecodeError("zipped streams differ in length", b1);
      Token tk = read_token(B1, b1);
      v1 = tk.value;
      b1 += tk.bits;
    } else {
      --z1;
    }
    if (z2 == 0) {
      if (e2) throw DecodeError("zipped streams differ in length", b2);
      Token tk = read_token(B2, b2);
      v2 = tk.value;
      b2 += tk.bits;
    } else {
      --z2;
    }
    w.append_value(combine(v1, v2, left_arity));
  }
  if (w.decoded_len() != a.decoded_len) throw DecodeError("zipped streams differ from declared length", b1);
  return w.finish();
}

SparseEncoding ZipEngine::zip_pair(const SparseEncoding& a, const SparseEncoding& b) const { return merge(a, b, 0); }

SparseEncoding ZipEngine::zip_multi(std::span<const SparseEncoding> in) const {
  if (in.empty() || in.size() > 6) throw std::invalid_argument("zip supports 1 to 6 streams");
  for (const auto& e : in)
    if (e.decoded_len != in[0].decoded_len) throw std::invalid_argument("zipped streams differ in length");
  if (in.size() == 1) return relabel_->run(in[0]);
  SparseEncoding z = merge(in[0], in[1], 0);
  for (unsigned j = 2; j < in.size(); ++j) z = merge(z, in[j], j);
  return z;
}

std::vector<SparseEncoding> ZipEngine::unzip(const SparseEncoding& z, unsigned t) const {
  std::vector<SencWriter> ws(t);
  uint64_t pos = 0;
  while (pos < z.stream.size()) {
    Token tk = read_token(z.stream, pos);
    if (tk.literal) {
      std::vector<uint64_t> col = unzip_symbol(tk.value, t);
      for (unsigned j = 0; j < t; ++j) ws[j].append_value(col[j]);
    } else {
      for (auto& w : ws) w.append_zeros(tk.value);
    }
    pos += tk.bits;
  }
  std::vector<SparseEncoding> out;
  for (auto& w : ws) {
    if (w.decoded_len() != z.decoded_len) throw DecodeError("zipped stream differs from declared length", pos);
    out.push_back(w.finish());
  }
  return out;
}

TransducerSpec reduce_to_single(const TransducerSpec& spec) {
  TransducerSpec r;
  r.q = spec.q;
  r.s0 = spec.s0;
  r.t = 1;
  unsigned t = spec.t;
  uint64_t sigma = spec.sigma;
  TransitionFn inner = spec.delta;
  r.delta = [t, sigma, inner](State s, std::span<const uint64_t> c) {
    std::vector<uint64_t> col = unzip_symbol(c[0], t);
    if (sigma != 0)
      for (uint64_t v : col)
        if (v >= sigma) throw InvalidInput("symbol outside the input alphabet");
    return inner(s, col);
  };
  return r;
}

SparseEncoding run_multi(const TransducerSpec& spec, std::span<const SparseEncoding> in, AccelOptions opt) {
  AccelCache cache(opt);
  return cache.run_multi("", spec, in);
}

AccelCache::AccelCache(AccelOptions opt) : opt_(opt), zip_(opt) {}

std::shared_ptr<const AcceleratedTransducer> AccelCache::get(const std::string& key, const TransducerSpec& spec) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto h = accelerate_single(spec.t == 1 ? spec : reduce_to_single(spec), opt_);
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(key, h).first->second;
}

SparseEncoding AccelCache::run_multi(const std::string& key, const TransducerSpec& spec,
                                     std::span<const SparseEncoding> in) {
  if (in.size() != spec.t) throw std::invalid_argument("input arity differs from the transducer");
  auto h = get(key, spec);
  if (spec.t == 1) return h->run(in[0]);
  return h->run(zip_.zip_multi(in));
}

size_t AccelCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.size();
}

}  // namespace ssync
