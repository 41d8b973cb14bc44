#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssync/sparsecodec.hpp"

namespace ssync {

using State = uint32_t;

struct Step {
  State next;
  uint64_t out;
};
using TransitionFn = std::function<Step(State, std::span<const uint64_t>)>;

struct TransducerSpec {
  uint32_t q = 1;
  State s0 = 0;
  unsigned t = 1;
  uint64_t sigma = 0;  // input alphabet size, 0 when unbounded
  TransitionFn delta;
};

struct NaiveRun {
  std::vector<uint64_t> output;
  State final_state = 0;
};

NaiveRun run_naive(const TransducerSpec& spec, const std::vector<std::vector<uint64_t>>& inputs);

inline constexpr uint64_t kInfiniteJump = UINT64_MAX;

// Jump and furthest-jump queries on a graph with out-degree at most one.
class JumpStructure {
 public:
  JumpStructure() = default;
  // next[v] is the successor of v, or -1 when v has no outgoing edge.
  explicit JumpStructure(const std::vector<int64_t>& next);

  uint32_t size() const noexcept { return static_cast<uint32_t>(depth_.size()); }
  std::optional<uint32_t> jump(uint32_t v, uint64_t d) const;
  uint64_t furthest(uint32_t v) const;

 private:
  std::vector<uint32_t> depth_;     // distance to the root of v's tree
  std::vector<uint32_t> pre_;       // preorder index in the reversed forest
  std::vector<int32_t> cycle_;      // cycle id of the tree root, -1 if none
  std::vector<uint32_t> cycle_pos_; // position of the root on its cycle
  std::vector<uint32_t> root_;
  std::vector<std::vector<uint32_t>> cycles_;
  std::vector<std::vector<uint32_t>> by_depth_;  // nodes per depth, by preorder
};

struct AccelOptions {
  uint64_t table_n = kDefaultTableN;
  unsigned window_bits = 0;  // lg M; 0 picks floor(lg N / 4)
};

unsigned accel_window_bits(const AccelOptions& opt);

struct RunStats {
  uint64_t macro_steps = 0;
  uint64_t table_steps = 0;
  uint64_t micro_steps = 0;
  // Consecutive macro-steps that together consumed at most lg M input bits.
  uint64_t short_pairs = 0;
};

// A single-stream transducer with its lookup tables.
class AcceleratedTransducer {
 public:
  explicit AcceleratedTransducer(TransducerSpec spec, AccelOptions opt = {});

  SparseEncoding run(const SparseEncoding& in, RunStats* stats = nullptr) const;

  const TransducerSpec& spec() const noexcept { return spec_; }
  unsigned window_bits() const noexcept { return m_; }
  uint64_t fixed_step() const noexcept { return fixed_; }
  const JumpStructure& jumps() const noexcept { return jumps_; }

 private:
  struct Entry {
    uint64_t a = 0;
    uint64_t z1 = 0, z2 = 0;
    uint64_t from = 0, to = 0;  // middle part in pool_
    State next = 0;
    uint8_t b = 0;
    bool valid = false;
    bool leading_run = false, trailing_run = false;
  };
  Entry simulate(State s, const std::vector<uint64_t>& input, BitStream& pool) const;
  Step step(State s, uint64_t x) const;

  TransducerSpec spec_;
  unsigned m_;
  uint64_t fixed_;
  std::vector<Entry> window_;  // [state << m | window]
  std::vector<Entry> zeros_;   // [state * (fixed + 1) + y]
  BitStream pool_;
  JumpStructure jumps_;
};

std::shared_ptr<const AcceleratedTransducer> accelerate_single(TransducerSpec spec, AccelOptions opt = {});
SparseEncoding run_sparse(const AcceleratedTransducer& h, const SparseEncoding& in, RunStats* stats = nullptr);

// Zipped symbols: 0 for an all-zero column, otherwise the integer whose binary
// form is a 1 followed by senc(column) in stream order.
uint64_t zip_symbol(std::span<const uint64_t> column);
std::vector<uint64_t> unzip_symbol(uint64_t x, unsigned t);
std::vector<uint64_t> zip_naive(const std::vector<std::vector<uint64_t>>& inputs);

class ZipEngine {
 public:
  explicit ZipEngine(AccelOptions opt = {});
  ~ZipEngine();

  SparseEncoding zip_pair(const SparseEncoding& a, const SparseEncoding& b) const;
  SparseEncoding zip_multi(std::span<const SparseEncoding> in) const;
  std::vector<SparseEncoding> unzip(const SparseEncoding& z, unsigned t) const;
  unsigned window_bits() const noexcept { return m_; }

 private:
  struct PairTable;
  const PairTable& table(unsigned left_arity) const;
  // Merges a stream of left_arity-column zip symbols (raw symbols when 0) with
  // a raw stream.
  SparseEncoding merge(const SparseEncoding& a, const SparseEncoding& b, unsigned left_arity) const;

  AccelOptions opt_;
  unsigned m_;
  std::shared_ptr<const AcceleratedTransducer> relabel_;
  mutable std::mutex mu_;
  mutable std::map<unsigned, std::unique_ptr<PairTable>> tables_;
};

// Single-stream transducer that reads zipped columns and simulates spec.
TransducerSpec reduce_to_single(const TransducerSpec& spec);

SparseEncoding run_multi(const TransducerSpec& spec, std::span<const SparseEncoding> in, AccelOptions opt = {});

// Acceleration tables built once per caller-supplied key.
class AccelCache {
 public:
  explicit AccelCache(AccelOptions opt = {});

  std::shared_ptr<const AcceleratedTransducer> get(const std::string& key, const TransducerSpec& spec);
  SparseEncoding run_multi(const std::string& key, const TransducerSpec& spec,
                           std::span<const SparseEncoding> in);
  const ZipEngine& zipper() const noexcept { return zip_; }
  size_t size() const;

 private:
  AccelOptions opt_;
  ZipEngine zip_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const AcceleratedTransducer>> cache_;
};

}  // namespace ssync
