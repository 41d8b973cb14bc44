#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "ssync/ranksupport.hpp"
#include "ssync/recompress.hpp"
#include "ssync/sparsecodec.hpp"
#include "ssync/syncset.hpp"
#include "ssync/transducer.hpp"

namespace ssync {

struct FastPathOptions {
  SyncOptions sync{};
  AccelOptions accel{};
  // Largest tau answered through transducers; 0 picks floor(sqrt(n) / lg n).
  uint64_t transducer_tau_limit = 0;
  // Period bound P of the short-period run tables; -1 picks floor(log_sigma(n) / 36).
  int small_period_limit = -1;
};

// Largest period bound accepted for the short-period tables.
inline constexpr unsigned kMaxSmallPeriod = 6;

// V[ell..n) . 0^ell, computed by a three-stream transducer.
SparseEncoding shift_truncate(const SparseEncoding& v, uint64_t ell, AccelCache& cache);
SparseEncoding shift_truncate(const SparseEncoding& v, uint64_t ell);

// senc of the level-0 array: entry i is one more than the highest level whose
// boundary set holds i, or 0.
SparseEncoding build_level0(const Recompressor& rec, AccelCache& cache);
// Repeated decrement until the all-zero level; result[0] is level0 itself.
std::vector<SparseEncoding> derive_levels(const SparseEncoding& level0, AccelCache& cache);

bool senc_all_zero(const SparseEncoding& e);

struct RunMarkers {
  SparseEncoding starts;  // first position of each run
  SparseEncoding ends;    // last position of each run
};

// Sparse synchronizing set with rank and select.
class SyncSetHandle {
 public:
  SyncSetHandle(SparseEncoding mask, uint64_t table_n, uint64_t m);

  const SparseEncoding& encoding() const noexcept { return enc_; }
  uint64_t n() const noexcept { return enc_.decoded_len; }
  uint64_t size() const noexcept { return support_.ones(); }
  uint64_t rank(uint64_t j) const { return support_.rank(j); }
  uint64_t select(uint64_t j) const { return support_.select(j); }
  std::optional<uint64_t> pred(uint64_t j) const { return support_.pred(j); }
  uint64_t space() const noexcept { return m_; }

 private:
  SparseEncoding enc_;
  SparseMaskSupport support_;
  uint64_t m_;
};

// Preprocessed text answering synchronizing set queries in sparse form.
class FastSync {
 public:
  explicit FastSync(const PackedText& t, FastPathOptions opt = {});
  ~FastSync();
  FastSync(const FastSync&) = delete;
  FastSync& operator=(const FastSync&) = delete;

  const SyncBuilder& builder() const noexcept { return *builder_; }
  const PackedText& text() const noexcept { return builder_->text(); }
  uint64_t n() const noexcept { return text().n(); }
  // Level arrays 0..q; the last one is all-zero.
  const std::vector<SparseEncoding>& levels() const noexcept { return levels_; }
  const SparseEncoding& level(unsigned j) const;
  uint64_t small_period_limit() const noexcept { return period_limit_; }
  uint64_t transducer_tau_limit() const noexcept { return tau_limit_; }
  bool uses_transducer(uint64_t tau) const { return tau <= tau_limit_; }

  // Starts and ends of RUNS_{ell, floor(tau/3)}, ell in {tau, 2 tau}.
  RunMarkers run_markers(uint64_t tau, uint64_t ell) const;
  SparseEncoding sync_sparse(uint64_t tau) const;
  SyncSetHandle sync_with_support(uint64_t tau) const;

  AccelCache& cache() const noexcept { return *cache_; }

 private:
  struct LongRuns;
  struct ShortRuns;
  void check_tau(uint64_t tau) const;
  SparseEncoding marker_long(uint64_t tau, uint64_t ell, bool ends) const;
  SparseEncoding marker_short(uint64_t tau, uint64_t ell, bool ends) const;

  FastPathOptions opt_;
  std::unique_ptr<SyncBuilder> builder_;
  std::unique_ptr<AccelCache> cache_;
  std::vector<SparseEncoding> levels_;
  uint64_t period_limit_ = 0;
  uint64_t tau_limit_ = 0;
  std::unique_ptr<LongRuns> long_;
  std::unique_ptr<ShortRuns> short_;
};

SparseEncoding sync_sparse(const PackedText& t, uint64_t tau, FastPathOptions opt = {});

}  // namespace ssync
