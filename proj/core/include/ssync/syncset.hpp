#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ssync/bitstream.hpp"
#include "ssync/recompress.hpp"
#include "ssync/runs.hpp"
#include "ssync/text.hpp"

namespace ssync {

// max{ j : j = 0 or 16 lambda_{j-1} <= tau }.
unsigned k_of_tau(uint64_t tau);

struct SyncOptions {
  RecompressOptions recompress{};
  // The bitmask path combines masks when 2 tau * bits_per_symbol <= lg(table_n)
  // and scatters the explicit set otherwise. -1 = automatic, 0 = always
  // scatter, 1 = always combine.
  int combine_masks = -1;
};

// Preprocessed text answering tau-synchronizing set queries.
class SyncBuilder {
 public:
  explicit SyncBuilder(const PackedText& t, SyncOptions opt = {});

  const PackedText& text() const noexcept { return rec_.text(); }
  const Recompressor& recompressor() const noexcept { return rec_; }
  const SyncOptions& options() const noexcept { return opt_; }
  // k(tau) via the precomputed interval table.
  unsigned level_for(uint64_t tau) const;

  // Sorted positions.
  std::vector<uint64_t> explicit_set(uint64_t tau) const;
  // n-bit mask.
  BitStream bitmask(uint64_t tau) const;
  bool combines_masks(uint64_t tau) const;

 private:
  void check_tau(uint64_t tau) const;

  SyncOptions opt_;
  Recompressor rec_;
  std::unique_ptr<PackedLce> lce_;
  // interval_start_[k] = smallest tau with k(tau) = k.
  std::vector<uint64_t> interval_start_;
};

std::vector<uint64_t> build_sync_explicit(const PackedText& t, uint64_t tau, SyncOptions opt = {});
BitStream build_sync_bitmask(const PackedText& t, uint64_t tau, SyncOptions opt = {});

}  // namespace ssync
