#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ssync::corpus {

struct CorpusText {
  std::string kind;
  uint64_t sigma;
  std::vector<uint32_t> text;
  // Planted offsets for the adversarial family (empty otherwise).
  uint64_t tau = 0;
  std::vector<uint64_t> planted;
};

inline std::vector<uint32_t> random_text(std::mt19937_64& rng, uint64_t n, uint64_t sigma) {
  std::vector<uint32_t> t(n);
  std::uniform_int_distribution<uint64_t> d(0, sigma - 1);
  for (auto& c : t) c = static_cast<uint32_t>(d(rng));
  return t;
}

// Repetitions of short random roots with sparse point mutations.
inline std::vector<uint32_t> periodic_text(std::mt19937_64& rng, uint64_t n, uint64_t sigma) {
  std::vector<uint32_t> t;
  std::uniform_int_distribution<uint64_t> sym(0, sigma - 1);
  while (t.size() < n) {
    uint64_t p = 1 + rng() % 6;
    uint64_t reps = 2 + rng() % 24;
    std::vector<uint32_t> root(p);
    for (auto& c : root) c = static_cast<uint32_t>(sym(rng));
    for (uint64_t r = 0; r < reps * p && t.size() < n; ++r) t.push_back(root[r % p]);
    if (rng() % 3 == 0 && t.size() < n) t.push_back(static_cast<uint32_t>(sym(rng)));
  }
  return t;
}

// Blocks 0^(2tau+s-1) 1 0^(tau-s) with s drawn from [0..tau), then a zero suffix.
inline CorpusText adversarial_text(std::mt19937_64& rng, uint64_t n, uint64_t tau) {
  CorpusText c;
  c.kind = "adversarial";
  c.sigma = 2;
  c.tau = tau;
  uint64_t blocks = n / (3 * tau);
  for (uint64_t i = 0; i < blocks; ++i) {
    uint64_t s = rng() % tau;
    c.planted.push_back(s);
    c.text.insert(c.text.end(), 2 * tau + s - 1, 0u);
    c.text.push_back(1u);
    c.text.insert(c.text.end(), tau - s, 0u);
  }
  c.text.resize(n, 0u);
  return c;
}

// Mixed corpus: random, periodic and adversarial texts, n in [1..max_n].
inline std::vector<CorpusText> make_corpus(uint64_t seed, size_t count, uint64_t max_n) {
  std::mt19937_64 rng(seed);
  const uint64_t sigmas[] = {2, 4, 16, 256};
  std::vector<CorpusText> out;
  for (size_t k = 0; k < count; ++k) {
    uint64_t n = 1 + rng() % max_n;
    if (k % 10 == 0) n = 1 + rng() % 24;
    uint64_t sigma = sigmas[rng() % 4];
    switch (k % 5) {
      case 0:
      case 1:
        out.push_back({"random", sigma, random_text(rng, n, sigma)});
        break;
      case 2:
      case 3:
        out.push_back({"periodic", sigma, periodic_text(rng, n, sigma)});
        break;
      default: {
        uint64_t tau = 1 + rng() % 16;
        if (n < 3 * tau) n = 3 * tau + rng() % 64;
        out.push_back(adversarial_text(rng, n, tau));
      }
    }
  }
  return out;
}

}  // namespace ssync::corpus
