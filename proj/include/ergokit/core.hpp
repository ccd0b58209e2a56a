#pragma once

// Shared infrastructure: error types, seeded random substreams, and a
// small parallel map used by the experiment harness.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace ergokit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WindowTooShortError : Error { using Error::Error; };
struct NotPeriodicError : Error { using Error::Error; };
struct NotAShiftError : Error { using Error::Error; };
struct NotInvertibleError : Error { using Error::Error; };
struct SizeCapExceededError : Error { using Error::Error; };
struct DepthCapExceededError : Error { using Error::Error; };
struct CoverSearchBudgetExceededError : Error { using Error::Error; };
struct InsufficientDataError : Error { using Error::Error; };
struct NoExpandingConstantError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Random substreams.
//
// All randomness flows from a single (seed, stream-name) pair. Distribution
// helpers are hand-rolled on top of the raw engine output so that sampled
// values are identical across standard libraries.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t x;
    do {
      x = bits();
    } while (x > limit);
    return x % n;
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

 private:
  std::mt19937_64 eng_;
};

inline Rng substream(std::uint64_t seed, std::string_view name) {
  return Rng(splitmix64(seed) ^ fnv1a64(name));
}

// ---------------------------------------------------------------------------
// Worker pool. ERGOKIT_THREADS caps the number of workers.

inline unsigned worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("ERGOKIT_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  return hw;
}

// Applies fn(i) for i in [0, n). Work items must be independent; results are
// written by index so assembly order does not matter.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// Sorted-element quantile: returns an element of v (no interpolation), so
// exact values such as 0 survive untouched.
inline double quantile_element(std::vector<double> v, double q) {
  if (v.empty()) throw InsufficientDataError("quantile of empty sample");
  std::sort(v.begin(), v.end());
  if (q <= 0) return v.front();
  if (q >= 1) return v.back();
  const auto idx = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1) + 0.5);
  return v[std::min(idx, v.size() - 1)];
}

// Mean after discarding floor(trim * n) entries from each end. A sample of
// identical values returns that value up to summation rounding; all-zero
// samples return exactly 0.
inline double trimmed_mean(std::vector<double> v, double trim) {
  if (v.empty()) throw InsufficientDataError("trimmed mean of empty sample");
  std::sort(v.begin(), v.end());
  const auto cut = static_cast<std::size_t>(trim * static_cast<double>(v.size()));
  if (2 * cut >= v.size()) return quantile_element(std::move(v), 0.5);
  double s = 0.0;
  for (std::size_t i = cut; i < v.size() - cut; ++i) s += v[i];
  return s / static_cast<double>(v.size() - 2 * cut);
}

}  // namespace ergokit
