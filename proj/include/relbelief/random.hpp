#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <string_view>
#include <vector>

namespace relbelief {

// Philox4x32-10 counter-based generator (Salmon et al. 2011). Every
// (key, stream) pair names an independent substream, so replication i of a
// Monte Carlo run draws the same numbers no matter which thread runs it.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  Philox4x32(std::uint64_t key, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on (0, 1) with 53 random bits.
  double uniform() noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> block_{};
  unsigned next_ = 4;
};

/// Substream for replication `replication` of the quantity tagged `tag`
/// under master seed `seed`.
Philox4x32 substream(std::uint64_t seed, std::uint64_t tag,
                     std::uint64_t replication) noexcept;

/// Stable 64-bit tag from a name, for keying substreams per quantity.
std::uint64_t stream_tag(std::string_view name) noexcept;

struct McConfig {
  std::uint64_t n_sim = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // outer prior draws for nested estimates (estimation bias in favor)
  std::uint64_t n_outer = 400;

  void validate() const;
};

/// Binomial-count estimate of a probability.
struct McEstimate {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;

  double p() const noexcept;
  /// sqrt(p(1-p)/n)
  double se() const noexcept;
};

/// Calls body(i) for i in [0, n), split into contiguous blocks over
/// `threads` workers. The body must only write to slot i of preallocated
/// storage. An exception thrown by any call is rethrown after all
/// workers finish.
void parallel_for_index(std::uint64_t n, unsigned threads,
                        const std::function<void(std::uint64_t)>& body);

/// Counts successful trials; trial(rng) receives the substream for its
/// replication index. Per-thread integer counts are summed, so the result
/// does not depend on the thread count.
template <class Trial>
McEstimate count_hits(const McConfig& mc, std::uint64_t tag, Trial&& trial) {
  mc.validate();
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(mc.threads, mc.n_sim));
  std::vector<std::uint64_t> counts(workers, 0);
  parallel_for_index(workers, workers, [&](std::uint64_t w) {
    const std::uint64_t begin = mc.n_sim * w / workers;
    const std::uint64_t end = mc.n_sim * (w + 1) / workers;
    std::uint64_t local = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      Philox4x32 rng = substream(mc.seed, tag, i);
      if (trial(rng)) ++local;
    }
    counts[w] = local;
  });
  McEstimate est;
  est.trials = mc.n_sim;
  for (auto c : counts) est.hits += c;
  return est;
}

}  // namespace relbelief
