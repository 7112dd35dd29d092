#include "relbelief/random.hpp"

#include <cmath>
#include <exception>
#include <thread>

#include "relbelief/errors.hpp"

namespace relbelief {

namespace {

constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;
constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t key, std::uint64_t stream) noexcept {
  key_ = {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
  counter_ = {0, 0, static_cast<std::uint32_t>(stream),
              static_cast<std::uint32_t>(stream >> 32)};
}

void Philox4x32::refill() noexcept {
  std::array<std::uint32_t, 4> ctr = counter_;
  std::array<std::uint32_t, 2> key = key_;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMulA, ctr[0], lo0, hi0);
    mulhilo(kMulB, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  block_ = ctr;
  // 64-bit block counter in the low words; the high words hold the stream id.
  if (++counter_[0] == 0) ++counter_[1];
  next_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() noexcept {
  if (next_ == 4) refill();
  return block_[next_++];
}

double Philox4x32::uniform() noexcept {
  const std::uint64_t hi = (*this)() >> 5;   // 27 bits
  const std::uint64_t lo = (*this)() >> 6;   // 26 bits
  const double u = (static_cast<double>(hi) * 67108864.0 + static_cast<double>(lo)) *
                   (1.0 / 9007199254740992.0);
  return u == 0.0 ? 0x1.0p-54 : u;
}

Philox4x32 substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t replication) noexcept {
  return Philox4x32(splitmix64(seed ^ splitmix64(tag)), replication);
}

std::uint64_t stream_tag(std::string_view name) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void McConfig::validate() const {
  if (n_sim < 1) throw DomainError("n_sim must be at least 1");
  if (threads < 1) throw DomainError("threads must be at least 1");
  if (n_outer < 1) throw DomainError("n_outer must be at least 1");
}

double McEstimate::p() const noexcept {
  return trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials);
}

double McEstimate::se() const noexcept {
  if (trials == 0) return 0.0;
  const double q = p();
  return std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
}

void parallel_for_index(std::uint64_t n, unsigned threads,
                        const std::function<void(std::uint64_t)>& body) {
  if (n == 0) return;
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(threads, 1u), n));
  if (workers == 1) {
    for (std::uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::uint64_t begin = n * w / workers;
        const std::uint64_t end = n * (w + 1) / workers;
        try {
          for (std::uint64_t i = begin; i < end; ++i) body(i);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
}

}  // namespace relbelief
