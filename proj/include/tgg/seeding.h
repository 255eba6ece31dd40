// Reproducible seeds, permutations and content hashes.
//
// std::shuffle and the std distributions are implementation-defined, so
// permutations are drawn with an explicit Fisher-Yates over mt19937_64,
// whose output sequence is fixed by the standard.

#ifndef TGG_SEEDING_H_
#define TGG_SEEDING_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace tgg {

std::uint64_t Fnv1a64(std::string_view data);
std::uint64_t SplitMix64(std::uint64_t x);

// Seed for one purpose of one scenario. Depends only on its arguments, so
// results do not depend on scheduling order.
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view scenario_id,
                         std::string_view purpose, std::uint64_t index = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, bound). bound must be positive.
  std::uint64_t Below(std::uint64_t bound);
  double Uniform01();

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[Below(i)]);
    }
  }

  std::vector<std::size_t> Permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

std::string Sha256Hex(std::string_view data);

}  // namespace tgg

#endif  // TGG_SEEDING_H_
