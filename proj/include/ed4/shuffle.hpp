#pragma once

#include <span>
#include <vector>

#include "ed4/image.hpp"
#include "ed4/random.hpp"

namespace ed4 {

// Bijection on the g*g patches of a grid. mapping()[i] is the destination
// slot (row-major) of the patch found at slot i.
class GridPermutation {
 public:
  GridPermutation() : GridPermutation(identity(1)) {}
  // Throws DomainError unless mapping is a bijection on {0, ..., g*g - 1}.
  GridPermutation(int granularity, std::vector<int> mapping);

  static GridPermutation identity(int granularity);

  int granularity() const noexcept { return granularity_; }
  int size() const noexcept { return static_cast<int>(mapping_.size()); }
  const std::vector<int>& mapping() const noexcept { return mapping_; }
  int operator[](int i) const { return mapping_.at(static_cast<std::size_t>(i)); }
  bool is_identity() const noexcept;

  friend bool operator==(const GridPermutation&, const GridPermutation&) = default;

 private:
  int granularity_;
  std::vector<int> mapping_;
};

// Throws DomainError unless g >= 1 divides both image dimensions.
void check_divisible(const Image& image, int granularity);

// Row-major list of g*g equal tiles.
std::vector<Image> partition(const Image& image, int granularity);

Image apply_permutation(const Image& image, const GridPermutation& perm);

GridPermutation invert(const GridPermutation& perm);

// Fisher-Yates over g*g slots, drawn from `rng`.
GridPermutation random_permutation(RandomStream& rng, int granularity);

struct ShuffleResult {
  Image image;
  GridPermutation permutation;
};

// Draws g uniformly from `granularities`, then a uniform permutation, and
// applies it.
ShuffleResult random_shuffle(RandomStream& rng, const Image& image,
                             std::span<const int> granularities);

}  // namespace ed4
