#include "ed4/shuffle.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <string>

#include "ed4/error.hpp"

namespace ed4 {

GridPermutation::GridPermutation(int granularity, std::vector<int> mapping)
    : granularity_(granularity), mapping_(std::move(mapping)) {
  if (granularity < 1) {
    throw DomainError("granularity must be >= 1, got " + std::to_string(granularity));
  }
  const std::size_t n = static_cast<std::size_t>(granularity) * granularity;
  if (mapping_.size() != n) {
    throw DomainError("permutation for g=" + std::to_string(granularity) + " needs " +
                      std::to_string(n) + " entries, got " + std::to_string(mapping_.size()));
  }
  std::vector<char> seen(n, 0);
  for (int d : mapping_) {
    if (d < 0 || static_cast<std::size_t>(d) >= n || seen[static_cast<std::size_t>(d)]) {
      throw DomainError("mapping is not a bijection on the patch indices");
    }
    seen[static_cast<std::size_t>(d)] = 1;
  }
}

GridPermutation GridPermutation::identity(int granularity) {
  if (granularity < 1) {
    throw DomainError("granularity must be >= 1, got " + std::to_string(granularity));
  }
  std::vector<int> mapping(static_cast<std::size_t>(granularity) * granularity);
  std::iota(mapping.begin(), mapping.end(), 0);
  return GridPermutation(granularity, std::move(mapping));
}

bool GridPermutation::is_identity() const noexcept {
  for (std::size_t i = 0; i < mapping_.size(); ++i) {
    if (mapping_[i] != static_cast<int>(i)) return false;
  }
  return true;
}

void check_divisible(const Image& image, int granularity) {
  if (granularity < 1) {
    throw DomainError("granularity must be >= 1, got " + std::to_string(granularity));
  }
  if (image.height() % granularity != 0 || image.width() % granularity != 0) {
    throw DomainError("image " + std::to_string(image.height()) + "x" +
                      std::to_string(image.width()) + " is not divisible by granularity " +
                      std::to_string(granularity));
  }
}

std::vector<Image> partition(const Image& image, int granularity) {
  check_divisible(image, granularity);
  const int ph = image.height() / granularity;
  const int pw = image.width() / granularity;
  const std::size_t row_bytes = static_cast<std::size_t>(pw) * Image::kChannels;
  std::vector<Image> patches;
  patches.reserve(static_cast<std::size_t>(granularity) * granularity);
  for (int gr = 0; gr < granularity; ++gr) {
    for (int gc = 0; gc < granularity; ++gc) {
      Image patch(ph, pw);
      for (int r = 0; r < ph; ++r) {
        std::memcpy(patch.pixel(r, 0), image.pixel(gr * ph + r, gc * pw), row_bytes);
      }
      patches.push_back(std::move(patch));
    }
  }
  return patches;
}

Image apply_permutation(const Image& image, const GridPermutation& perm) {
  const int g = perm.granularity();
  check_divisible(image, g);
  const int ph = image.height() / g;
  const int pw = image.width() / g;
  const std::size_t row_bytes = static_cast<std::size_t>(pw) * Image::kChannels;
  Image out(image.height(), image.width());
  for (int src = 0; src < perm.size(); ++src) {
    const int dst = perm[src];
    const int sr = (src / g) * ph, sc = (src % g) * pw;
    const int dr = (dst / g) * ph, dc = (dst % g) * pw;
    for (int r = 0; r < ph; ++r) {
      std::memcpy(out.pixel(dr + r, dc), image.pixel(sr + r, sc), row_bytes);
    }
  }
  return out;
}

GridPermutation invert(const GridPermutation& perm) {
  std::vector<int> inverse(perm.mapping().size());
  for (int i = 0; i < perm.size(); ++i) inverse[static_cast<std::size_t>(perm[i])] = i;
  return GridPermutation(perm.granularity(), std::move(inverse));
}

GridPermutation random_permutation(RandomStream& rng, int granularity) {
  std::vector<int> mapping = GridPermutation::identity(granularity).mapping();
  for (std::size_t i = mapping.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(mapping[i], mapping[j]);
  }
  return GridPermutation(granularity, std::move(mapping));
}

ShuffleResult random_shuffle(RandomStream& rng, const Image& image,
                             std::span<const int> granularities) {
  if (granularities.empty()) throw DomainError("granularity set is empty");
  for (int g : granularities) check_divisible(image, g);
  const int g = granularities[static_cast<std::size_t>(rng.below(granularities.size()))];
  GridPermutation perm = random_permutation(rng, g);
  return ShuffleResult{apply_permutation(image, perm), std::move(perm)};
}

}  // namespace ed4
