#include "ed4/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "ed4/error.hpp"

namespace ed4 {

FaceCenter grid_center(ImageGrid grid) {
  validate_grid(grid);
  return FaceCenter{grid.width / 2, grid.height / 2};
}

void validate_grid(ImageGrid grid) {
  if (grid.height < 1 || grid.width < 1) {
    throw DomainError("grid must be at least 1x1, got " + std::to_string(grid.height) + "x" +
                      std::to_string(grid.width));
  }
}

void validate_center(ImageGrid grid, FaceCenter center) {
  validate_grid(grid);
  if (center.delta_x < 0 || center.delta_x >= grid.width || center.delta_y < 0 ||
      center.delta_y >= grid.height) {
    throw DomainError("face center (" + std::to_string(center.delta_x) + ", " +
                      std::to_string(center.delta_y) + ") lies outside the " +
                      std::to_string(grid.height) + "x" + std::to_string(grid.width) + " grid");
  }
}

double wrap_degrees(double degrees) {
  double r = std::fmod(degrees, 360.0);
  if (r < 0.0) r += 360.0;
  // fmod is exact but the +360 above can round up to 360 for tiny negatives.
  if (r >= 360.0) r = 0.0;
  return r + 0.0;  // folds -0.0 into +0.0
}

AngleMatrix::AngleMatrix(ImageGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  validate_grid(grid);
  if (values_.size() != static_cast<std::size_t>(grid.height) * grid.width) {
    throw DomainError("angle matrix size does not match its grid");
  }
}

SectorMask::SectorMask(ImageGrid grid, double sweep, std::vector<std::uint8_t> bits)
    : grid_(grid), sweep_(sweep), bits_(std::move(bits)) {
  validate_grid(grid);
  if (bits_.size() != static_cast<std::size_t>(grid.height) * grid.width) {
    throw DomainError("sector mask size does not match its grid");
  }
}

std::size_t SectorMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

double SectorMask::fraction() const noexcept {
  return static_cast<double>(count()) / static_cast<double>(bits_.size());
}

SectorMask SectorMask::complement() const {
  std::vector<std::uint8_t> flipped(bits_.size());
  std::transform(bits_.begin(), bits_.end(), flipped.begin(),
                 [](std::uint8_t b) { return static_cast<std::uint8_t>(b ^ 1U); });
  return SectorMask(grid_, sweep_, std::move(flipped));
}

AngleMatrix compute_angle_matrix(ImageGrid grid, FaceCenter center) {
  validate_center(grid, center);
  constexpr double kDegreesPerRadian = 180.0 / std::numbers::pi;
  std::vector<double> values(static_cast<std::size_t>(grid.height) * grid.width);
  std::size_t k = 0;
  for (int i = 0; i < grid.height; ++i) {
    const double dy = static_cast<double>(center.delta_y - i);
    for (int j = 0; j < grid.width; ++j, ++k) {
      const double dx = static_cast<double>(j - center.delta_x);
      values[k] = (dx == 0.0 && dy == 0.0) ? 0.0
                                           : wrap_degrees(kDegreesPerRadian * std::atan2(dy, dx));
    }
  }
  return AngleMatrix(grid, std::move(values));
}

std::shared_ptr<const AngleMatrix> cached_angle_matrix(ImageGrid grid, FaceCenter center) {
  using Key = std::tuple<int, int, int, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const AngleMatrix>> cache;
  constexpr std::size_t kMaxEntries = 64;

  const Key key{grid.height, grid.width, center.delta_x, center.delta_y};
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto matrix = std::make_shared<const AngleMatrix>(compute_angle_matrix(grid, center));
  std::lock_guard<std::mutex> lock(mutex);
  if (cache.size() >= kMaxEntries) cache.clear();
  return cache.emplace(key, std::move(matrix)).first->second;
}

AngleMatrix rebase_angles(const AngleMatrix& m, double rho_base) {
  if (!(rho_base >= 0.0 && rho_base < 360.0)) {
    throw DomainError("rho_base must lie in [0, 360), got " + std::to_string(rho_base));
  }
  std::vector<double> values(m.values().begin(), m.values().end());
  for (double& v : values) v = wrap_degrees(v - rho_base);
  return AngleMatrix(m.grid(), std::move(values));
}

SectorMask sector_mask(const AngleMatrix& m_base, double rho) {
  if (!(rho > 0.0 && rho < 360.0)) {
    throw DomainError("sweep angle must lie in (0, 360), got " + std::to_string(rho));
  }
  std::vector<std::uint8_t> bits(m_base.values().size());
  std::transform(m_base.values().begin(), m_base.values().end(), bits.begin(),
                 [rho](double a) { return static_cast<std::uint8_t>(a <= rho ? 1 : 0); });
  return SectorMask(m_base.grid(), rho, std::move(bits));
}

}  // namespace ed4
