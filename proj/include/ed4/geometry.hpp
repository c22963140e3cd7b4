#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace ed4 {

struct ImageGrid {
  int height = 0;
  int width = 0;

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;
};

// Pixel column (delta_x) and row (delta_y) of the face centre.
struct FaceCenter {
  int delta_x = 0;
  int delta_y = 0;

  friend bool operator==(const FaceCenter&, const FaceCenter&) = default;
};

// Centre pixel of an aligned crop: (width / 2, height / 2).
FaceCenter grid_center(ImageGrid grid);

void validate_grid(ImageGrid grid);
void validate_center(ImageGrid grid, FaceCenter center);

// Reduces an angle in degrees to [0, 360).
double wrap_degrees(double degrees);

// Per-pixel angle field in degrees, every entry in [0, 360).
class AngleMatrix {
 public:
  AngleMatrix(ImageGrid grid, std::vector<double> values);

  ImageGrid grid() const noexcept { return grid_; }
  double at(int row, int col) const noexcept {
    return values_[static_cast<std::size_t>(row) * static_cast<std::size_t>(grid_.width) +
                   static_cast<std::size_t>(col)];
  }
  std::span<const double> values() const noexcept { return values_; }

 private:
  ImageGrid grid_;
  std::vector<double> values_;
};

class SectorMask {
 public:
  SectorMask(ImageGrid grid, double sweep, std::vector<std::uint8_t> bits);

  ImageGrid grid() const noexcept { return grid_; }
  double sweep() const noexcept { return sweep_; }
  bool at(int row, int col) const noexcept {
    return bits_[static_cast<std::size_t>(row) * static_cast<std::size_t>(grid_.width) +
                 static_cast<std::size_t>(col)] != 0;
  }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::size_t count() const noexcept;
  double fraction() const noexcept;
  SectorMask complement() const;

 private:
  ImageGrid grid_;
  double sweep_;
  std::vector<std::uint8_t> bits_;
};

// Angle of the ray from the centre through each pixel, measured
// counter-clockwise from the rightward horizontal (rows grow downward).
// The centre pixel itself gets 0.
AngleMatrix compute_angle_matrix(ImageGrid grid, FaceCenter center);

// Shared, immutable angle field for (grid, center). Thread-safe.
std::shared_ptr<const AngleMatrix> cached_angle_matrix(ImageGrid grid, FaceCenter center);

// Entry-wise (m - rho_base) mod 360.
AngleMatrix rebase_angles(const AngleMatrix& m, double rho_base);

// Bit (i, j) is set iff m_base(i, j) <= rho.
SectorMask sector_mask(const AngleMatrix& m_base, double rho);

}  // namespace ed4
