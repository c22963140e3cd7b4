#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ed4 {

// Interleaved 8-bit RGB buffer, row-major, origin at the top-left.
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  Image(int height, int width, std::uint8_t fill = 0);
  Image(int height, int width, std::vector<std::uint8_t> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  const std::uint8_t* pixel(int row, int col) const noexcept {
    return data_.data() + offset(row, col);
  }
  std::uint8_t* pixel(int row, int col) noexcept { return data_.data() + offset(row, col); }

  bool same_shape(const Image& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t offset(int row, int col) const noexcept {
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(col)) *
           kChannels;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

// Solid-colour image, mostly useful for provenance checks.
Image constant_image(int height, int width, std::uint8_t value);

}  // namespace ed4
