#include "ed4/image.hpp"

#include <string>

#include "ed4/error.hpp"

namespace ed4 {

Image::Image(int height, int width, std::uint8_t fill) : height_(height), width_(width) {
  if (height < 1 || width < 1) {
    throw DomainError("image dimensions must be positive, got " + std::to_string(height) +
                      "x" + std::to_string(width));
  }
  data_.assign(pixel_count() * kChannels, fill);
}

Image::Image(int height, int width, std::vector<std::uint8_t> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (height < 1 || width < 1) {
    throw DomainError("image dimensions must be positive, got " + std::to_string(height) +
                      "x" + std::to_string(width));
  }
  if (data_.size() != pixel_count() * kChannels) {
    throw DomainError("pixel buffer holds " + std::to_string(data_.size()) + " bytes, expected " +
                      std::to_string(pixel_count() * kChannels));
  }
}

Image constant_image(int height, int width, std::uint8_t value) {
  return Image(height, width, value);
}

}  // namespace ed4
