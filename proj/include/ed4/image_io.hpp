#pragma once

#include <filesystem>

#include "ed4/image.hpp"

namespace ed4 {

// Decodes any format OpenCV understands into RGB. Missing file -> IoError,
// undecodable content -> DataError.
Image read_image(const std::filesystem::path& path);

// Lossless PNG with fixed compression settings, so identical pixels always
// give identical bytes. Creates parent directories.
void write_png(const std::filesystem::path& path, const Image& image);

// Bilinear resize; returns an exact copy when the size already matches.
Image resize_bilinear(const Image& image, int height, int width);

}  // namespace ed4
