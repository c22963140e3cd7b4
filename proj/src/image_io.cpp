#include "ed4/image_io.hpp"

#include <cstring>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <system_error>
#include <vector>

#include "ed4/error.hpp"

namespace ed4 {
namespace {

Image from_bgr(const cv::Mat& bgr) {
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  Image out(rgb.rows, rgb.cols);
  const std::size_t row_bytes = static_cast<std::size_t>(rgb.cols) * Image::kChannels;
  for (int r = 0; r < rgb.rows; ++r) std::memcpy(out.pixel(r, 0), rgb.ptr(r), row_bytes);
  return out;
}

cv::Mat as_mat(const Image& image) {
  // OpenCV never writes through this header.
  return cv::Mat(image.height(), image.width(), CV_8UC3,
                 const_cast<std::uint8_t*>(image.data().data()));
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw IoError("image not found: " + path.string());
  }
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw DataError("cannot decode image: " + path.string());
  return from_bgr(bgr);
}

void write_png(const std::filesystem::path& path, const Image& image) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " +
                        ec.message());
  cv::Mat bgr;
  cv::cvtColor(as_mat(image), bgr, cv::COLOR_RGB2BGR);
  const std::vector<int> params{cv::IMWRITE_PNG_COMPRESSION, 3};
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), bgr, params);
  } catch (const cv::Exception& e) {
    throw IoError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw IoError("cannot write " + path.string());
}

Image resize_bilinear(const Image& image, int height, int width) {
  if (height < 1 || width < 1) throw DomainError("resize target must be positive");
  if (image.height() == height && image.width() == width) return image;
  cv::Mat resized;
  cv::resize(as_mat(image), resized, cv::Size(width, height), 0.0, 0.0, cv::INTER_LINEAR);
  Image out(height, width);
  const std::size_t row_bytes = static_cast<std::size_t>(width) * Image::kChannels;
  for (int r = 0; r < height; ++r) std::memcpy(out.pixel(r, 0), resized.ptr(r), row_bytes);
  return out;
}

}  // namespace ed4
