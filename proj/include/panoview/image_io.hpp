#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "panoview/error.hpp"
#include "panoview/image.hpp"

namespace panoview {

/// Decodes PNG or JPEG into 8-bit RGB.
inline RgbImage loadRgb(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorKind::IoError, "cannot open " + path.string());
  }
  cv::Mat bgr;
  try {
    bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw Error(ErrorKind::DecodeError, path.string() + ": " + e.what());
  }
  if (bgr.empty() || bgr.type() != CV_8UC3) {
    throw Error(ErrorKind::DecodeError, "cannot decode " + path.string());
  }
  RgbImage out(bgr.cols, bgr.rows);
  for (int r = 0; r < bgr.rows; ++r) {
    const auto* src = bgr.ptr<cv::Vec3b>(r);
    for (int c = 0; c < bgr.cols; ++c) out.at(r, c) = Rgb{src[c][2], src[c][1], src[c][0]};
  }
  return out;
}

inline ErpImage loadErp(const std::filesystem::path& path) { return ErpImage(loadRgb(path)); }

namespace detail {

inline void writeMat(const cv::Mat& mat, const std::filesystem::path& path) {
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), mat, {cv::IMWRITE_PNG_COMPRESSION, 6});
  } catch (const cv::Exception& e) {
    throw Error(ErrorKind::IoError, path.string() + ": " + e.what());
  }
  if (!ok) throw Error(ErrorKind::IoError, "cannot write " + path.string());
}

}  // namespace detail

inline void savePng(const RgbImage& img, const std::filesystem::path& path) {
  cv::Mat bgr(img.height(), img.width(), CV_8UC3);
  for (int r = 0; r < img.height(); ++r) {
    auto* dst = bgr.ptr<cv::Vec3b>(r);
    for (int c = 0; c < img.width(); ++c) {
      const Rgb& p = img.at(r, c);
      dst[c] = cv::Vec3b(p.b, p.g, p.r);
    }
  }
  detail::writeMat(bgr, path);
}

inline void savePng(const GrayImage& img, const std::filesystem::path& path) {
  cv::Mat gray(img.height(), img.width(), CV_8UC1);
  for (int r = 0; r < img.height(); ++r) {
    auto line = img.row(r);
    std::copy(line.begin(), line.end(), gray.ptr<std::uint8_t>(r));
  }
  detail::writeMat(gray, path);
}

}  // namespace panoview
