// Copyright 2026 The emvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "emvc/datapipe/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "emvc/common/binary_io.hpp"
#include "emvc/common/error.hpp"

namespace emvc::datapipe
{

namespace
{

void check_image(const Image & img, const char * what)
{
  if (img.rank() != 3 || img.dim(2) != 3)
    throw ShapeError(std::string(what) + ": expected [H x W x 3], got " + autodiff::shape_string(img.dims()));
}

}  // namespace

Image make_image(std::size_t height, std::size_t width, float fill)
{
  return Image(autodiff::Shape{height, width, 3}, fill);
}

std::size_t image_height(const Image & img) { return img.dim(0); }
std::size_t image_width(const Image & img) { return img.dim(1); }

Image decode_ppm(std::string_view bytes)
{
  std::size_t pos = 0;
  auto skip_space = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_number = [&](const char * field) {
    skip_space();
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos || pos - start > 9) throw FormatError(std::string("ppm: bad ") + field);
    return std::stoul(std::string(bytes.substr(start, pos - start)));
  };
  if (bytes.size() < 2 || bytes.substr(0, 2) != "P6") throw FormatError("ppm: missing P6 magic");
  pos = 2;
  const auto width = read_number("width");
  const auto height = read_number("height");
  const auto maxval = read_number("maxval");
  if (width == 0 || height == 0) throw FormatError("ppm: zero dimension");
  if (maxval == 0 || maxval > 255) throw FormatError("ppm: only 8-bit maxval is supported");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw FormatError("ppm: missing separator before raster");
  ++pos;
  const std::size_t n = width * height * 3;
  if (bytes.size() - pos < n) throw FormatError("ppm: truncated raster");
  Image img = make_image(height, width);
  const float scale = 1.0f / static_cast<float>(maxval);
  for (std::size_t i = 0; i < n; ++i)
    img[i] = static_cast<float>(static_cast<unsigned char>(bytes[pos + i])) * scale;
  return img;
}

std::string encode_ppm(const Image & img)
{
  check_image(img, "encode_ppm");
  std::string out = "P6\n" + std::to_string(image_width(img)) + " " +
                    std::to_string(image_height(img)) + "\n255\n";
  const auto raw = to_bytes(img);
  out.append(raw.begin(), raw.end());
  return out;
}

Image read_ppm(const std::filesystem::path & path)
{
  try {
    return decode_ppm(read_file(path));
  } catch (const FormatError & e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_ppm(const std::filesystem::path & path, const Image & img)
{
  write_file(path, encode_ppm(img));
}

std::vector<std::uint8_t> to_bytes(const Image & img)
{
  std::vector<std::uint8_t> out(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const float v = std::clamp(img[i], 0.0f, 1.0f);
    out[i] = static_cast<std::uint8_t>(std::floor(v * 255.0f + 0.5f));
  }
  return out;
}

Image from_bytes(std::size_t height, std::size_t width, const std::vector<std::uint8_t> & bytes)
{
  if (bytes.size() != height * width * 3) throw ShapeError("from_bytes: size mismatch");
  Image img = make_image(height, width);
  for (std::size_t i = 0; i < bytes.size(); ++i) img[i] = static_cast<float>(bytes[i]) / 255.0f;
  return img;
}

Image rgb_to_hsv(const Image & rgb)
{
  check_image(rgb, "rgb_to_hsv");
  Image out(rgb.dims());
  const std::size_t n = rgb.size() / 3;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = rgb[3 * i], g = rgb[3 * i + 1], b = rgb[3 * i + 2];
    if (!(r >= 0.0 && r <= 1.0 && g >= 0.0 && g <= 1.0 && b >= 0.0 && b <= 1.0))
      throw ValueError("rgb_to_hsv: channel outside [0, 1] at pixel " + std::to_string(i));
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double c = mx - mn;
    double h = 0.0;
    if (c > 0.0) {
      if (mx == r) {
        h = std::fmod((g - b) / c, 6.0);
        if (h < 0.0) h += 6.0;
      } else if (mx == g) {
        h = (b - r) / c + 2.0;
      } else {
        h = (r - g) / c + 4.0;
      }
      h /= 6.0;
    }
    const double s = mx > 0.0 ? c / mx : 0.0;
    out[3 * i] = static_cast<float>(h);
    out[3 * i + 1] = static_cast<float>(s);
    out[3 * i + 2] = static_cast<float>(mx);
  }
  return out;
}

Image hsv_to_rgb(const Image & hsv)
{
  check_image(hsv, "hsv_to_rgb");
  Image out(hsv.dims());
  const std::size_t n = hsv.size() / 3;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = hsv[3 * i] * 6.0, s = hsv[3 * i + 1], v = hsv[3 * i + 2];
    const double c = v * s;
    const double x = c * (1.0 - std::abs(std::fmod(h, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    const int sector = std::min(static_cast<int>(h), 5);
    switch (sector) {
      case 0: r = c; g = x; break;
      case 1: r = x; g = c; break;
      case 2: g = c; b = x; break;
      case 3: g = x; b = c; break;
      case 4: r = x; b = c; break;
      default: r = c; b = x; break;
    }
    const double m = v - c;
    out[3 * i] = static_cast<float>(r + m);
    out[3 * i + 1] = static_cast<float>(g + m);
    out[3 * i + 2] = static_cast<float>(b + m);
  }
  return out;
}

namespace
{

// Bilinear sample at continuous source coordinates (pixel centers at +0.5),
// clamped to the edge.
void sample_bilinear(const Image & img, double y, double x, float * dst)
{
  const std::size_t h = image_height(img), w = image_width(img);
  y = std::clamp(y - 0.5, 0.0, static_cast<double>(h - 1));
  x = std::clamp(x - 0.5, 0.0, static_cast<double>(w - 1));
  const auto y0 = static_cast<std::size_t>(y);
  const auto x0 = static_cast<std::size_t>(x);
  const std::size_t y1 = std::min(y0 + 1, h - 1), x1 = std::min(x0 + 1, w - 1);
  const double fy = y - static_cast<double>(y0), fx = x - static_cast<double>(x0);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    const double a = img[(y0 * w + x0) * 3 + ch], b = img[(y0 * w + x1) * 3 + ch];
    const double c = img[(y1 * w + x0) * 3 + ch], d = img[(y1 * w + x1) * 3 + ch];
    const double top = a + (b - a) * fx;
    const double bottom = c + (d - c) * fx;
    dst[ch] = static_cast<float>(top + (bottom - top) * fy);
  }
}

}  // namespace

Image squeeze_resize(const Image & img, std::size_t side)
{
  check_image(img, "squeeze_resize");
  const std::size_t h = image_height(img), w = image_width(img);
  if (h < 2 || w < 2) throw ShapeError("squeeze_resize: input must be at least 2x2");
  if (side == 0) throw ShapeError("squeeze_resize: side must be positive");
  Image out = make_image(side, side);
  const double sy = static_cast<double>(h) / static_cast<double>(side);
  const double sx = static_cast<double>(w) / static_cast<double>(side);
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c)
      sample_bilinear(
        img, (static_cast<double>(r) + 0.5) * sy, (static_cast<double>(c) + 0.5) * sx,
        &out[(r * side + c) * 3]);
  return out;
}

Image flip_horizontal(const Image & img)
{
  check_image(img, "flip_horizontal");
  const std::size_t h = image_height(img), w = image_width(img);
  Image out(img.dims());
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c)
      for (std::size_t ch = 0; ch < 3; ++ch)
        out[(r * w + c) * 3 + ch] = img[(r * w + (w - 1 - c)) * 3 + ch];
  return out;
}

Image rotate(const Image & img, double degrees)
{
  check_image(img, "rotate");
  if (degrees == 0.0) return img;
  const std::size_t h = image_height(img), w = image_width(img);
  Image out(img.dims());
  const double a = degrees * std::numbers::pi / 180.0;
  const double ca = std::cos(a), sa = std::sin(a);
  const double cy = static_cast<double>(h) / 2.0, cx = static_cast<double>(w) / 2.0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double dy = static_cast<double>(r) + 0.5 - cy;
      const double dx = static_cast<double>(c) + 0.5 - cx;
      // Inverse mapping: rotate the destination point back into the source.
      const double sx = ca * dx - sa * dy + cx;
      const double sy = sa * dx + ca * dy + cy;
      sample_bilinear(img, sy, sx, &out[(r * w + c) * 3]);
    }
  }
  return out;
}

}  // namespace emvc::datapipe
