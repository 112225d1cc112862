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

#ifndef EMVC__DATAPIPE__IMAGE_HPP_
#define EMVC__DATAPIPE__IMAGE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "emvc/autodiff/tensor.hpp"

namespace emvc::datapipe
{

// [H x W x 3] row-major, channels in [0, 1].
using Image = autodiff::Tensor<float>;

Image make_image(std::size_t height, std::size_t width, float fill = 0.0f);
std::size_t image_height(const Image & img);
std::size_t image_width(const Image & img);

// Binary PPM (P6, maxval 255). Decoding accepts comments and any maxval < 65536
// with one byte per sample only when maxval < 256.
Image decode_ppm(std::string_view bytes);
std::string encode_ppm(const Image & img);
Image read_ppm(const std::filesystem::path & path);
void write_ppm(const std::filesystem::path & path, const Image & img);

// Quantize to 8 bits (round half up) and back.
std::vector<std::uint8_t> to_bytes(const Image & img);
Image from_bytes(std::size_t height, std::size_t width, const std::vector<std::uint8_t> & bytes);

// Hexcone HSV with all channels in [0, 1]; hue 0 for achromatic pixels.
Image rgb_to_hsv(const Image & rgb);
Image hsv_to_rgb(const Image & hsv);

// Bilinear resample to side x side using pixel-center alignment.
Image squeeze_resize(const Image & img, std::size_t side);

Image flip_horizontal(const Image & img);
// Rotation about the image center; samples outside the source are clamped to
// the nearest edge pixel.
Image rotate(const Image & img, double degrees);

}  // namespace emvc::datapipe

#endif  // EMVC__DATAPIPE__IMAGE_HPP_
