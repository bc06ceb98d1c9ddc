//  Copyright 2026 The starenh Authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#pragma once

#include <string>

#include "starenh/image.hpp"

namespace starenh {

enum class ImageFormat { kPng, kPpm };

/// Decodes PNG (gray, RGB, with or without alpha; 8 or 16 bit) or binary
/// PPM (P6, maxval 255 or 65535). Samples map to [0,1] as v / (2^bits - 1);
/// alpha is dropped and gray is replicated.
Image decode_image(const std::string& bytes);
/// Encodes at `image.bit_depth` (8 or 16) after clamping to [0,1].
std::string encode_image(const Image& image, ImageFormat format = ImageFormat::kPng);

Image read_image(const std::string& path);
/// Format chosen by extension: .png, .ppm or .pnm.
void write_image(const std::string& path, const Image& image);

}  // namespace starenh
