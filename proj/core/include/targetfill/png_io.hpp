// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "targetfill/mask.hpp"
#include "targetfill/tensor.hpp"

namespace targetfill {

// 8-bit pixels, interleaved (H x W x C), C in {1, 3}.
struct RawImage {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> bytes;
};

// Fixed u8 <-> float codec: v <-> v / 127.5 - 1.
float decode_pixel(std::uint8_t v);
// Clamps to [-1, 1], then rounds half away from zero.
std::uint8_t encode_pixel(float x);

// Integer Rec.601 luma, rounded: (299 R + 587 G + 114 B + 500) / 1000.
std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Mask pixels with luminance >= 128 are scene (1), darker ones are hole (0).
inline constexpr std::uint8_t kMaskThreshold = 128;

// Reads an 8-bit grayscale or RGB PNG (palette images are expanded to RGB).
// Throws ImageIoError for missing files, alpha channels and 16-bit data.
RawImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RawImage& image);

ImageTensor to_tensor(const RawImage& image);
RawImage to_raw(const ImageTensor& tensor);

ImageTensor load_png(const std::filesystem::path& path);
void save_png(const ImageTensor& tensor, const std::filesystem::path& path);

Mask mask_from_raw(const RawImage& image);
Mask load_mask_png(const std::filesystem::path& path);

// Gray PNG where scene pixels are 255 and hole pixels 0.
void save_mask_png(const Mask& mask, const std::filesystem::path& path);

}  // namespace targetfill
