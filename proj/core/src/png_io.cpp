// SPDX-License-Identifier: Apache-2.0

#include "targetfill/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "targetfill/errors.hpp"

namespace targetfill {

float decode_pixel(std::uint8_t v) { return static_cast<float>(v / 127.5 - 1.0); }

std::uint8_t encode_pixel(float x) {
    const double clamped = std::clamp(static_cast<double>(x), -1.0, 1.0);
    const double scaled = (clamped + 1.0) * 127.5;
    return static_cast<std::uint8_t>(std::clamp(std::round(scaled), 0.0, 255.0));
}

std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

RawImage read_png(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ImageIoError("no such file: " + path.string());

    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
        throw ImageIoError("cannot decode " + path.string() + ": " + image.message);
    }
    if (image.format & PNG_FORMAT_FLAG_ALPHA) {
        png_image_free(&image);
        throw ImageIoError(path.string() + ": images with an alpha channel are not supported");
    }
    if (image.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        throw ImageIoError(path.string() + ": unsupported bit depth (only 8-bit PNGs are accepted)");
    }

    RawImage raw;
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    raw.channels = color ? 3 : 1;
    raw.height = static_cast<int>(image.height);
    raw.width = static_cast<int>(image.width);
    raw.bytes.resize(PNG_IMAGE_SIZE(image));
    if (png_image_finish_read(&image, nullptr, raw.bytes.data(), 0, nullptr) == 0) {
        const std::string message = image.message;
        png_image_free(&image);
        throw ImageIoError("cannot decode " + path.string() + ": " + message);
    }
    return raw;
}

void write_png(const std::filesystem::path& path, const RawImage& raw) {
    if (raw.channels != 1 && raw.channels != 3) throw ImageIoError("PNG output needs 1 or 3 channels");
    if (raw.bytes.size() != static_cast<std::size_t>(raw.channels) * raw.height * raw.width) {
        throw ImageIoError("raw image buffer does not match its dimensions");
    }
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(raw.width);
    image.height = static_cast<png_uint_32>(raw.height);
    image.format = raw.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (png_image_write_to_file(&image, path.c_str(), 0, raw.bytes.data(), 0, nullptr) == 0) {
        const std::string message = image.message;
        png_image_free(&image);
        throw ImageIoError("cannot write " + path.string() + ": " + message);
    }
}

ImageTensor to_tensor(const RawImage& raw) {
    ImageTensor out(Shape{raw.channels, raw.height, raw.width});
    for (int y = 0; y < raw.height; ++y) {
        for (int x = 0; x < raw.width; ++x) {
            for (int c = 0; c < raw.channels; ++c) {
                out.at(c, y, x) = decode_pixel(raw.bytes[(static_cast<std::size_t>(y) * raw.width + x) * raw.channels + c]);
            }
        }
    }
    return out;
}

RawImage to_raw(const ImageTensor& tensor) {
    RawImage raw{tensor.channels(), tensor.height(), tensor.width(), {}};
    raw.bytes.resize(tensor.size());
    for (int y = 0; y < raw.height; ++y) {
        for (int x = 0; x < raw.width; ++x) {
            for (int c = 0; c < raw.channels; ++c) {
                raw.bytes[(static_cast<std::size_t>(y) * raw.width + x) * raw.channels + c] = encode_pixel(tensor.at(c, y, x));
            }
        }
    }
    return raw;
}

ImageTensor load_png(const std::filesystem::path& path) { return to_tensor(read_png(path)); }

void save_png(const ImageTensor& tensor, const std::filesystem::path& path) {
    if (tensor.channels() != 1 && tensor.channels() != 3) {
        throw ImageIoError("save_png needs 1 or 3 channels, got " + std::to_string(tensor.channels()));
    }
    write_png(path, to_raw(tensor));
}

Mask mask_from_raw(const RawImage& raw) {
    std::vector<std::uint8_t> values(static_cast<std::size_t>(raw.height) * raw.width);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::uint8_t* px = raw.bytes.data() + i * raw.channels;
        const std::uint8_t luma = raw.channels == 3 ? luminance(px[0], px[1], px[2]) : px[0];
        values[i] = luma >= kMaskThreshold ? 1 : 0;
    }
    return Mask(raw.height, raw.width, std::move(values));
}

Mask load_mask_png(const std::filesystem::path& path) { return mask_from_raw(read_png(path)); }

void save_mask_png(const Mask& mask, const std::filesystem::path& path) {
    RawImage raw{1, mask.height(), mask.width(), {}};
    raw.bytes.reserve(mask.values().size());
    for (auto v : mask.values()) raw.bytes.push_back(v ? 255 : 0);
    write_png(path, raw);
}

}  // namespace targetfill
