// SPDX-License-Identifier: Apache-2.0

#include "targetfill/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace targetfill {

std::string to_string(const Shape& shape) {
    return std::to_string(shape.channels) + "x" + std::to_string(shape.height) + "x" + std::to_string(shape.width);
}

ImageTensor::ImageTensor(Shape shape, float fill) : shape_(shape) {
    if (shape.channels <= 0 || shape.height <= 0 || shape.width <= 0) {
        throw std::invalid_argument("tensor shape must be positive, got " + to_string(shape));
    }
    data_.assign(shape.size(), fill);
}

ImageTensor::ImageTensor(Shape shape, std::vector<float> data) : shape_(shape), data_(std::move(data)) {
    if (shape.channels <= 0 || shape.height <= 0 || shape.width <= 0) {
        throw std::invalid_argument("tensor shape must be positive, got " + to_string(shape));
    }
    if (data_.size() != shape.size()) {
        throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) + " does not match shape "
                                    + to_string(shape));
    }
}

bool ImageTensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

double max_abs_diff(const ImageTensor& a, const ImageTensor& b) {
    if (a.shape() != b.shape()) {
        throw std::invalid_argument("shape mismatch: " + to_string(a.shape()) + " vs " + to_string(b.shape()));
    }
    double worst = 0.0;
    auto va = a.values();
    auto vb = b.values();
    for (std::size_t i = 0; i < va.size(); ++i) {
        worst = std::max(worst, std::abs(static_cast<double>(va[i]) - static_cast<double>(vb[i])));
    }
    return worst;
}

ImageTensor broadcast_channels(const ImageTensor& image, int channels) {
    if (image.channels() == channels) return image;
    if (image.channels() != 1) {
        throw std::invalid_argument("cannot broadcast " + to_string(image.shape()) + " to " + std::to_string(channels)
                                    + " channels");
    }
    ImageTensor out(Shape{channels, image.height(), image.width()});
    auto src = image.values();
    auto dst = out.values();
    for (int c = 0; c < channels; ++c) std::copy(src.begin(), src.end(), dst.begin() + static_cast<std::ptrdiff_t>(c * src.size()));
    return out;
}

bool bitwise_equal(const ImageTensor& a, const ImageTensor& b) {
    if (a.shape() != b.shape()) return false;
    return std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(float)) == 0;
}

}  // namespace targetfill
