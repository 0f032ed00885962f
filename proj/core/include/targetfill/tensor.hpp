// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace targetfill {

struct Shape {
    int channels = 0;
    int height = 0;
    int width = 0;

    std::size_t plane() const { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }
    std::size_t size() const { return static_cast<std::size_t>(channels) * plane(); }

    friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& shape);

// C x H x W float image, channel-major then row-major. Values are nominally
// in [-1, 1] but unbounded while diffusing.
class ImageTensor {
public:
    ImageTensor() = default;
    explicit ImageTensor(Shape shape, float fill = 0.0f);
    ImageTensor(Shape shape, std::vector<float> data);

    const Shape& shape() const { return shape_; }
    int channels() const { return shape_.channels; }
    int height() const { return shape_.height; }
    int width() const { return shape_.width; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    float& at(int c, int y, int x) { return data_[index(c, y, x)]; }
    float at(int c, int y, int x) const { return data_[index(c, y, x)]; }

    std::span<float> values() { return data_; }
    std::span<const float> values() const { return data_; }

    bool all_finite() const;

    friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

private:
    std::size_t index(int c, int y, int x) const {
        return (static_cast<std::size_t>(c) * shape_.height + static_cast<std::size_t>(y)) * shape_.width
               + static_cast<std::size_t>(x);
    }

    Shape shape_;
    std::vector<float> data_;
};

// Largest absolute elementwise difference. Shapes must match.
double max_abs_diff(const ImageTensor& a, const ImageTensor& b);

// Replicates a single-channel image into `channels` planes; other inputs are
// returned unchanged when they already have `channels` planes.
ImageTensor broadcast_channels(const ImageTensor& image, int channels);

// Byte-level equality, distinguishing -0.0f from +0.0f.
bool bitwise_equal(const ImageTensor& a, const ImageTensor& b);

}  // namespace targetfill
