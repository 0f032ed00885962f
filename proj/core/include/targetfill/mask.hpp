// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace targetfill {

// Per-pixel boolean over an H x W grid.
class Indicator {
public:
    Indicator() = default;
    Indicator(int height, int width, bool fill = false);

    int height() const { return height_; }
    int width() const { return width_; }
    bool at(int y, int x) const { return bits_[index(y, x)] != 0; }
    void set(int y, int x, bool on) { bits_[index(y, x)] = on ? 1 : 0; }
    std::size_t count() const;

    friend bool operator==(const Indicator&, const Indicator&) = default;

private:
    std::size_t index(int y, int x) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> bits_;
};

// Known-region mask. 1 marks a scene pixel, 0 marks a hole pixel to be filled
// from the target.
class Mask {
public:
    Mask() = default;
    // Values must be 0 or 1, row-major.
    Mask(int height, int width, std::vector<std::uint8_t> values);

    static Mask all_scene(int height, int width);
    static Mask all_hole(int height, int width);
    static Mask from_hole(const Indicator& hole);

    int height() const { return height_; }
    int width() const { return width_; }
    bool is_scene(int y, int x) const { return values_[index(y, x)] != 0; }
    bool is_hole(int y, int x) const { return values_[index(y, x)] == 0; }

    std::size_t hole_count() const;
    std::size_t scene_count() const { return values_.size() - hole_count(); }
    bool all_scene() const { return hole_count() == 0; }
    bool all_hole() const { return hole_count() == values_.size(); }

    Indicator hole() const;
    const std::vector<std::uint8_t>& values() const { return values_; }

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    std::size_t index(int y, int x) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> values_;
};

// Manhattan distance from every pixel to the nearest scene pixel.
struct DistanceField {
    int height = 0;
    int width = 0;
    std::vector<int> distance;

    int at(int y, int x) const { return distance[static_cast<std::size_t>(y) * width + x]; }
};

// Per-pixel blend weight toward the target, in [0, 1].
struct HeatField {
    int height = 0;
    int width = 0;
    std::vector<double> heat;

    double at(int y, int x) const { return heat[static_cast<std::size_t>(y) * width + x]; }
};

// Exact L1 (4-neighbour) distance transform via a forward and a backward sweep.
// Throws std::invalid_argument when the mask has no scene pixel.
DistanceField distance_transform(const Mask& mask);

// min(d / b, 1) inside the hole, 0 on scene pixels. b >= 1.
HeatField heated_mask(const Mask& mask, int buffer);

// Grows the hole by `width` steps of 8-connected dilation.
Mask dilate_hole(const Mask& mask, int width);

// Pixels in dilate_hole(mask, width)'s hole that are not in mask's hole.
Indicator ring(const Mask& mask, int width);

}  // namespace targetfill
