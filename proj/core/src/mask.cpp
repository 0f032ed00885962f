// SPDX-License-Identifier: Apache-2.0

#include "targetfill/mask.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace targetfill {
namespace {

void check_dims(int height, int width) {
    if (height <= 0 || width <= 0) {
        throw std::invalid_argument("mask dimensions must be positive, got " + std::to_string(height) + "x"
                                    + std::to_string(width));
    }
}

}  // namespace

Indicator::Indicator(int height, int width, bool fill)
    : height_(height), width_(width),
      bits_(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill ? 1 : 0) {
    check_dims(height, width);
}

std::size_t Indicator::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Mask::Mask(int height, int width, std::vector<std::uint8_t> values)
    : height_(height), width_(width), values_(std::move(values)) {
    check_dims(height, width);
    if (values_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
        throw std::invalid_argument("mask has " + std::to_string(values_.size()) + " values for "
                                    + std::to_string(height) + "x" + std::to_string(width));
    }
    for (auto v : values_) {
        if (v > 1) throw std::invalid_argument("mask values must be 0 or 1");
    }
}

Mask Mask::all_scene(int height, int width) {
    return Mask(height, width, std::vector<std::uint8_t>(static_cast<std::size_t>(height) * width, 1));
}

Mask Mask::all_hole(int height, int width) {
    return Mask(height, width, std::vector<std::uint8_t>(static_cast<std::size_t>(height) * width, 0));
}

Mask Mask::from_hole(const Indicator& hole) {
    std::vector<std::uint8_t> values(static_cast<std::size_t>(hole.height()) * hole.width());
    for (int y = 0; y < hole.height(); ++y) {
        for (int x = 0; x < hole.width(); ++x) {
            values[static_cast<std::size_t>(y) * hole.width() + x] = hole.at(y, x) ? 0 : 1;
        }
    }
    return Mask(hole.height(), hole.width(), std::move(values));
}

std::size_t Mask::hole_count() const {
    return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{0}));
}

Indicator Mask::hole() const {
    Indicator out(height_, width_);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) out.set(y, x, is_hole(y, x));
    }
    return out;
}

DistanceField distance_transform(const Mask& mask) {
    if (mask.all_hole()) throw std::invalid_argument("distance transform needs at least one scene pixel");

    const int H = mask.height();
    const int W = mask.width();
    // H + W bounds every finite L1 distance on the grid.
    const int far = H + W;
    DistanceField df{H, W, std::vector<int>(static_cast<std::size_t>(H) * W)};
    auto d = [&](int y, int x) -> int& { return df.distance[static_cast<std::size_t>(y) * W + x]; };

    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            int v = mask.is_scene(y, x) ? 0 : far;
            if (y > 0) v = std::min(v, d(y - 1, x) + 1);
            if (x > 0) v = std::min(v, d(y, x - 1) + 1);
            d(y, x) = v;
        }
    }
    for (int y = H - 1; y >= 0; --y) {
        for (int x = W - 1; x >= 0; --x) {
            int v = d(y, x);
            if (y + 1 < H) v = std::min(v, d(y + 1, x) + 1);
            if (x + 1 < W) v = std::min(v, d(y, x + 1) + 1);
            d(y, x) = v;
        }
    }
    return df;
}

HeatField heated_mask(const Mask& mask, int buffer) {
    if (buffer < 1) throw std::invalid_argument("heat buffer size must be >= 1, got " + std::to_string(buffer));

    const auto df = distance_transform(mask);
    HeatField hf{df.height, df.width, std::vector<double>(df.distance.size())};
    for (std::size_t i = 0; i < df.distance.size(); ++i) {
        hf.heat[i] = std::min(static_cast<double>(df.distance[i]) / buffer, 1.0);
    }
    return hf;
}

Mask dilate_hole(const Mask& mask, int width) {
    if (width < 0) throw std::invalid_argument("dilation width must be >= 0");
    if (width == 0) return mask;

    const int H = mask.height();
    const int W = mask.width();
    // Summed-area table of hole pixels; a pixel joins the hole when any hole
    // pixel lies within its (2w+1)^2 Chebyshev window.
    std::vector<int> sat(static_cast<std::size_t>(H + 1) * (W + 1), 0);
    auto s = [&](int y, int x) -> int& { return sat[static_cast<std::size_t>(y) * (W + 1) + x]; };
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            s(y + 1, x + 1) = (mask.is_hole(y, x) ? 1 : 0) + s(y, x + 1) + s(y + 1, x) - s(y, x);
        }
    }

    std::vector<std::uint8_t> out(static_cast<std::size_t>(H) * W);
    for (int y = 0; y < H; ++y) {
        const int y0 = std::max(0, y - width);
        const int y1 = std::min(H, y + width + 1);
        for (int x = 0; x < W; ++x) {
            const int x0 = std::max(0, x - width);
            const int x1 = std::min(W, x + width + 1);
            const int holes = s(y1, x1) - s(y0, x1) - s(y1, x0) + s(y0, x0);
            out[static_cast<std::size_t>(y) * W + x] = holes > 0 ? 0 : 1;
        }
    }
    return Mask(H, W, std::move(out));
}

Indicator ring(const Mask& mask, int width) {
    const Mask grown = dilate_hole(mask, width);
    Indicator out(mask.height(), mask.width());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) out.set(y, x, grown.is_hole(y, x) && mask.is_scene(y, x));
    }
    return out;
}

}  // namespace targetfill
