// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "targetfill/tensor.hpp"

namespace targetfill {

inline constexpr int kMontageSeparator = 2;
// Mid-gray in the [-1, 1] domain; encodes to byte 128.
inline constexpr float kMontageGray = 0.0f;

struct MontageLayout {
    int rows = 0;
    int columns = 0;
    int height = 0;
    int width = 0;
};

// Columns are capped at the image count; rows = ceil(n / columns).
MontageLayout montage_layout(std::size_t count, int columns, Shape cell);

// Row-major contact sheet with 2-pixel mid-gray separators between cells.
// Unfilled trailing cells stay gray.
ImageTensor montage(std::span<const ImageTensor> images, int columns);

using ParamValue = std::variant<std::int64_t, double, std::string>;

struct MontageCell {
    int row = 0;
    int col = 0;
    std::vector<std::pair<std::string, ParamValue>> params;
    std::string output;
};

std::vector<MontageCell> montage_cells(std::size_t count, int columns);

// {"cells":[{"row":r,"col":c,"params":{...},"output":"file.png"}, ...]}
std::string montage_index_json(std::span<const MontageCell> cells);
void write_montage_index(const std::filesystem::path& path, std::span<const MontageCell> cells);

}  // namespace targetfill
