// SPDX-License-Identifier: Apache-2.0

#include "targetfill/montage.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "targetfill/errors.hpp"

namespace targetfill {

MontageLayout montage_layout(std::size_t count, int columns, Shape cell) {
    if (count == 0) throw std::invalid_argument("montage needs at least one image");
    if (columns < 1) throw std::invalid_argument("montage needs columns >= 1");
    MontageLayout layout;
    layout.columns = static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(columns)));
    layout.rows = static_cast<int>((count + layout.columns - 1) / layout.columns);
    layout.height = layout.rows * cell.height + (layout.rows - 1) * kMontageSeparator;
    layout.width = layout.columns * cell.width + (layout.columns - 1) * kMontageSeparator;
    return layout;
}

ImageTensor montage(std::span<const ImageTensor> images, int columns) {
    if (images.empty()) throw std::invalid_argument("montage needs at least one image");
    const Shape cell = images.front().shape();
    for (const auto& img : images) {
        if (img.shape() != cell) {
            throw std::invalid_argument("montage images differ in shape: " + to_string(img.shape()) + " vs "
                                        + to_string(cell));
        }
    }
    const auto layout = montage_layout(images.size(), columns, cell);
    ImageTensor sheet(Shape{cell.channels, layout.height, layout.width}, kMontageGray);
    for (std::size_t i = 0; i < images.size(); ++i) {
        const int row = static_cast<int>(i) / layout.columns;
        const int col = static_cast<int>(i) % layout.columns;
        const int y0 = row * (cell.height + kMontageSeparator);
        const int x0 = col * (cell.width + kMontageSeparator);
        for (int c = 0; c < cell.channels; ++c) {
            for (int y = 0; y < cell.height; ++y) {
                for (int x = 0; x < cell.width; ++x) sheet.at(c, y0 + y, x0 + x) = images[i].at(c, y, x);
            }
        }
    }
    return sheet;
}

std::vector<MontageCell> montage_cells(std::size_t count, int columns) {
    const auto layout = montage_layout(count, columns, Shape{1, 1, 1});
    std::vector<MontageCell> cells(count);
    for (std::size_t i = 0; i < count; ++i) {
        cells[i].row = static_cast<int>(i) / layout.columns;
        cells[i].col = static_cast<int>(i) % layout.columns;
    }
    return cells;
}

std::string montage_index_json(std::span<const MontageCell> cells) {
    nlohmann::ordered_json doc;
    doc["cells"] = nlohmann::ordered_json::array();
    for (const auto& cell : cells) {
        nlohmann::ordered_json entry;
        entry["row"] = cell.row;
        entry["col"] = cell.col;
        nlohmann::ordered_json params = nlohmann::ordered_json::object();
        for (const auto& [name, value] : cell.params) {
            std::visit([&, &key = name](const auto& v) { params[key] = v; }, value);
        }
        entry["params"] = std::move(params);
        entry["output"] = cell.output;
        doc["cells"].push_back(std::move(entry));
    }
    return doc.dump(2);
}

void write_montage_index(const std::filesystem::path& path, std::span<const MontageCell> cells) {
    std::ofstream out(path);
    if (!out) throw ImageIoError("cannot write " + path.string());
    out << montage_index_json(cells) << '\n';
}

}  // namespace targetfill
