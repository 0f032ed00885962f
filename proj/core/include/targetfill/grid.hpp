// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "targetfill/montage.hpp"
#include "targetfill/pipeline.hpp"

namespace targetfill {

// One swept hyperparameter. Recognised names:
//   lambda0, p             constant lambda or piecewise knee (mutually exclusive)
//   T, j, r, jr            timesteps, jump length, resample count, tied j = r
//   mask_mode, ring_source strings as accepted by the CLI
//   b, w, c                heat buffer, ring width, scene-buffer constant
struct GridAxis {
    std::string name;
    std::vector<ParamValue> values;
};

// Axes in document order; cells enumerate row-major (last axis fastest).
struct GridSpec {
    std::vector<GridAxis> axes;

    std::size_t cell_count() const;
};

using ParamList = std::vector<std::pair<std::string, ParamValue>>;

struct GridCell {
    std::size_t index = 0;
    ParamList params;
    SamplerConfig config;
};

// Parses a JSON object {"axis": [values...], ...}. Throws std::invalid_argument
// for unknown axes, empty lists, wrongly typed values and lambda0/p together.
GridSpec parse_grid_spec(std::string_view json_text);

// Applies each cross-product element on top of `base`; cell i gets seed base.seed + i.
std::vector<GridCell> enumerate_cells(const GridSpec& spec, const SamplerConfig& base);

struct CellRecord {
    std::size_t index = 0;
    ParamList params;
    std::uint64_t seed = 0;
    std::string output;
    std::size_t denoiser_calls = 0;
    double wall_seconds = 0.0;
    bool ok = false;
    std::string error;
};

std::string manifest_json(std::span<const CellRecord> records, std::uint64_t master_seed);

}  // namespace targetfill
