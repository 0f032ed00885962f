// SPDX-License-Identifier: Apache-2.0

#include "targetfill/grid.hpp"

#include <stdexcept>

#include "json.hpp"

namespace targetfill {
namespace {

using Json = nlohmann::ordered_json;

enum class AxisType { integer, number, text };

AxisType axis_type(const std::string& name) {
    if (name == "T" || name == "j" || name == "r" || name == "jr" || name == "b" || name == "w") return AxisType::integer;
    if (name == "lambda0" || name == "p" || name == "c") return AxisType::number;
    if (name == "mask_mode" || name == "ring_source") return AxisType::text;
    throw std::invalid_argument("unknown grid axis '" + name + "'");
}

ParamValue to_param(const std::string& axis, const Json& v) {
    switch (axis_type(axis)) {
        case AxisType::integer:
            if (!v.is_number_integer()) throw std::invalid_argument("grid axis '" + axis + "' needs integers");
            return ParamValue{v.get<std::int64_t>()};
        case AxisType::number:
            if (!v.is_number()) throw std::invalid_argument("grid axis '" + axis + "' needs numbers");
            return ParamValue{v.get<double>()};
        case AxisType::text:
            if (!v.is_string()) throw std::invalid_argument("grid axis '" + axis + "' needs strings");
            if (axis == "mask_mode") parse_mask_mode(v.get<std::string>());
            else parse_ring_source(v.get<std::string>());
            return ParamValue{v.get<std::string>()};
    }
    throw std::logic_error("unreachable");
}

int as_int(const ParamValue& v) { return static_cast<int>(std::get<std::int64_t>(v)); }
double as_double(const ParamValue& v) { return std::get<double>(v); }

void apply(SamplerConfig& cfg, const std::string& name, const ParamValue& v) {
    if (name == "lambda0") {
        cfg.lambda_kind = LambdaSchedule::Kind::constant;
        cfg.lambda0 = as_double(v);
    } else if (name == "p") {
        cfg.lambda_kind = LambdaSchedule::Kind::piecewise_linear;
        cfg.knee = as_double(v);
    } else if (name == "T") {
        cfg.timesteps = as_int(v);
    } else if (name == "j") {
        cfg.jump = as_int(v);
    } else if (name == "r") {
        cfg.resample = as_int(v);
    } else if (name == "jr") {
        cfg.jump = cfg.resample = as_int(v);
    } else if (name == "b") {
        cfg.heat_buffer = as_int(v);
    } else if (name == "w") {
        cfg.ring_width = as_int(v);
    } else if (name == "c") {
        cfg.buffer_blend = as_double(v);
    } else if (name == "mask_mode") {
        cfg.mask_mode = parse_mask_mode(std::get<std::string>(v));
    } else if (name == "ring_source") {
        cfg.ring_source = parse_ring_source(std::get<std::string>(v));
    }
}

Json to_json(const ParamList& params) {
    Json out = Json::object();
    for (const auto& [name, value] : params) {
        std::visit([&, &key = name](const auto& v) { out[key] = v; }, value);
    }
    return out;
}

}  // namespace

std::size_t GridSpec::cell_count() const {
    if (axes.empty()) return 0;
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.values.size();
    return n;
}

GridSpec parse_grid_spec(std::string_view json_text) {
    Json doc;
    try {
        doc = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("grid file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.empty()) throw std::invalid_argument("grid file must be a non-empty JSON object");
    if (doc.contains("lambda0") && doc.contains("p")) {
        throw std::invalid_argument("grid cannot sweep both lambda0 and p");
    }
    if (doc.contains("jr") && (doc.contains("j") || doc.contains("r"))) {
        throw std::invalid_argument("grid axis 'jr' cannot be combined with 'j' or 'r'");
    }

    GridSpec spec;
    for (const auto& [name, values] : doc.items()) {
        axis_type(name);
        if (!values.is_array() || values.empty()) {
            throw std::invalid_argument("grid axis '" + name + "' must be a non-empty array");
        }
        GridAxis axis{name, {}};
        for (const auto& v : values) axis.values.push_back(to_param(name, v));
        spec.axes.push_back(std::move(axis));
    }
    return spec;
}

std::vector<GridCell> enumerate_cells(const GridSpec& spec, const SamplerConfig& base) {
    const std::size_t total = spec.cell_count();
    std::vector<GridCell> cells;
    cells.reserve(total);
    for (std::size_t index = 0; index < total; ++index) {
        GridCell cell;
        cell.index = index;
        cell.config = base;
        // Mixed-radix decode with the last axis varying fastest.
        std::vector<std::size_t> digits(spec.axes.size());
        std::size_t rest = index;
        for (std::size_t k = spec.axes.size(); k-- > 0;) {
            digits[k] = rest % spec.axes[k].values.size();
            rest /= spec.axes[k].values.size();
        }
        for (std::size_t k = 0; k < spec.axes.size(); ++k) {
            const auto& axis = spec.axes[k];
            const auto& value = axis.values[digits[k]];
            cell.params.emplace_back(axis.name, value);
            apply(cell.config, axis.name, value);
        }
        cell.config.seed = base.seed + index;
        cells.push_back(std::move(cell));
    }
    return cells;
}

std::string manifest_json(std::span<const CellRecord> records, std::uint64_t master_seed) {
    Json doc;
    doc["master_seed"] = master_seed;
    doc["cells"] = Json::array();
    for (const auto& r : records) {
        Json entry;
        entry["index"] = r.index;
        entry["params"] = to_json(r.params);
        entry["seed"] = r.seed;
        entry["output"] = r.output;
        entry["denoiser_calls"] = r.denoiser_calls;
        entry["wall_seconds"] = r.wall_seconds;
        entry["status"] = r.ok ? "ok" : "failed";
        if (!r.ok) entry["error"] = r.error;
        doc["cells"].push_back(std::move(entry));
    }
    return doc.dump(2);
}

}  // namespace targetfill
