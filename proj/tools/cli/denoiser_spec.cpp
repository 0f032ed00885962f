// SPDX-License-Identifier: Apache-2.0

#include "denoiser_spec.hpp"

#include <stdexcept>

#include "targetfill/external_denoiser.hpp"
#include "targetfill/png_io.hpp"

namespace targetfill::cli {
namespace {

double parse_number(const std::string& text, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw std::invalid_argument(std::string("invalid ") + what + " '" + text + "' in --denoiser");
    }
    return v;
}

}  // namespace

DenoiserSpec parse_denoiser_spec(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
        throw std::invalid_argument("--denoiser must look like oracle=PATH, gaussian=MU:SIGMA2 or external=CMD");
    }
    const std::string kind = text.substr(0, eq);
    const std::string value = text.substr(eq + 1);
    DenoiserSpec spec;
    if (kind == "oracle") {
        if (value.empty()) throw std::invalid_argument("oracle denoiser needs a reference PNG path");
        spec.kind = DenoiserSpec::Kind::oracle;
        spec.path = value;
    } else if (kind == "gaussian") {
        const auto colon = value.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("gaussian denoiser needs MU:SIGMA2");
        spec.kind = DenoiserSpec::Kind::gaussian;
        spec.mean = parse_number(value.substr(0, colon), "prior mean");
        spec.variance = parse_number(value.substr(colon + 1), "prior variance");
        if (spec.variance < 0.0) throw std::invalid_argument("gaussian prior variance must be >= 0");
    } else if (kind == "external") {
        spec.kind = DenoiserSpec::Kind::external;
        spec.command = split_command_line(value);
        if (spec.command.empty()) throw std::invalid_argument("external denoiser needs a command");
    } else {
        throw std::invalid_argument("unknown denoiser kind '" + kind + "'");
    }
    return spec;
}

void load_reference(DenoiserSpec& spec) {
    if (spec.kind == DenoiserSpec::Kind::oracle && !spec.reference) spec.reference = load_png(spec.path);
}

std::unique_ptr<Denoiser> make_denoiser(const DenoiserSpec& spec, const NoiseSchedule& sched, Shape shape) {
    switch (spec.kind) {
        case DenoiserSpec::Kind::oracle: {
            ImageTensor ref = spec.reference ? *spec.reference : load_png(spec.path);
            if (ref.channels() == 1 && shape.channels != 1) ref = broadcast_channels(ref, shape.channels);
            if (ref.shape() != shape) {
                throw std::invalid_argument("oracle reference " + spec.path + " is " + to_string(ref.shape())
                                            + " but the images are " + to_string(shape));
            }
            return std::make_unique<OracleDenoiser>(std::move(ref), sched);
        }
        case DenoiserSpec::Kind::gaussian:
            return std::make_unique<AnalyticGaussianDenoiser>(shape, spec.mean, spec.variance, sched);
        case DenoiserSpec::Kind::external:
            return external_handshake(WorkerOptions{spec.command, spec.timeout}, sched, shape);
    }
    throw std::logic_error("unreachable");
}

}  // namespace targetfill::cli
