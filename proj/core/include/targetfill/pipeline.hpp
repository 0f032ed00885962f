// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "targetfill/denoiser.hpp"
#include "targetfill/lambda_schedule.hpp"
#include "targetfill/mask.hpp"
#include "targetfill/tensor.hpp"

namespace targetfill {

enum class MaskMode { binary, heated, scene_buffer };
enum class RingSource { ddpm, lambda_blend };

const char* to_string(MaskMode mode);
const char* to_string(RingSource source);
MaskMode parse_mask_mode(const std::string& text);
RingSource parse_ring_source(const std::string& text);

struct SamplerConfig {
    int timesteps = 200;
    int jump = 40;
    int resample = 40;

    LambdaSchedule::Kind lambda_kind = LambdaSchedule::Kind::piecewise_linear;
    double lambda0 = 0.993;  // constant kind
    double knee = 0.5;       // piecewise kind

    MaskMode mask_mode = MaskMode::binary;
    int heat_buffer = 4;
    // Heated mode only: scale the heat by (1 - lambda_t) instead of using it alone.
    bool heat_with_lambda = false;
    int ring_width = 4;
    double buffer_blend = 0.993;  // c: denoiser weight inside the hole in scene-buffer mode
    RingSource ring_source = RingSource::ddpm;

    std::uint64_t seed = 0;
    int candidates = 1;

    // Throws std::invalid_argument describing the first out-of-range field.
    void validate() const;
    LambdaSchedule lambda_schedule() const;
};

// Hole pixels: lambda * repaint + (1 - lambda) * target. Scene pixels: scene.
ImageTensor compose_binary(const ImageTensor& scene_t, const ImageTensor& target_t, const ImageTensor& repaint_t,
                           const Mask& mask, double lambda);

// Hole pixels: w * target + (1 - w) * repaint with w = heat * target_scale.
// Scene pixels always take the scene value.
ImageTensor compose_heated(const ImageTensor& scene_t, const ImageTensor& target_t, const ImageTensor& repaint_t,
                           const Mask& mask, const HeatField& heat, double target_scale = 1.0);

// Hole pixels: c * repaint + (1 - c) * target. Ring pixels: repaint, or the
// lambda blend for RingSource::lambda_blend. Everything else: scene.
ImageTensor compose_scene_buffer(const ImageTensor& scene_t, const ImageTensor& target_t,
                                 const ImageTensor& repaint_t, const Mask& mask, const Indicator& ring, double c,
                                 double lambda, RingSource source);

// Full target-guided reverse process. scene, target and mask must share
// H x W; the denoiser must match the image shape and cfg.timesteps.
ImageTensor run(const ImageTensor& scene, const ImageTensor& target, const Mask& mask, const SamplerConfig& cfg,
                Denoiser& denoiser);

// `count` independent runs seeded cfg.seed + 0 ... cfg.seed + count - 1.
std::vector<ImageTensor> run_candidates(const ImageTensor& scene, const ImageTensor& target, const Mask& mask,
                                        const SamplerConfig& cfg, Denoiser& denoiser, int count);

}  // namespace targetfill
