// SPDX-License-Identifier: Apache-2.0

#include "targetfill/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "targetfill/errors.hpp"
#include "targetfill/noise_schedule.hpp"
#include "targetfill/rng.hpp"
#include "targetfill/timestep_plan.hpp"

namespace targetfill {
namespace {

// weight * a + (1 - weight) * b, exact at the endpoints and never outside [min(a,b), max(a,b)].
inline float blend(float a, float b, double weight) {
    if (weight == 1.0) return a;
    if (weight == 0.0) return b;
    const auto v = static_cast<float>(weight * a + (1.0 - weight) * b);
    return std::clamp(v, std::min(a, b), std::max(a, b));
}

void check_sources(const ImageTensor& scene_t, const ImageTensor& target_t, const ImageTensor& repaint_t,
                   const Mask& mask) {
    if (scene_t.shape() != target_t.shape() || scene_t.shape() != repaint_t.shape()) {
        throw std::invalid_argument("compose: source shapes differ (" + to_string(scene_t.shape()) + ", "
                                    + to_string(target_t.shape()) + ", " + to_string(repaint_t.shape()) + ")");
    }
    if (mask.height() != scene_t.height() || mask.width() != scene_t.width()) {
        throw std::invalid_argument("compose: mask is " + std::to_string(mask.height()) + "x"
                                    + std::to_string(mask.width()) + " but images are " + to_string(scene_t.shape()));
    }
}

void check_weight(double w, const char* name) {
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument(std::string(name) + " must be in [0, 1]");
}

// Calls pick(y, x) -> value source for each pixel across all channels.
template <typename Pixel>
ImageTensor compose_each(const ImageTensor& like, Pixel&& pixel) {
    ImageTensor out(like.shape());
    for (int c = 0; c < like.channels(); ++c) {
        for (int y = 0; y < like.height(); ++y) {
            for (int x = 0; x < like.width(); ++x) out.at(c, y, x) = pixel(c, y, x);
        }
    }
    return out;
}

}  // namespace

const char* to_string(MaskMode mode) {
    switch (mode) {
        case MaskMode::binary: return "binary";
        case MaskMode::heated: return "heated";
        case MaskMode::scene_buffer: return "scene-buffer";
    }
    return "?";
}

const char* to_string(RingSource source) {
    return source == RingSource::ddpm ? "ddpm" : "lambda-blend";
}

MaskMode parse_mask_mode(const std::string& text) {
    if (text == "binary") return MaskMode::binary;
    if (text == "heated") return MaskMode::heated;
    if (text == "scene-buffer") return MaskMode::scene_buffer;
    throw std::invalid_argument("unknown mask mode '" + text + "' (binary, heated, scene-buffer)");
}

RingSource parse_ring_source(const std::string& text) {
    if (text == "ddpm") return RingSource::ddpm;
    if (text == "lambda-blend") return RingSource::lambda_blend;
    throw std::invalid_argument("unknown ring source '" + text + "' (ddpm, lambda-blend)");
}

void SamplerConfig::validate() const {
    if (timesteps < 1 || timesteps > 1000) throw std::invalid_argument("timesteps must be in [1, 1000]");
    if (jump < 1) throw std::invalid_argument("jump length must be >= 1");
    if (resample < 1) throw std::invalid_argument("resample count must be >= 1");
    if (lambda_kind == LambdaSchedule::Kind::constant) check_weight(lambda0, "lambda");
    else check_weight(knee, "lambda knee p");
    if (heat_buffer < 1) throw std::invalid_argument("heat buffer size b must be >= 1");
    if (ring_width < 0) throw std::invalid_argument("ring width must be >= 0");
    check_weight(buffer_blend, "scene-buffer constant c");
    if (candidates < 1) throw std::invalid_argument("candidate count must be >= 1");
}

LambdaSchedule SamplerConfig::lambda_schedule() const {
    return lambda_kind == LambdaSchedule::Kind::constant ? LambdaSchedule::constant(lambda0)
                                                         : LambdaSchedule::piecewise_linear(knee, timesteps);
}

ImageTensor compose_binary(const ImageTensor& scene_t, const ImageTensor& target_t, const ImageTensor& repaint_t,
                           const Mask& mask, double lambda) {
    check_sources(scene_t, target_t, repaint_t, mask);
    check_weight(lambda, "lambda");
    return compose_each(scene_t, [&](int c, int y, int x) {
        return mask.is_scene(y, x) ? scene_t.at(c, y, x) : blend(repaint_t.at(c, y, x), target_t.at(c, y, x), lambda);
    });
}

ImageTensor compose_heated(const ImageTensor& scene_t, const ImageTensor& target_t, const ImageTensor& repaint_t,
                           const Mask& mask, const HeatField& heat, double target_scale) {
    check_sources(scene_t, target_t, repaint_t, mask);
    check_weight(target_scale, "heat scale");
    if (heat.height != mask.height() || heat.width != mask.width()) {
        throw std::invalid_argument("compose_heated: heat field does not match the mask");
    }
    return compose_each(scene_t, [&](int c, int y, int x) {
        if (mask.is_scene(y, x)) return scene_t.at(c, y, x);
        const double w = target_scale == 1.0 ? heat.at(y, x) : heat.at(y, x) * target_scale;
        return blend(target_t.at(c, y, x), repaint_t.at(c, y, x), w);
    });
}

ImageTensor compose_scene_buffer(const ImageTensor& scene_t, const ImageTensor& target_t,
                                 const ImageTensor& repaint_t, const Mask& mask, const Indicator& ring, double c,
                                 double lambda, RingSource source) {
    check_sources(scene_t, target_t, repaint_t, mask);
    check_weight(c, "scene-buffer constant c");
    check_weight(lambda, "lambda");
    if (ring.height() != mask.height() || ring.width() != mask.width()) {
        throw std::invalid_argument("compose_scene_buffer: ring does not match the mask");
    }
    return compose_each(scene_t, [&](int ch, int y, int x) {
        if (mask.is_hole(y, x)) {
            if (ring.at(y, x)) throw std::invalid_argument("compose_scene_buffer: ring overlaps the hole");
            return blend(repaint_t.at(ch, y, x), target_t.at(ch, y, x), c);
        }
        if (ring.at(y, x)) {
            return source == RingSource::ddpm ? repaint_t.at(ch, y, x)
                                              : blend(repaint_t.at(ch, y, x), target_t.at(ch, y, x), lambda);
        }
        return scene_t.at(ch, y, x);
    });
}

ImageTensor run(const ImageTensor& scene, const ImageTensor& target, const Mask& mask, const SamplerConfig& cfg,
                Denoiser& denoiser) {
    cfg.validate();
    if (scene.shape() != target.shape()) {
        throw std::invalid_argument("scene " + to_string(scene.shape()) + " and target " + to_string(target.shape())
                                    + " differ in shape");
    }
    if (mask.height() != scene.height() || mask.width() != scene.width()) {
        throw std::invalid_argument("mask size does not match the scene");
    }
    if (denoiser.shape() != scene.shape()) {
        throw std::invalid_argument("denoiser accepts " + to_string(denoiser.shape()) + " but images are "
                                    + to_string(scene.shape()));
    }
    if (denoiser.timesteps() != cfg.timesteps) {
        throw std::invalid_argument("denoiser was built for T=" + std::to_string(denoiser.timesteps())
                                    + " but the run uses T=" + std::to_string(cfg.timesteps));
    }
    if (mask.all_hole() && cfg.mask_mode != MaskMode::binary) {
        throw std::invalid_argument(std::string("an all-hole mask is only valid in binary mode, not ")
                                    + to_string(cfg.mask_mode));
    }
    if (!scene.all_finite() || !target.all_finite()) throw std::invalid_argument("input images must be finite");

    const NoiseSchedule sched = make_linear_schedule(cfg.timesteps);
    const TimestepPlan plan = jump_plan(cfg.timesteps, cfg.jump, cfg.resample);
    const LambdaSchedule lambda = cfg.lambda_schedule();

    HeatField heat;
    Indicator ring_pixels;
    if (cfg.mask_mode == MaskMode::heated) heat = heated_mask(mask, cfg.heat_buffer);
    if (cfg.mask_mode == MaskMode::scene_buffer) ring_pixels = ring(mask, cfg.ring_width);

    SeededRng rng(cfg.seed);
    ImageTensor x = gaussian_draw(scene.shape(), rng.next("init", plan.start));
    int t = plan.start;

    for (const Move& move : plan.moves) {
        if (move.kind == Move::Kind::up) {
            x = renoise_one_step(x, move.to, sched, rng.next("resample", move.to));
            t = move.to;
            continue;
        }

        const int dest = move.to;
        const ImageTensor scene_t = forward_noise(scene, dest, sched, rng.next("scene", dest));
        const ImageTensor target_t = forward_noise(target, dest, sched, rng.next("target", dest));
        ImageTensor repaint_t;
        try {
            repaint_t = reverse_step(denoiser, x, t, sched, rng.next("ddpm", t));
        } catch (const std::exception& e) {
            throw BackendError("denoiser failed at t=" + std::to_string(t) + ": " + e.what());
        }
        const double lam = lambda(dest);

        switch (cfg.mask_mode) {
            case MaskMode::binary:
                x = compose_binary(scene_t, target_t, repaint_t, mask, lam);
                break;
            case MaskMode::heated:
                x = compose_heated(scene_t, target_t, repaint_t, mask, heat, cfg.heat_with_lambda ? 1.0 - lam : 1.0);
                break;
            case MaskMode::scene_buffer:
                x = compose_scene_buffer(scene_t, target_t, repaint_t, mask, ring_pixels, cfg.buffer_blend, lam,
                                         cfg.ring_source);
                break;
        }
        t = dest;
    }
    return x;
}

std::vector<ImageTensor> run_candidates(const ImageTensor& scene, const ImageTensor& target, const Mask& mask,
                                        const SamplerConfig& cfg, Denoiser& denoiser, int count) {
    if (count < 1) throw std::invalid_argument("candidate count must be >= 1");
    std::vector<ImageTensor> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        SamplerConfig c = cfg;
        c.seed = cfg.seed + static_cast<std::uint64_t>(i);
        out.push_back(run(scene, target, mask, c, denoiser));
    }
    return out;
}

}  // namespace targetfill
