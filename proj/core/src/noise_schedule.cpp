// SPDX-License-Identifier: Apache-2.0

#include "targetfill/noise_schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace targetfill {
namespace {

constexpr int kBaseSteps = 1000;
constexpr double kBetaStart = 1e-4;
constexpr double kBetaEnd = 0.02;

void check_timestep(int t, int lo, int hi, const char* what) {
    if (t < lo || t > hi) {
        throw std::invalid_argument(std::string(what) + ": timestep " + std::to_string(t) + " outside ["
                                    + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

}  // namespace

NoiseSchedule NoiseSchedule::from_betas(std::vector<double> betas) {
    if (betas.empty()) throw std::invalid_argument("noise schedule needs at least one step");
    for (std::size_t i = 0; i < betas.size(); ++i) {
        const double b = betas[i];
        if (!(b > 0.0 && b < 1.0)) {
            throw std::invalid_argument("beta[" + std::to_string(i + 1) + "] = " + std::to_string(b)
                                        + " is outside (0, 1)");
        }
    }

    NoiseSchedule s;
    s.betas_ = std::move(betas);
    const std::size_t T = s.betas_.size();
    s.alpha_bar_.resize(T + 1);
    s.alpha_bar_[0] = 1.0;
    for (std::size_t t = 1; t <= T; ++t) s.alpha_bar_[t] = s.alpha_bar_[t - 1] * (1.0 - s.betas_[t - 1]);

    s.posterior_var_.resize(T);
    for (std::size_t t = 1; t <= T; ++t) {
        s.posterior_var_[t - 1] = (1.0 - s.alpha_bar_[t - 1]) / (1.0 - s.alpha_bar_[t]) * s.betas_[t - 1];
    }
    return s;
}

NoiseSchedule make_linear_schedule(int timesteps) {
    if (timesteps < 1 || timesteps > kBaseSteps) {
        throw std::invalid_argument("timesteps must be in [1, " + std::to_string(kBaseSteps) + "], got "
                                    + std::to_string(timesteps));
    }
    std::vector<double> base_abar(kBaseSteps + 1);
    base_abar[0] = 1.0;
    for (int i = 1; i <= kBaseSteps; ++i) {
        const double beta = kBetaStart + (kBetaEnd - kBetaStart) * (i - 1) / (kBaseSteps - 1);
        base_abar[i] = base_abar[i - 1] * (1.0 - beta);
    }

    std::vector<double> betas(static_cast<std::size_t>(timesteps));
    long prev = 0;
    for (int k = 1; k <= timesteps; ++k) {
        const long idx = std::lround(static_cast<double>(k) * kBaseSteps / timesteps);
        const double b = 1.0 - base_abar[static_cast<std::size_t>(idx)] / base_abar[static_cast<std::size_t>(prev)];
        betas[static_cast<std::size_t>(k) - 1] = static_cast<double>(static_cast<float>(b));
        prev = idx;
    }
    return NoiseSchedule::from_betas(std::move(betas));
}

ImageTensor forward_noise(const ImageTensor& x0, int t, const NoiseSchedule& sched, const Substream& sub) {
    check_timestep(t, 0, sched.timesteps(), "forward_noise");
    if (t == 0) return x0;

    const double mean_scale = std::sqrt(sched.alpha_bar(t));
    const double noise_scale = std::sqrt(1.0 - sched.alpha_bar(t));
    ImageTensor out(x0.shape());
    NormalStream noise(sub);
    auto src = x0.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = static_cast<float>(mean_scale * src[i] + noise_scale * noise.next());
    }
    return out;
}

ImageTensor renoise_one_step(const ImageTensor& x, int t, const NoiseSchedule& sched, const Substream& sub) {
    check_timestep(t, 1, sched.timesteps(), "renoise_one_step");

    const double keep = std::sqrt(1.0 - sched.beta(t));
    const double noise_scale = std::sqrt(sched.beta(t));
    ImageTensor out(x.shape());
    NormalStream noise(sub);
    auto src = x.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = static_cast<float>(keep * src[i] + noise_scale * noise.next());
    }
    return out;
}

}  // namespace targetfill
