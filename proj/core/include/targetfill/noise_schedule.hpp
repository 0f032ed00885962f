// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "targetfill/rng.hpp"
#include "targetfill/tensor.hpp"

namespace targetfill {

// Variance schedule for T diffusion steps. Timesteps are 1-based for beta,
// alpha and the posterior variance; alpha_bar is defined on 0..T with
// alpha_bar(0) == 1.
class NoiseSchedule {
public:
    // Builds every derived quantity from beta_1..beta_T. Each beta must lie
    // strictly inside (0, 1).
    static NoiseSchedule from_betas(std::vector<double> betas);

    int timesteps() const { return static_cast<int>(betas_.size()); }

    double beta(int t) const { return betas_.at(static_cast<std::size_t>(t) - 1); }
    double alpha(int t) const { return 1.0 - beta(t); }
    double alpha_bar(int t) const { return alpha_bar_.at(static_cast<std::size_t>(t)); }
    double posterior_variance(int t) const { return posterior_var_.at(static_cast<std::size_t>(t) - 1); }

    std::span<const double> betas() const { return betas_; }

private:
    NoiseSchedule() = default;

    std::vector<double> betas_;
    std::vector<double> alpha_bar_;
    std::vector<double> posterior_var_;
};

// Linear 1e-4..0.02 schedule over 1000 steps, respaced to `timesteps` evenly
// spaced indices ending at 1000. Betas are rounded to float32 so the schedule
// crosses the worker protocol without loss. Requires 1 <= timesteps <= 1000.
NoiseSchedule make_linear_schedule(int timesteps);

// Sample from q(x_t | x_0) = N(sqrt(abar_t) x0, (1 - abar_t) I). t == 0 returns x0.
ImageTensor forward_noise(const ImageTensor& x0, int t, const NoiseSchedule& sched, const Substream& sub);

// One forward transition q(x_t | x_{t-1}); requires 1 <= t <= T.
ImageTensor renoise_one_step(const ImageTensor& x, int t, const NoiseSchedule& sched, const Substream& sub);

}  // namespace targetfill
