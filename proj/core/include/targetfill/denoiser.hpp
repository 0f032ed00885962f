// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "targetfill/noise_schedule.hpp"
#include "targetfill/rng.hpp"
#include "targetfill/tensor.hpp"

namespace targetfill {

// Noise-prediction model eps(x_t, t). Implementations are deterministic in
// (x_t, t); the engine owns all sampling randomness.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    virtual Shape shape() const = 0;
    virtual int timesteps() const = 0;

    // Checks 1 <= t <= T and the input shape, then validates that the
    // backend returned a finite tensor of the same shape.
    ImageTensor predict_epsilon(const ImageTensor& x_t, int t);

protected:
    virtual ImageTensor predict(const ImageTensor& x_t, int t) = 0;
};

// Inverts the forward identity for a known clean image:
// eps = (x_t - sqrt(abar_t) x_ref) / sqrt(1 - abar_t).
class OracleDenoiser final : public Denoiser {
public:
    OracleDenoiser(ImageTensor reference, NoiseSchedule sched);

    Shape shape() const override { return reference_.shape(); }
    int timesteps() const override { return sched_.timesteps(); }
    const ImageTensor& reference() const { return reference_; }

protected:
    ImageTensor predict(const ImageTensor& x_t, int t) override;

private:
    ImageTensor reference_;
    NoiseSchedule sched_;
};

// Exact noise prediction when every pixel is iid N(mean, variance) a priori.
class AnalyticGaussianDenoiser final : public Denoiser {
public:
    AnalyticGaussianDenoiser(Shape shape, double prior_mean, double prior_variance, NoiseSchedule sched);

    Shape shape() const override { return shape_; }
    int timesteps() const override { return sched_.timesteps(); }

    // E[x0 | x_t] for a single pixel value.
    double posterior_mean(double x_t, int t) const;

protected:
    ImageTensor predict(const ImageTensor& x_t, int t) override;

private:
    Shape shape_;
    double prior_mean_;
    double prior_variance_;
    NoiseSchedule sched_;
};

// Ancestral DDPM step x_t -> x_{t-1} with the fixed posterior variance
// beta_tilde_t. The noise term vanishes at t = 1.
ImageTensor reverse_step(Denoiser& denoiser, const ImageTensor& x_t, int t, const NoiseSchedule& sched,
                         const Substream& sub);

}  // namespace targetfill
