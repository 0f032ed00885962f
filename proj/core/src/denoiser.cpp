// SPDX-License-Identifier: Apache-2.0

#include "targetfill/denoiser.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "targetfill/errors.hpp"

namespace targetfill {

ImageTensor Denoiser::predict_epsilon(const ImageTensor& x_t, int t) {
    if (t < 1 || t > timesteps()) {
        throw std::invalid_argument("predict_epsilon: timestep " + std::to_string(t) + " outside [1, "
                                    + std::to_string(timesteps()) + "]");
    }
    if (x_t.shape() != shape()) {
        throw std::invalid_argument("predict_epsilon: input shape " + to_string(x_t.shape())
                                    + " does not match denoiser shape " + to_string(shape()));
    }
    ImageTensor eps = predict(x_t, t);
    if (eps.shape() != x_t.shape()) {
        throw BackendError("denoiser returned shape " + to_string(eps.shape()) + " for input "
                           + to_string(x_t.shape()));
    }
    if (!eps.all_finite()) throw BackendError("denoiser returned non-finite values");
    return eps;
}

OracleDenoiser::OracleDenoiser(ImageTensor reference, NoiseSchedule sched)
    : reference_(std::move(reference)), sched_(std::move(sched)) {
    if (reference_.empty()) throw std::invalid_argument("oracle denoiser needs a reference image");
}

ImageTensor OracleDenoiser::predict(const ImageTensor& x_t, int t) {
    const double signal = std::sqrt(sched_.alpha_bar(t));
    const double noise = std::sqrt(1.0 - sched_.alpha_bar(t));
    ImageTensor eps(x_t.shape());
    auto x = x_t.values();
    auto ref = reference_.values();
    auto out = eps.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<float>((static_cast<double>(x[i]) - signal * ref[i]) / noise);
    }
    return eps;
}

AnalyticGaussianDenoiser::AnalyticGaussianDenoiser(Shape shape, double prior_mean, double prior_variance,
                                                   NoiseSchedule sched)
    : shape_(shape), prior_mean_(prior_mean), prior_variance_(prior_variance), sched_(std::move(sched)) {
    if (shape.size() == 0) throw std::invalid_argument("analytic denoiser needs a non-empty shape");
    if (!(prior_variance >= 0.0) || !std::isfinite(prior_mean)) {
        throw std::invalid_argument("analytic denoiser needs finite mean and variance >= 0");
    }
}

double AnalyticGaussianDenoiser::posterior_mean(double x_t, int t) const {
    const double abar = sched_.alpha_bar(t);
    return ((1.0 - abar) * prior_mean_ + std::sqrt(abar) * prior_variance_ * x_t)
           / ((1.0 - abar) + abar * prior_variance_);
}

ImageTensor AnalyticGaussianDenoiser::predict(const ImageTensor& x_t, int t) {
    const double signal = std::sqrt(sched_.alpha_bar(t));
    const double noise = std::sqrt(1.0 - sched_.alpha_bar(t));
    ImageTensor eps(x_t.shape());
    auto x = x_t.values();
    auto out = eps.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double xi = x[i];
        out[i] = static_cast<float>((xi - signal * posterior_mean(xi, t)) / noise);
    }
    return eps;
}

ImageTensor reverse_step(Denoiser& denoiser, const ImageTensor& x_t, int t, const NoiseSchedule& sched,
                         const Substream& sub) {
    if (t < 1 || t > sched.timesteps()) {
        throw std::invalid_argument("reverse_step: timestep " + std::to_string(t) + " outside [1, "
                                    + std::to_string(sched.timesteps()) + "]");
    }
    const ImageTensor eps = denoiser.predict_epsilon(x_t, t);

    const double eps_scale = sched.beta(t) / std::sqrt(1.0 - sched.alpha_bar(t));
    const double inv_sqrt_alpha = 1.0 / std::sqrt(sched.alpha(t));
    const double sigma = std::sqrt(sched.posterior_variance(t));

    ImageTensor out(x_t.shape());
    auto x = x_t.values();
    auto e = eps.values();
    auto dst = out.values();
    if (sigma == 0.0) {
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = static_cast<float>((x[i] - eps_scale * e[i]) * inv_sqrt_alpha);
        }
    } else {
        NormalStream noise(sub);
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = static_cast<float>((x[i] - eps_scale * e[i]) * inv_sqrt_alpha + sigma * noise.next());
        }
    }
    return out;
}

}  // namespace targetfill
