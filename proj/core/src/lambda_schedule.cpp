// SPDX-License-Identifier: Apache-2.0

#include "targetfill/lambda_schedule.hpp"

#include <stdexcept>
#include <string>

namespace targetfill {

LambdaSchedule LambdaSchedule::constant(double lambda0) {
    if (!(lambda0 >= 0.0 && lambda0 <= 1.0)) {
        throw std::invalid_argument("lambda must be in [0, 1], got " + std::to_string(lambda0));
    }
    return LambdaSchedule(Kind::constant, lambda0, 0.0, 0);
}

LambdaSchedule LambdaSchedule::piecewise_linear(double knee, int timesteps) {
    if (!(knee >= 0.0 && knee <= 1.0)) {
        throw std::invalid_argument("lambda knee p must be in [0, 1], got " + std::to_string(knee));
    }
    if (timesteps < 1) throw std::invalid_argument("lambda schedule needs T >= 1");
    return LambdaSchedule(Kind::piecewise_linear, 1.0, knee, timesteps);
}

double LambdaSchedule::operator()(int t) const {
    if (kind_ == Kind::constant) return lambda0_;

    if (t < 0 || t > timesteps_) {
        throw std::invalid_argument("lambda evaluated at t=" + std::to_string(t) + " outside [0, "
                                    + std::to_string(timesteps_) + "]");
    }
    const double T = timesteps_;
    const double knee_t = knee_ * T;
    if (t <= knee_t) return 1.0;
    // knee_t < t <= T, so the interval is non-empty here.
    return (T - t) / (T - knee_t);
}

}  // namespace targetfill
