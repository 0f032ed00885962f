// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace targetfill {

// Blend weight toward the denoiser output inside the hole, per timestep.
class LambdaSchedule {
public:
    enum class Kind { constant, piecewise_linear };

    static LambdaSchedule constant(double lambda0);
    // 1 for t <= knee*T, then linear down to 0 at t = T.
    static LambdaSchedule piecewise_linear(double knee, int timesteps);

    Kind kind() const { return kind_; }
    double lambda0() const { return lambda0_; }
    double knee() const { return knee_; }
    int timesteps() const { return timesteps_; }

    double operator()(int t) const;

private:
    LambdaSchedule(Kind kind, double lambda0, double knee, int timesteps)
        : kind_(kind), lambda0_(lambda0), knee_(knee), timesteps_(timesteps) {}

    Kind kind_;
    double lambda0_;
    double knee_;
    int timesteps_;
};

}  // namespace targetfill
