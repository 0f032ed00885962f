// SPDX-License-Identifier: Apache-2.0

#include "targetfill/timestep_plan.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace targetfill {

std::vector<int> TimestepPlan::visited() const {
    std::vector<int> out;
    out.reserve(moves.size());
    for (const auto& m : moves) out.push_back(m.to);
    return out;
}

std::size_t TimestepPlan::down_count() const {
    return static_cast<std::size_t>(
        std::count_if(moves.begin(), moves.end(), [](const Move& m) { return m.kind == Move::Kind::down; }));
}

std::size_t TimestepPlan::up_count() const { return moves.size() - down_count(); }

TimestepPlan jump_plan(int timesteps, int jump, int resample) {
    if (timesteps < 1 || jump < 1 || resample < 1) {
        throw std::invalid_argument("jump_plan needs T, j, r >= 1 (got T=" + std::to_string(timesteps)
                                    + ", j=" + std::to_string(jump) + ", r=" + std::to_string(resample) + ")");
    }
    TimestepPlan plan;
    plan.start = timesteps;

    std::vector<int> jumps_taken(static_cast<std::size_t>(timesteps) + 1, 0);
    int t = timesteps;
    while (t > 0) {
        --t;
        plan.moves.push_back({Move::Kind::down, t});
        if (t > 0 && t % jump == 0 && jumps_taken[static_cast<std::size_t>(t)] < resample - 1) {
            ++jumps_taken[static_cast<std::size_t>(t)];
            const int top = std::min(t + jump, timesteps);
            while (t < top) {
                ++t;
                plan.moves.push_back({Move::Kind::up, t});
            }
        }
    }
    return plan;
}

std::size_t denoiser_call_count(int timesteps, int jump, int resample) {
    return jump_plan(timesteps, jump, resample).down_count();
}

}  // namespace targetfill
