// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace targetfill {

// One move of the reverse process. `to` is the timestep after the move.
struct Move {
    enum class Kind { down, up };
    Kind kind;
    int to;

    friend bool operator==(const Move&, const Move&) = default;
};

struct TimestepPlan {
    int start = 0;
    std::vector<Move> moves;

    std::vector<int> visited() const;
    std::size_t down_count() const;
    std::size_t up_count() const;
};

// Resampling plan: descend from T one step at a time. When a down move lands
// on an anchor t > 0 with t % jump == 0 that has been jumped from fewer than
// resample - 1 times, climb back up `jump` steps (capped at T) and descend
// again. Requires T, jump, resample >= 1.
TimestepPlan jump_plan(int timesteps, int jump, int resample);

// Number of denoiser evaluations (down moves) of jump_plan(T, j, r).
std::size_t denoiser_call_count(int timesteps, int jump, int resample);

}  // namespace targetfill
