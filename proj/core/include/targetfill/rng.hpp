// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <utility>

#include "targetfill/tensor.hpp"

namespace targetfill {

// Stable 64-bit id for a purpose label ("scene", "target", "ddpm", ...).
std::uint64_t purpose_id(std::string_view label);

// Coordinates of one independent noise stream. Every draw is a pure function
// of these four values.
struct Substream {
    std::uint64_t seed = 0;
    std::uint64_t purpose = 0;
    int timestep = 0;
    std::uint64_t counter = 0;

    std::uint64_t key() const;
};

// Counter-based generator of standard normals for one substream.
class NormalStream {
public:
    explicit NormalStream(const Substream& sub);

    double next();

private:
    std::uint64_t next_bits();

    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Hands out substreams keyed by (seed, purpose, timestep, visit counter).
// Owned by a single run; not thread-safe.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Returns the next unused substream for (purpose, t) and bumps its counter.
    Substream next(std::string_view purpose, int timestep);

    // Peek without consuming.
    Substream peek(std::string_view purpose, int timestep) const;

private:
    std::uint64_t seed_;
    std::map<std::pair<std::uint64_t, int>, std::uint64_t> counters_;
};

void fill_gaussian(std::span<float> out, const Substream& sub);

// iid standard normal tensor drawn from `sub`.
ImageTensor gaussian_draw(Shape shape, const Substream& sub);

}  // namespace targetfill
