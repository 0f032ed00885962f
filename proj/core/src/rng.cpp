// SPDX-License-Identifier: Apache-2.0

#include "targetfill/rng.hpp"

#include <cmath>

namespace targetfill {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t purpose_id(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : label) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t Substream::key() const {
    std::uint64_t k = mix64(seed + kGolden);
    k = mix64(k ^ purpose);
    k = mix64(k ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(timestep)) + kGolden));
    k = mix64(k ^ (counter * kGolden + 1));
    return k;
}

NormalStream::NormalStream(const Substream& sub) : state_(sub.key()) {}

std::uint64_t NormalStream::next_bits() {
    state_ += kGolden;
    return mix64(state_);
}

// Marsaglia polar method; uniforms come from the top 53 bits.
double NormalStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * static_cast<double>(next_bits() >> 11) * kScale - 1.0;
        v = 2.0 * static_cast<double>(next_bits() >> 11) * kScale - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

Substream SeededRng::next(std::string_view purpose, int timestep) {
    const auto id = purpose_id(purpose);
    auto& counter = counters_[{id, timestep}];
    Substream sub{seed_, id, timestep, counter};
    ++counter;
    return sub;
}

Substream SeededRng::peek(std::string_view purpose, int timestep) const {
    const auto id = purpose_id(purpose);
    auto it = counters_.find({id, timestep});
    return Substream{seed_, id, timestep, it == counters_.end() ? 0 : it->second};
}

void fill_gaussian(std::span<float> out, const Substream& sub) {
    NormalStream stream(sub);
    for (auto& v : out) v = static_cast<float>(stream.next());
}

ImageTensor gaussian_draw(Shape shape, const Substream& sub) {
    ImageTensor out(shape);
    fill_gaussian(out.values(), sub);
    return out;
}

}  // namespace targetfill
