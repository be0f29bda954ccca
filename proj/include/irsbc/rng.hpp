// SPDX-License-Identifier: Apache-2.0
//
// irsbc - joint beamforming and IRS phase-shift optimization for bistatic
// backscatter networks.
// Copyright (c) 2026 irsbc contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace irsbc {

/// xoshiro256++ with splitmix64 seeding. Self-contained so that streams are
/// bit-reproducible across standard library implementations. fork(label)
/// derives an independent child stream without disturbing the parent.
class Rng {
  public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& si : s_) si = splitmix64(x);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (no state cached; two uniforms per draw).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Circularly symmetric complex normal with E|x|^2 = 1.
    std::complex<double> cnormal() {
        const double inv_sqrt2 = 0.70710678118654752440;
        return {normal() * inv_sqrt2, normal() * inv_sqrt2};
    }

    /// Independent child stream derived from the parent state and a label.
    Rng fork(uint64_t label) const {
        uint64_t x = s_[0] ^ rotl(s_[2], 17) ^ (label * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL);
        Rng child(0);
        for (auto& si : child.s_) si = splitmix64(x);
        return child;
    }

    static uint64_t mix(uint64_t a, uint64_t b) {
        uint64_t x = a ^ (b * 0x9e3779b97f4a7c15ULL + 0xbf58476d1ce4e5b9ULL);
        return splitmix64(x);
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t s_[4];
};

}  // namespace irsbc
