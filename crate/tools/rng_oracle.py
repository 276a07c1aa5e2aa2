#!/usr/bin/env python3
"""Reference oracle for the simulation RNG stream.

Recomputes, independently of the Rust implementation, the SplitMix64
uniform stream and the Box-Muller gaussians derived from it, then the
first simulated (s_text, s_image, s_multi) triples for a given seed and
fusion config. Used to freeze expected constants in the test suite.

Usage: python3 tools/rng_oracle.py [seed]
"""

import math
import sys

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
TWO_NEG_53 = 2.0 ** -53


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK

    def next_u64(self):
        self.state = (self.state + GAMMA) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def next_uniform(self):
        return (self.next_u64() >> 11) * TWO_NEG_53


class RandomSource:
    """Uniform + gaussian draws over one SplitMix64 stream.

    Box-Muller: each pair of uniforms yields two deviates; the cosine
    deviate is returned first and the sine deviate is cached.
    """

    def __init__(self, seed):
        self.rng = SplitMix64(seed)
        self.spare = None

    def next_uniform(self):
        return self.rng.next_uniform()

    def next_gaussian(self):
        if self.spare is not None:
            z, self.spare = self.spare, None
            return z
        u1 = self.rng.next_uniform()
        if u1 == 0.0:
            u1 = TWO_NEG_53
        u2 = self.rng.next_uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        theta = math.tau * u2
        self.spare = r * math.sin(theta)
        return r * math.cos(theta)


def simulate(seed, entries, w_text, sigma, lo, hi):
    src = RandomSource(seed)
    out = []
    for _ in range(entries):
        s_text = lo + src.next_uniform() * (hi - lo)
        s_image = lo + src.next_uniform() * (hi - lo)
        z = src.next_gaussian()
        convex = w_text * s_text + (1.0 - w_text) * s_image
        band_lo, band_hi = min(s_text, s_image), max(s_text, s_image)
        convex = min(max(convex, band_lo), band_hi)
        s_multi = min(max(convex + sigma * z, 0.0), 1.0)
        out.append((s_text, s_image, s_multi))
    return out


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 42

    print("# raw u64 outputs, seed = 0")
    rng = SplitMix64(0)
    for _ in range(3):
        print(f"0x{rng.next_u64():016X}")

    print(f"# first uniforms, seed = {seed}")
    rng = SplitMix64(seed)
    for _ in range(4):
        print(repr(rng.next_uniform()))

    print(f"# first gaussians, seed = {seed}")
    src = RandomSource(seed)
    for _ in range(3):
        print(repr(src.next_gaussian()))

    print(f"# first 3 simulated triples, seed = {seed}, w_text = 0.5,"
          " sigma = 0.05, ranges [0.3, 1.0]")
    for t in simulate(seed, 3, 0.5, 0.05, 0.3, 1.0):
        print(", ".join(repr(v) for v in t))

    print(f"# gaussian moments over 1e6 draws, seed = {seed}")
    src = RandomSource(seed)
    n = 1_000_000
    total = 0.0
    total_sq = 0.0
    for _ in range(n):
        z = src.next_gaussian()
        total += z
        total_sq += z * z
    mean = total / n
    var = total_sq / n - mean * mean
    print(f"mean = {mean!r}")
    print(f"var  = {var!r}")


if __name__ == "__main__":
    main()
