#pragma once

// Counter-based randomness. A draw is a pure function of (seed, stream, a, b),
// so the coin for node pair (i, j) does not depend on iteration order or on
// how work is split across threads.

#include <cstdint>
#include <random>

namespace dcmm {

struct SampleSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const SampleSeed&, const SampleSeed&) = default;
};

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x);

// Keyed hash of a (seed, stream, a, b) tuple.
std::uint64_t counter_hash(const SampleSeed& key, std::uint64_t a, std::uint64_t b);

// Uniform on [0, 1) with 53 random bits.
double counter_uniform(const SampleSeed& key, std::uint64_t a, std::uint64_t b);

// Child key for a named sub-stream, e.g. derive(base, cell, trial).
SampleSeed derive(const SampleSeed& parent, std::uint64_t a, std::uint64_t b = 0);

// Sequential engine for algorithms that consume an unknown number of draws
// (k-means++ seeding, packing search). Seeded from the counter hash.
std::mt19937_64 make_engine(const SampleSeed& key, std::uint64_t purpose);

}  // namespace dcmm
