#include "dcmm/rng.hpp"

namespace dcmm {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t counter_hash(const SampleSeed& key, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = mix64(key.seed);
  h = mix64(h ^ (key.stream * 0xd1b54a32d192ed03ULL));
  h = mix64(h ^ (a * 0xaef17502108ef2d9ULL));
  h = mix64(h ^ (b * 0xf39cc0605cedc835ULL));
  return h;
}

double counter_uniform(const SampleSeed& key, std::uint64_t a, std::uint64_t b) {
  return static_cast<double>(counter_hash(key, a, b) >> 11) * 0x1.0p-53;
}

SampleSeed derive(const SampleSeed& parent, std::uint64_t a, std::uint64_t b) {
  return SampleSeed{counter_hash(parent, a, b), mix64(parent.stream ^ 0x5851f42d4c957f2dULL)};
}

std::mt19937_64 make_engine(const SampleSeed& key, std::uint64_t purpose) {
  return std::mt19937_64(counter_hash(key, purpose, 0x6a09e667f3bcc909ULL));
}

}  // namespace dcmm
