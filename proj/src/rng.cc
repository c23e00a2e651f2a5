/*
 * Copyright 2026 The dpfed Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dpfed/rng.h"

#include <cmath>
#include <numbers>

namespace dpfed {
namespace {

constexpr uint32_t kPhiloxW32A = 0x9E3779B9;
constexpr uint32_t kPhiloxW32B = 0xBB67AE85;
constexpr uint32_t kPhiloxM4x32A = 0xD2511F53;
constexpr uint32_t kPhiloxM4x32B = 0xCD9E8D57;

uint64_t SplitMix(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = static_cast<uint64_t>(kPhiloxM4x32A) * counter[0];
    const uint64_t p1 = static_cast<uint64_t>(kPhiloxM4x32B) * counter[2];
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
    const uint32_t lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
    const uint32_t lo1 = static_cast<uint32_t>(p1);
    counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
    key[0] += kPhiloxW32A;
    key[1] += kPhiloxW32B;
  }
  return counter;
}

CounterStream::CounterStream(uint64_t seed, StreamPurpose purpose,
                             uint32_t client, uint32_t round)
    : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
      purpose_(static_cast<uint32_t>(purpose)),
      client_(client),
      round_(round) {}

std::array<uint32_t, 4> CounterStream::NextBlock() {
  // Block indices beyond 2^32 wrap into the purpose word's upper bits; no
  // run in this project draws anywhere near that many blocks per stream.
  const std::array<uint32_t, 4> counter = {
      static_cast<uint32_t>(block_), round_, client_,
      purpose_ ^ (static_cast<uint32_t>(block_ >> 32) << 8)};
  ++block_;
  return Philox4x32(counter, key_);
}

uint64_t CounterStream::NextU64() {
  if (has_spare_word_) {
    has_spare_word_ = false;
    return spare_word_;
  }
  const auto block = NextBlock();
  spare_word_ = (static_cast<uint64_t>(block[3]) << 32) | block[2];
  has_spare_word_ = true;
  return (static_cast<uint64_t>(block[1]) << 32) | block[0];
}

double CounterStream::NextUniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double CounterStream::NextUniformPositive() {
  return (static_cast<double>(NextU64() >> 11) + 1.0) * 0x1.0p-53;
}

double CounterStream::NextNormal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const auto block = NextBlock();
  const uint64_t w0 = (static_cast<uint64_t>(block[1]) << 32) | block[0];
  const uint64_t w1 = (static_cast<uint64_t>(block[3]) << 32) | block[2];
  const double u1 = (static_cast<double>(w0 >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(w1 >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_normal_ = true;
  return radius * std::cos(angle);
}

uint64_t MixSeed(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t h = SplitMix(seed);
  h = SplitMix(h ^ a);
  h = SplitMix(h ^ b);
  return SplitMix(h ^ c);
}

}  // namespace dpfed
