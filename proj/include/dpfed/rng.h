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

#ifndef DPFED_RNG_H_
#define DPFED_RNG_H_

#include <array>
#include <cstdint>

namespace dpfed {

// Philox4x32-10 block function (Salmon et al., SC'11). Maps a 128-bit
// counter under a 64-bit key to 128 pseudo-random bits.
std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// What a stream is used for. Part of the counter, so streams with different
// purposes never overlap.
enum class StreamPurpose : uint32_t {
  kNoise = 1,
  kCoin = 2,
  kBatch = 3,
  kGenerator = 4,
  kTest = 5,
};

// A value-semantic random stream keyed by (seed, purpose, client, round).
// The position inside the stream is the Philox block index, so copying a
// stream and drawing from both copies yields identical values.
class CounterStream {
 public:
  CounterStream(uint64_t seed, StreamPurpose purpose, uint32_t client,
                uint32_t round);

  // Uniform double in [0, 1) with 53 random bits.
  double NextUniform();
  // Uniform double in (0, 1], never exactly zero.
  double NextUniformPositive();
  // Standard normal via Box-Muller. Normals are produced in pairs from one
  // Philox block; the second of the pair is cached.
  double NextNormal();
  uint64_t NextU64();

  uint64_t blocks_consumed() const { return block_; }

 private:
  std::array<uint32_t, 4> NextBlock();

  std::array<uint32_t, 2> key_;
  uint32_t purpose_;
  uint32_t client_;
  uint32_t round_;
  uint64_t block_ = 0;
  // Leftover 64-bit word from the last block used by NextU64.
  bool has_spare_word_ = false;
  uint64_t spare_word_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// SplitMix64-style mixing of a sequence of integers into one 64-bit seed.
// Used to derive independent per-cell / per-replication master seeds.
uint64_t MixSeed(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0);

}  // namespace dpfed

#endif  // DPFED_RNG_H_
