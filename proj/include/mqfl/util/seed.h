/*
 * Copyright 2026 The MQFL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MQFL_UTIL_SEED_H_
#define MQFL_UTIL_SEED_H_

#include <cstdint>
#include <initializer_list>

namespace mqfl::util {

// splitmix64 finalizer.
inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream seed for a path of tags under a root seed.
inline uint64_t DeriveSeed(uint64_t seed, std::initializer_list<uint64_t> path) {
  uint64_t h = SplitMix64(seed);
  for (uint64_t p : path) h = SplitMix64(h ^ SplitMix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace mqfl::util

#endif  // MQFL_UTIL_SEED_H_
