// Copyright 2026 The bvsp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small string helpers shared across modules.

#ifndef BVSP_TEXT_H_
#define BVSP_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bvsp {

// Trims the ends and collapses every internal whitespace run to one space.
std::string NormalizeWhitespace(std::string_view s);

// ASCII lowercase; bytes outside A-Z are left untouched.
std::string AsciiLower(std::string_view s);

std::string_view Trim(std::string_view s);

std::vector<std::string> SplitWhitespace(std::string_view s);

bool IsSpace(char c);

// 64-bit FNV-1a. Stable across platforms and standard libraries, unlike
// std::hash, so it is safe to derive seeds and biases from it.
std::uint64_t Fnv1a64(std::string_view s,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

// splitmix64 finalizer, used to decorrelate combined seeds.
std::uint64_t Mix64(std::uint64_t x);

// Maps a 64-bit hash to [0, 1) using the top 53 bits.
double HashToUnit(std::uint64_t h);

// Number of non-overlapping occurrences of `needle` in `haystack`.
std::size_t CountOccurrences(std::string_view haystack, std::string_view needle);

}  // namespace bvsp

#endif  // BVSP_TEXT_H_
