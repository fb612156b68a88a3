// SPDX-License-Identifier: Apache-2.0
//
// raysim: ray antenna array simulator for OFDM sensing and communication
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef raysim_rng_H
#define raysim_rng_H

#include <cstdint>
#include <random>

namespace raysim
{

// Stateless seed mixer (splitmix64). Used to derive independent,
// reproducible sub-streams from a master seed, e.g. one stream per
// tensor slice or per Monte-Carlo trial, so that parallel and serial
// execution produce bit-identical results.
inline std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
    return mix_seed(a ^ mix_seed(b));
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c)
{
    return mix_seed(mix_seed(a, b) ^ mix_seed(c + 0x632be59bd9b4e019ULL));
}

// Engine seeded from a mixed sub-stream id.
inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t stream_id)
{
    return std::mt19937_64(mix_seed(master, stream_id));
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b)
{
    return std::mt19937_64(mix_seed(master, a, b));
}

} // namespace raysim

#endif
