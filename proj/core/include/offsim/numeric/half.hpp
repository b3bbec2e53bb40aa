/* Copyright 2026 The Offsim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <bit>
#include <cstdint>

namespace offsim {

// IEEE binary16 stored as raw bits. Conversions round to nearest even and
// handle subnormals, infinities and NaN; no arithmetic is defined on Half,
// the working copy is storage only.
class Half {
 public:
  Half() = default;

  static Half from_bits(std::uint16_t bits) {
    Half h;
    h.bits_ = bits;
    return h;
  }

  static Half from_float(float value) {
    const std::uint32_t f32infty = 255u << 23;
    const std::uint32_t f16max = (127u + 16u) << 23;
    const std::uint32_t denorm_magic = ((127u - 15u) + (23u - 10u) + 1u) << 23;
    const std::uint32_t sign_mask = 0x80000000u;

    std::uint32_t f = std::bit_cast<std::uint32_t>(value);
    const std::uint32_t sign = f & sign_mask;
    f ^= sign;

    std::uint16_t o;
    if (f >= f16max) {
      o = (f > f32infty) ? 0x7e00 : 0x7c00;  // NaN -> qNaN, overflow -> inf
    } else if (f < (113u << 23)) {
      // Subnormal target: the magic addition aligns the 10 mantissa bits and
      // rounds to nearest even in one float add.
      const float aligned =
          std::bit_cast<float>(f) + std::bit_cast<float>(denorm_magic);
      o = static_cast<std::uint16_t>(std::bit_cast<std::uint32_t>(aligned) - denorm_magic);
    } else {
      const std::uint32_t mant_odd = (f >> 13) & 1u;
      f += (static_cast<std::uint32_t>(15 - 127) << 23) + 0xfffu;
      f += mant_odd;
      o = static_cast<std::uint16_t>(f >> 13);
    }
    return from_bits(static_cast<std::uint16_t>(o | (sign >> 16)));
  }

  float to_float() const {
    const std::uint32_t shifted_exp = 0x7c00u << 13;
    std::uint32_t o = static_cast<std::uint32_t>(bits_ & 0x7fffu) << 13;
    const std::uint32_t exp = shifted_exp & o;
    o += (127u - 15u) << 23;
    if (exp == shifted_exp) {
      o += (128u - 16u) << 23;  // inf/nan
    } else if (exp == 0) {
      o += 1u << 23;  // subnormal: renormalize
      o = std::bit_cast<std::uint32_t>(std::bit_cast<float>(o) -
                                       std::bit_cast<float>(113u << 23));
    }
    o |= static_cast<std::uint32_t>(bits_ & 0x8000u) << 16;
    return std::bit_cast<float>(o);
  }

  std::uint16_t bits() const { return bits_; }
  bool operator==(const Half&) const = default;

 private:
  std::uint16_t bits_ = 0;
};

inline float round_to_half(float value) { return Half::from_float(value).to_float(); }

}  // namespace offsim
