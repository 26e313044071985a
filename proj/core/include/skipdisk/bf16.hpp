#pragma once

// bfloat16 storage helpers.  A bf16 value is the upper 16 bits of an
// IEEE-754 binary32; conversion truncates the low mantissa bits (round
// toward zero).  With 8 significand bits the truncation error is below
// one ulp, so for finite x
//   |x - bf16(x)| <= 2^-7 |x|,
// and coordinate-wise for a whole vector
//   ||p - bf16(p)||_2 <= 2^-7 ||p||_2.
// Truncation (rather than round-to-nearest) keeps the conversion a pure
// bit shift and never increases magnitude.

#include <cstdint>
#include <cstring>
#include <cstddef>

namespace skipdisk {

using Bf16 = std::uint16_t;

inline Bf16 bf16_from_float(float x) {
  std::uint32_t bits;
  std::memcpy(&bits, &x, sizeof(bits));
  return static_cast<Bf16>(bits >> 16);
}

inline float bf16_to_float(Bf16 x) {
  std::uint32_t bits = static_cast<std::uint32_t>(x) << 16;
  float out;
  std::memcpy(&out, &bits, sizeof(out));
  return out;
}

inline void bf16_encode(const float* in, Bf16* out, std::size_t d) {
  for (std::size_t i = 0; i < d; ++i) out[i] = bf16_from_float(in[i]);
}

inline void bf16_decode(const Bf16* in, float* out, std::size_t d) {
  for (std::size_t i = 0; i < d; ++i) out[i] = bf16_to_float(in[i]);
}

// Squared L2 between a float query and a bf16-stored vector, widening on
// the fly.  Lane structure mirrors l2_sq so both kernels vectorize.
inline float l2_sq_bf16(const float* a, const Bf16* b, std::size_t d) {
  float acc[8] = {0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f};
  std::size_t i = 0;
  for (; i + 8 <= d; i += 8) {
    for (int j = 0; j < 8; ++j) {
      float t = a[i + j] - bf16_to_float(b[i + j]);
      acc[j] += t * t;
    }
  }
  float tail = 0.f;
  for (; i < d; ++i) {
    float t = a[i] - bf16_to_float(b[i]);
    tail += t * t;
  }
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
         ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

}  // namespace skipdisk
