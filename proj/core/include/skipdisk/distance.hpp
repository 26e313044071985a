#pragma once

// Squared-L2 distance kernels.  All internal comparisons are on squared
// distances; callers take a square root only where a true distance is
// required (pivot lower bounds against the threshold tau).
//
// The main kernel accumulates into eight independent lanes so the compiler
// can vectorize the reduction without -ffast-math.  The summation order is
// fixed by the source, which keeps results bit-identical across runs of
// the same binary.

#include <cstddef>
#include <span>

namespace skipdisk {

inline float l2_sq(const float* a, const float* b, std::size_t d) {
  float acc[8] = {0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f};
  std::size_t i = 0;
  for (; i + 8 <= d; i += 8) {
    for (int j = 0; j < 8; ++j) {
      float t = a[i + j] - b[i + j];
      acc[j] += t * t;
    }
  }
  float tail = 0.f;
  for (; i < d; ++i) {
    float t = a[i] - b[i];
    tail += t * t;
  }
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
         ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

inline float l2_sq(std::span<const float> a, std::span<const float> b) {
  return l2_sq(a.data(), b.data(), a.size());
}

// Reference kernel: strict left-to-right scalar accumulation.  Used by
// tests as an independent oracle and anywhere speed does not matter.
inline float l2_sq_scalar(const float* a, const float* b, std::size_t d) {
  float acc = 0.f;
  for (std::size_t i = 0; i < d; ++i) {
    float t = a[i] - b[i];
    acc += t * t;
  }
  return acc;
}

// Squared norm, same lane structure as l2_sq.
inline float norm_sq(const float* a, std::size_t d) {
  float acc[8] = {0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f};
  std::size_t i = 0;
  for (; i + 8 <= d; i += 8) {
    for (int j = 0; j < 8; ++j) acc[j] += a[i + j] * a[i + j];
  }
  float tail = 0.f;
  for (; i < d; ++i) tail += a[i] * a[i];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
         ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

}  // namespace skipdisk
