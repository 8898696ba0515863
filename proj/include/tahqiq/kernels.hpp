// Copyright 2026 The Tahqiq Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string>

// Dense vector arithmetic used by the hot loops (embedding training, the
// convolutional classifier, RBF kernels). Every entry point dispatches at
// runtime to the best available backend; the scalar path is the reference
// implementation that SIMD variants are equivalence-tested against.
//
// SIMD reductions accumulate in a different order than the scalar path, so
// results agree to rounding, not bitwise. Within one process the selected
// backend never changes unless force_backend() is called, which keeps
// seeded runs reproducible.

namespace tahqiq::kernels {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);

// True if this build and this CPU can run the given backend.
bool backend_available(Backend b);

Backend active_backend();

// Pins the dispatch table to one backend. Throws std::invalid_argument if
// the backend is not available.
void force_backend(Backend b);

// Restores auto-detection (best available).
void reset_backend();

float dot(const float* a, const float* b, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);

// y += alpha * x
void axpy(float alpha, const float* x, float* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);

// x *= alpha
void scale(float alpha, float* x, std::size_t n);
void scale(double alpha, double* x, std::size_t n);

float squared_distance(const float* a, const float* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);

namespace detail {

// Scalar reference kernels. Exposed so tests can compare backends directly.
float dot_scalar(const float* a, const float* b, std::size_t n);
double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(float alpha, const float* x, float* y, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void scale_scalar(float alpha, float* x, std::size_t n);
void scale_scalar(double alpha, double* x, std::size_t n);
float squared_distance_scalar(const float* a, const float* b, std::size_t n);
double squared_distance_scalar(const double* a, const double* b, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
#define TAHQIQ_X86 1
float dot_avx2(const float* a, const float* b, std::size_t n);
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(float alpha, const float* x, float* y, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void scale_avx2(float alpha, float* x, std::size_t n);
void scale_avx2(double alpha, double* x, std::size_t n);
float squared_distance_avx2(const float* a, const float* b, std::size_t n);
double squared_distance_avx2(const double* a, const double* b, std::size_t n);
#endif

}  // namespace detail

}  // namespace tahqiq::kernels
