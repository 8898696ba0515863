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

#include "tahqiq/kernels.hpp"

#include <stdexcept>

namespace tahqiq::kernels {

namespace detail {

float dot_scalar(const float* a, const float* b, std::size_t n) {
  float acc = 0.0f;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(float alpha, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(float alpha, float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

float squared_distance_scalar(const float* a, const float* b, std::size_t n) {
  float acc = 0.0f;
  for (std::size_t i = 0; i < n; ++i) {
    float d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace detail

namespace {

struct DispatchTable {
  float (*dot_f)(const float*, const float*, std::size_t);
  double (*dot_d)(const double*, const double*, std::size_t);
  void (*axpy_f)(float, const float*, float*, std::size_t);
  void (*axpy_d)(double, const double*, double*, std::size_t);
  void (*scale_f)(float, float*, std::size_t);
  void (*scale_d)(double, double*, std::size_t);
  float (*sqdist_f)(const float*, const float*, std::size_t);
  double (*sqdist_d)(const double*, const double*, std::size_t);
  Backend backend;
};

constexpr DispatchTable kScalarTable = {
    detail::dot_scalar,   detail::dot_scalar,
    detail::axpy_scalar,  detail::axpy_scalar,
    detail::scale_scalar, detail::scale_scalar,
    detail::squared_distance_scalar,
    detail::squared_distance_scalar,
    Backend::scalar,
};

#if TAHQIQ_X86
constexpr DispatchTable kAvx2Table = {
    detail::dot_avx2,   detail::dot_avx2,
    detail::axpy_avx2,  detail::axpy_avx2,
    detail::scale_avx2, detail::scale_avx2,
    detail::squared_distance_avx2,
    detail::squared_distance_avx2,
    Backend::avx2,
};
#endif

bool cpu_has_avx2() {
#if TAHQIQ_X86
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const DispatchTable* table_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &kScalarTable;
    case Backend::avx2:
#if TAHQIQ_X86
      return &kAvx2Table;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const DispatchTable* detect_best() {
#if TAHQIQ_X86
  if (cpu_has_avx2()) return &kAvx2Table;
#endif
  return &kScalarTable;
}

const DispatchTable*& active_table() {
  static const DispatchTable* table = detect_best();
  return table;
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "?";
}

bool backend_available(Backend b) {
  if (b == Backend::scalar) return true;
  if (b == Backend::avx2) return cpu_has_avx2();
  return false;
}

Backend active_backend() { return active_table()->backend; }

void force_backend(Backend b) {
  if (!backend_available(b)) {
    throw std::invalid_argument(std::string("kernel backend unavailable: ") +
                                backend_name(b));
  }
  active_table() = table_for(b);
}

void reset_backend() { active_table() = detect_best(); }

float dot(const float* a, const float* b, std::size_t n) {
  return active_table()->dot_f(a, b, n);
}
double dot(const double* a, const double* b, std::size_t n) {
  return active_table()->dot_d(a, b, n);
}
void axpy(float alpha, const float* x, float* y, std::size_t n) {
  active_table()->axpy_f(alpha, x, y, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active_table()->axpy_d(alpha, x, y, n);
}
void scale(float alpha, float* x, std::size_t n) {
  active_table()->scale_f(alpha, x, n);
}
void scale(double alpha, double* x, std::size_t n) {
  active_table()->scale_d(alpha, x, n);
}
float squared_distance(const float* a, const float* b, std::size_t n) {
  return active_table()->sqdist_f(a, b, n);
}
double squared_distance(const double* a, const double* b, std::size_t n) {
  return active_table()->sqdist_d(a, b, n);
}

}  // namespace tahqiq::kernels
