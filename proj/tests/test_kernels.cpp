#include "doctest.h"

#include <cmath>
#include <vector>

#include "tahqiq/kernels.hpp"
#include "tahqiq/rng.hpp"

namespace tk = tahqiq::kernels;

namespace {

template <typename T>
std::vector<T> random_vec(tahqiq::Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(lo + (hi - lo) * rng.uniform());
  return v;
}

const std::vector<std::size_t> kSizes = {0,  1,  2,  3,  4,  5,  6,  7,   8,   9,   15,  16,
                                         17, 31, 32, 33, 63, 64, 65, 100, 200, 257, 1000};

}  // namespace

TEST_CASE("kernels: scalar reference values on hand-computed inputs") {
  const float af[] = {1.0f, 2.0f, 3.0f};
  const float bf[] = {4.0f, 5.0f, 6.0f};
  CHECK(tk::detail::dot_scalar(af, bf, 3) == doctest::Approx(32.0f));

  const double ad[] = {0.5, -1.0, 2.0, 4.0};
  const double bd[] = {2.0, 3.0, -1.0, 0.25};
  CHECK(tk::detail::dot_scalar(ad, bd, 4) == doctest::Approx(-3.0));

  double y[] = {1.0, 1.0, 1.0};
  const double x[] = {1.0, 2.0, 3.0};
  tk::detail::axpy_scalar(2.0, x, y, 3);
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[1] == doctest::Approx(5.0));
  CHECK(y[2] == doctest::Approx(7.0));

  double z[] = {2.0, -4.0};
  tk::detail::scale_scalar(0.5, z, 2);
  CHECK(z[0] == doctest::Approx(1.0));
  CHECK(z[1] == doctest::Approx(-2.0));

  CHECK(tk::detail::squared_distance_scalar(ad, bd, 4) ==
        doctest::Approx(2.25 + 16.0 + 9.0 + 14.0625));
}

TEST_CASE("kernels: backend dispatch API") {
  CHECK(tk::backend_available(tk::Backend::scalar));
  tk::Backend active = tk::active_backend();
  CHECK(tk::backend_available(active));

  tk::force_backend(tk::Backend::scalar);
  CHECK(tk::active_backend() == tk::Backend::scalar);
  const double a[] = {1.0, 2.0};
  const double b[] = {3.0, 4.0};
  CHECK(tk::dot(a, b, 2) == doctest::Approx(11.0));
  tk::reset_backend();

  if (!tk::backend_available(tk::Backend::avx2)) {
    CHECK_THROWS_AS(tk::force_backend(tk::Backend::avx2), std::invalid_argument);
  }
  CHECK(tk::backend_name(tk::Backend::scalar) == std::string("scalar"));
  CHECK(tk::backend_name(tk::Backend::avx2) == std::string("avx2"));
}

TEST_CASE("kernels: avx2 variants match scalar reference across remainder sizes") {
  if (!tk::backend_available(tk::Backend::avx2)) {
    MESSAGE("avx2 unavailable on this host; equivalence suite skipped");
    return;
  }
  tahqiq::Rng rng(20260815);

  for (std::size_t n : kSizes) {
    CAPTURE(n);

    {
      auto af = random_vec<float>(rng, n, -2.0, 2.0);
      auto bf = random_vec<float>(rng, n, -2.0, 2.0);
      float ref = tk::detail::dot_scalar(af.data(), bf.data(), n);
      float got = tk::detail::dot_avx2(af.data(), bf.data(), n);
      CHECK(got == doctest::Approx(ref).epsilon(1e-4).scale(1.0));

      float refd2 = tk::detail::squared_distance_scalar(af.data(), bf.data(), n);
      float gotd2 = tk::detail::squared_distance_avx2(af.data(), bf.data(), n);
      CHECK(gotd2 == doctest::Approx(refd2).epsilon(1e-4).scale(1.0));

      auto y1 = random_vec<float>(rng, n, -1.0, 1.0);
      auto y2 = y1;
      tk::detail::axpy_scalar(0.37f, af.data(), y1.data(), n);
      tk::detail::axpy_avx2(0.37f, af.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-5));

      auto s1 = bf;
      auto s2 = bf;
      tk::detail::scale_scalar(-1.25f, s1.data(), n);
      tk::detail::scale_avx2(-1.25f, s2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(s2[i] == doctest::Approx(s1[i]).epsilon(1e-6));
    }
    {
      auto ad = random_vec<double>(rng, n, -2.0, 2.0);
      auto bd = random_vec<double>(rng, n, -2.0, 2.0);
      double ref = tk::detail::dot_scalar(ad.data(), bd.data(), n);
      double got = tk::detail::dot_avx2(ad.data(), bd.data(), n);
      CHECK(got == doctest::Approx(ref).epsilon(1e-12).scale(1.0));

      double refd2 = tk::detail::squared_distance_scalar(ad.data(), bd.data(), n);
      double gotd2 = tk::detail::squared_distance_avx2(ad.data(), bd.data(), n);
      CHECK(gotd2 == doctest::Approx(refd2).epsilon(1e-12).scale(1.0));

      auto y1 = random_vec<double>(rng, n, -1.0, 1.0);
      auto y2 = y1;
      tk::detail::axpy_scalar(0.37, ad.data(), y1.data(), n);
      tk::detail::axpy_avx2(0.37, ad.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-13));

      auto s1 = bd;
      auto s2 = bd;
      tk::detail::scale_scalar(-1.25, s1.data(), n);
      tk::detail::scale_avx2(-1.25, s2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(s2[i] == doctest::Approx(s1[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("kernels: forced backends agree through the public wrappers") {
  tahqiq::Rng rng(7);
  auto a = random_vec<double>(rng, 129, -1.0, 1.0);
  auto b = random_vec<double>(rng, 129, -1.0, 1.0);

  tk::force_backend(tk::Backend::scalar);
  double d_scalar = tk::dot(a.data(), b.data(), a.size());
  tk::reset_backend();

  if (tk::backend_available(tk::Backend::avx2)) {
    tk::force_backend(tk::Backend::avx2);
    double d_avx2 = tk::dot(a.data(), b.data(), a.size());
    tk::reset_backend();
    CHECK(d_avx2 == doctest::Approx(d_scalar).epsilon(1e-12));
  }
}
