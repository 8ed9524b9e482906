#include "coral/kernels.hpp"

#include <cstdlib>

#if defined(__x86_64__)
#include <immintrin.h>
#endif

namespace coral::kernels {

namespace scalar {

void squared_distances_2d(double qx, double qy, const double* xs,
                          const double* ys, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    out[i] = dx * dx + dy * dy;
  }
}

void squared_distances_3d(double qx, double qy, double qz, const double* xs,
                          const double* ys, const double* zs, std::size_t n,
                          double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double dz = zs[i] - qz;
    out[i] = dx * dx + dy * dy + dz * dz;
  }
}

Moments2 moments_2d(const double* xs, const double* ys, std::size_t n) {
  Moments2 m;
  m.n = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[i], y = ys[i];
    m.sx += x;
    m.sy += y;
    m.sxx += x * x;
    m.sxy += x * y;
    m.syy += y * y;
  }
  return m;
}

Moments3 moments_3d(const double* xs, const double* ys, const double* zs,
                    std::size_t n) {
  Moments3 m;
  m.n = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[i], y = ys[i], z = zs[i];
    m.sx += x;
    m.sy += y;
    m.sz += z;
    m.sxx += x * x;
    m.sxy += x * y;
    m.sxz += x * z;
    m.syy += y * y;
    m.syz += y * z;
    m.szz += z * z;
  }
  return m;
}

}  // namespace scalar

#if defined(__x86_64__)
namespace avx2 {

// No FMA: mul+add keeps each lane bit-identical to the scalar loop.
__attribute__((target("avx2"))) void squared_distances_2d(
    double qx, double qy, const double* xs, const double* ys, std::size_t n,
    double* out) {
  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
    const __m256d d2 =
        _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out + i, d2);
  }
  scalar::squared_distances_2d(qx, qy, xs + i, ys + i, n - i, out + i);
}

__attribute__((target("avx2"))) void squared_distances_3d(
    double qx, double qy, double qz, const double* xs, const double* ys,
    const double* zs, std::size_t n, double* out) {
  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  const __m256d vqz = _mm256_set1_pd(qz);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), vqz);
    __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    d2 = _mm256_add_pd(d2, _mm256_mul_pd(dz, dz));
    _mm256_storeu_pd(out + i, d2);
  }
  scalar::squared_distances_3d(qx, qy, qz, xs + i, ys + i, zs + i, n - i,
                               out + i);
}

__attribute__((target("avx2"))) static double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

__attribute__((target("avx2"))) Moments2 moments_2d(const double* xs,
                                                    const double* ys,
                                                    std::size_t n) {
  __m256d sx = _mm256_setzero_pd(), sy = _mm256_setzero_pd();
  __m256d sxx = _mm256_setzero_pd(), sxy = _mm256_setzero_pd(),
          syy = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(xs + i);
    const __m256d y = _mm256_loadu_pd(ys + i);
    sx = _mm256_add_pd(sx, x);
    sy = _mm256_add_pd(sy, y);
    sxx = _mm256_add_pd(sxx, _mm256_mul_pd(x, x));
    sxy = _mm256_add_pd(sxy, _mm256_mul_pd(x, y));
    syy = _mm256_add_pd(syy, _mm256_mul_pd(y, y));
  }
  Moments2 m = scalar::moments_2d(xs + i, ys + i, n - i);
  m.n = static_cast<double>(n);
  m.sx += hsum(sx);
  m.sy += hsum(sy);
  m.sxx += hsum(sxx);
  m.sxy += hsum(sxy);
  m.syy += hsum(syy);
  return m;
}

__attribute__((target("avx2"))) Moments3 moments_3d(const double* xs,
                                                    const double* ys,
                                                    const double* zs,
                                                    std::size_t n) {
  __m256d sx = _mm256_setzero_pd(), sy = _mm256_setzero_pd(),
          sz = _mm256_setzero_pd();
  __m256d sxx = _mm256_setzero_pd(), sxy = _mm256_setzero_pd(),
          sxz = _mm256_setzero_pd();
  __m256d syy = _mm256_setzero_pd(), syz = _mm256_setzero_pd(),
          szz = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(xs + i);
    const __m256d y = _mm256_loadu_pd(ys + i);
    const __m256d z = _mm256_loadu_pd(zs + i);
    sx = _mm256_add_pd(sx, x);
    sy = _mm256_add_pd(sy, y);
    sz = _mm256_add_pd(sz, z);
    sxx = _mm256_add_pd(sxx, _mm256_mul_pd(x, x));
    sxy = _mm256_add_pd(sxy, _mm256_mul_pd(x, y));
    sxz = _mm256_add_pd(sxz, _mm256_mul_pd(x, z));
    syy = _mm256_add_pd(syy, _mm256_mul_pd(y, y));
    syz = _mm256_add_pd(syz, _mm256_mul_pd(y, z));
    szz = _mm256_add_pd(szz, _mm256_mul_pd(z, z));
  }
  Moments3 m = scalar::moments_3d(xs + i, ys + i, zs + i, n - i);
  m.n = static_cast<double>(n);
  m.sx += hsum(sx);
  m.sy += hsum(sy);
  m.sz += hsum(sz);
  m.sxx += hsum(sxx);
  m.sxy += hsum(sxy);
  m.sxz += hsum(sxz);
  m.syy += hsum(syy);
  m.syz += hsum(syz);
  m.szz += hsum(szz);
  return m;
}

}  // namespace avx2
#endif  // __x86_64__

namespace {

struct Dispatch {
  decltype(&scalar::squared_distances_2d) sqdist2 = scalar::squared_distances_2d;
  decltype(&scalar::squared_distances_3d) sqdist3 = scalar::squared_distances_3d;
  decltype(&scalar::moments_2d) mom2 = scalar::moments_2d;
  decltype(&scalar::moments_3d) mom3 = scalar::moments_3d;
  std::string_view name = "scalar";

  Dispatch() {
#if defined(__x86_64__)
    const char* force = std::getenv("CORAL_FORCE_SCALAR");
    const bool forced = force && force[0] == '1';
    if (!forced && __builtin_cpu_supports("avx2")) {
      sqdist2 = avx2::squared_distances_2d;
      sqdist3 = avx2::squared_distances_3d;
      mom2 = avx2::moments_2d;
      mom3 = avx2::moments_3d;
      name = "avx2";
    }
#endif
  }
};

const Dispatch& dispatch() {
  static const Dispatch d;
  return d;
}

}  // namespace

void squared_distances_2d(double qx, double qy, const double* xs,
                          const double* ys, std::size_t n, double* out) {
  dispatch().sqdist2(qx, qy, xs, ys, n, out);
}

void squared_distances_3d(double qx, double qy, double qz, const double* xs,
                          const double* ys, const double* zs, std::size_t n,
                          double* out) {
  dispatch().sqdist3(qx, qy, qz, xs, ys, zs, n, out);
}

Moments2 moments_2d(const double* xs, const double* ys, std::size_t n) {
  return dispatch().mom2(xs, ys, n);
}

Moments3 moments_3d(const double* xs, const double* ys, const double* zs,
                    std::size_t n) {
  return dispatch().mom3(xs, ys, zs, n);
}

std::string_view active_variant() { return dispatch().name; }

}  // namespace coral::kernels
