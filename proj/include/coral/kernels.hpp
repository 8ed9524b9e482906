#pragma once
// Data-parallel inner loops shared by the spatial index, entropy and NDT
// code paths. Each kernel has a scalar reference implementation and an
// AVX2 variant selected once at load time; set CORAL_FORCE_SCALAR=1 to pin
// the scalar path.

#include <cstddef>
#include <string_view>

namespace coral::kernels {

// First and second order sums of a 2D / 3D point set.
struct Moments2 {
  double n = 0;
  double sx = 0, sy = 0;
  double sxx = 0, sxy = 0, syy = 0;
};

struct Moments3 {
  double n = 0;
  double sx = 0, sy = 0, sz = 0;
  double sxx = 0, sxy = 0, sxz = 0, syy = 0, syz = 0, szz = 0;
};

// out[i] = (xs[i]-qx)^2 + (ys[i]-qy)^2 (+ (zs[i]-qz)^2). Each lane performs
// the same mul/add sequence as the scalar loop, so results are bit-identical
// across variants.
void squared_distances_2d(double qx, double qy, const double* xs,
                          const double* ys, std::size_t n, double* out);
void squared_distances_3d(double qx, double qy, double qz, const double* xs,
                          const double* ys, const double* zs, std::size_t n,
                          double* out);

Moments2 moments_2d(const double* xs, const double* ys, std::size_t n);
Moments3 moments_3d(const double* xs, const double* ys, const double* zs,
                    std::size_t n);

// Scalar reference paths, kept callable for equivalence tests.
namespace scalar {
void squared_distances_2d(double qx, double qy, const double* xs,
                          const double* ys, std::size_t n, double* out);
void squared_distances_3d(double qx, double qy, double qz, const double* xs,
                          const double* ys, const double* zs, std::size_t n,
                          double* out);
Moments2 moments_2d(const double* xs, const double* ys, std::size_t n);
Moments3 moments_3d(const double* xs, const double* ys, const double* zs,
                    std::size_t n);
}  // namespace scalar

// Name of the variant currently dispatched ("scalar" or "avx2").
std::string_view active_variant();

}  // namespace coral::kernels
