#pragma once

#include <array>
#include <cstddef>

namespace rfk {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Row-major 4x4 transform. The last row is expected to be (0, 0, 0, 1);
// apply() treats its argument as a point with w = 1.
struct Mat4 {
  std::array<double, 16> m{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};

  static Mat4 identity() { return Mat4{}; }
  static Mat4 from_row_major(const std::array<double, 16>& values) {
    Mat4 t;
    t.m = values;
    return t;
  }

  double at(int row, int col) const { return m[static_cast<std::size_t>(row) * 4 + col]; }
  double& at(int row, int col) { return m[static_cast<std::size_t>(row) * 4 + col]; }

  Vec3 apply(const Vec3& p) const;
  Mat4 mul(const Mat4& rhs) const;

  // Inverse of a rigid transform [R | t]; only valid when the rotation block
  // is orthonormal.
  Mat4 inverse_rigid() const;

  // Max deviation of R^T R from the identity.
  double rotation_orthonormality_error() const;
};

}  // namespace rfk
