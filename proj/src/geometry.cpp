#include "rfk/geometry.hpp"

#include <cmath>

namespace rfk {

Vec3 Mat4::apply(const Vec3& p) const {
  return Vec3{
      m[0] * p.x + m[1] * p.y + m[2] * p.z + m[3],
      m[4] * p.x + m[5] * p.y + m[6] * p.z + m[7],
      m[8] * p.x + m[9] * p.y + m[10] * p.z + m[11],
  };
}

Mat4 Mat4::mul(const Mat4& rhs) const {
  Mat4 out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += at(r, k) * rhs.at(k, c);
      out.at(r, c) = acc;
    }
  }
  return out;
}

Mat4 Mat4::inverse_rigid() const {
  Mat4 out;
  // R^-1 = R^T
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out.at(r, c) = at(c, r);
  // t' = -R^T t
  for (int r = 0; r < 3; ++r) {
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) acc += at(k, r) * at(k, 3);
    out.at(r, 3) = -acc;
  }
  out.at(3, 0) = out.at(3, 1) = out.at(3, 2) = 0.0;
  out.at(3, 3) = 1.0;
  return out;
}

double Mat4::rotation_orthonormality_error() const {
  double worst = 0.0;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += at(k, r) * at(k, c);
      double expected = (r == c) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(dot - expected));
    }
  }
  return worst;
}

}  // namespace rfk
