#include "ibvs/camera_geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ibvs/errors.hpp"

namespace ibvs {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("non-finite ") + what);
  }
}

void require_positive_cz(double cz) {
  if (!(cz > 0.0) || !std::isfinite(cz)) {
    throw std::domain_error("object distance must be positive");
  }
}

}  // namespace

NormalizedImagePoint normalize_pixel(double px, double py,
                                     const CameraIntrinsics& intr) {
  if (!intr.valid()) {
    throw std::invalid_argument("invalid camera intrinsics");
  }
  require_finite(px, "pixel x");
  require_finite(py, "pixel y");
  return {px / intr.focal_px, py / intr.focal_px};
}

NormalizedImagePoint strapdown_to_gimbal(const NormalizedImagePoint& p_s,
                                         const StrapdownAttitude& att) {
  require_finite(p_s.x, "image x");
  require_finite(p_s.y, "image y");
  require_finite(att.roll, "roll");
  require_finite(att.pitch, "pitch");
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (!(std::abs(att.pitch) < half_pi)) {
    throw std::invalid_argument("strapdown pitch must satisfy |pitch| < pi/2");
  }

  // Roll rotation of the image coordinates.
  const double c = std::cos(att.roll);
  const double s = std::sin(att.roll);
  const double x1 = p_s.x * c - p_s.y * s;
  const double y1 = p_s.x * s + p_s.y * c;

  // Pitch correction in angle space; tan blows up near +-pi/2.
  const double corrected = std::atan(y1) - att.pitch;
  if (std::abs(corrected) >= half_pi - kPitchSingularityGuard) {
    throw SingularityError("pitch correction within " +
                           std::to_string(kPitchSingularityGuard) +
                           " rad of the tangent singularity");
  }
  return {x1, std::tan(corrected)};
}

Mat2x6 image_jacobian_full(const NormalizedImagePoint& p, double cz) {
  require_positive_cz(cz);
  require_finite(p.x, "image x");
  require_finite(p.y, "image y");
  const double x = p.x;
  const double y = p.y;
  return {{{-1.0 / cz, 0.0, x / cz, x * y, -(1.0 + x * x), y},
           {0.0, -1.0 / cz, y / cz, 1.0 + y * y, -x * y, -x}}};
}

Mat2x4 image_jacobian_reduced(const NormalizedImagePoint& p, double cz) {
  require_positive_cz(cz);
  require_finite(p.x, "image x");
  require_finite(p.y, "image y");
  const double x = p.x;
  const double y = p.y;
  return {{{-1.0 / cz, 0.0, x / cz, -(1.0 + x * x)},
           {0.0, -1.0 / cz, y / cz, -x * y}}};
}

Vec2 image_point_dynamics(const NormalizedImagePoint& p, double cz,
                          const ReducedVelocity& u4) {
  const Mat2x4 jac = image_jacobian_reduced(p, cz);
  Vec2 rate;
  rate.x = jac[0][0] * u4[0] + jac[0][1] * u4[1] + jac[0][2] * u4[2] +
           jac[0][3] * u4[3];
  rate.y = jac[1][0] * u4[0] + jac[1][1] * u4[1] + jac[1][2] * u4[2] +
           jac[1][3] * u4[3];
  return rate;
}

Vec2 image_rate(const Mat2x6& jacobian, const CameraVelocity& vel) {
  Vec2 rate;
  for (int j = 0; j < 3; ++j) {
    rate.x += jacobian[0][j] * vel.v[j] + jacobian[0][j + 3] * vel.w[j];
    rate.y += jacobian[1][j] * vel.v[j] + jacobian[1][j + 3] * vel.w[j];
  }
  return rate;
}

double max_hit_offset(double r, double cz) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::domain_error("target radius must be positive");
  }
  require_positive_cz(cz);
  return r / cz;
}

}  // namespace ibvs
