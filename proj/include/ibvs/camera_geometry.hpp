#pragma once

#include <array>

namespace ibvs {

// Pinhole intrinsics with focal length in pixel units.
struct CameraIntrinsics {
  double focal_px = 0.0;
  int image_width = 0;
  int image_height = 0;

  bool valid() const {
    return focal_px > 0.0 && image_width > 0 && image_height > 0;
  }
};

// Dimensionless image-plane coordinates (pixels divided by focal length).
struct NormalizedImagePoint {
  double x = 0.0;
  double y = 0.0;
};

// Roll/pitch of the strapdown camera, radians. Pitch includes the fixed
// installation angle.
struct StrapdownAttitude {
  double roll = 0.0;
  double pitch = 0.0;
};

// Linear (m/s) and angular (rad/s) velocity of the gimbal camera frame.
struct CameraVelocity {
  std::array<double, 3> v{0.0, 0.0, 0.0};
  std::array<double, 3> w{0.0, 0.0, 0.0};
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

using Mat2x6 = std::array<std::array<double, 6>, 2>;
using Mat2x4 = std::array<std::array<double, 4>, 2>;

// Reduced camera velocity (vx, vy, vz, wy); the roll/pitch rates of the body
// do not move the gimbal image point.
using ReducedVelocity = std::array<double, 4>;

// Inputs within this margin of the +-pi/2 tangent singularity are rejected.
inline constexpr double kPitchSingularityGuard = 0.05;

// Pixel coordinates -> normalized image point.
NormalizedImagePoint normalize_pixel(double px, double py,
                                     const CameraIntrinsics& intr);

// Image point seen by the strapdown camera -> the point the gimbal camera
// would see, via the roll rotation and the pitch tangent correction.
NormalizedImagePoint strapdown_to_gimbal(const NormalizedImagePoint& p_s,
                                         const StrapdownAttitude& att);

// Full 2x6 interaction matrix mapping (v, w) to the image-point rate.
Mat2x6 image_jacobian_full(const NormalizedImagePoint& p, double cz);

// 2x4 interaction matrix for (vx, vy, vz, wy); columns 1,2,3,5 of the full
// matrix with wx = wz = 0.
Mat2x4 image_jacobian_reduced(const NormalizedImagePoint& p, double cz);

// Image-point rate under the reduced velocity, 1/s.
Vec2 image_point_dynamics(const NormalizedImagePoint& p, double cz,
                          const ReducedVelocity& u4);

// Full-matrix product, used to cross-check the reduced model.
Vec2 image_rate(const Mat2x6& jacobian, const CameraVelocity& vel);

// Largest normalized offset at which a target of inscribed radius r (meters)
// is still hit when closing along the optical axis from distance cz.
double max_hit_offset(double r, double cz);

}  // namespace ibvs
