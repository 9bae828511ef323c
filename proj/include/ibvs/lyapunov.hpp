#pragma once

namespace ibvs {

// Five-component state of the interception loop: normalized image
// coordinates, approach speed, object distance, yaw rate.
struct InterceptState {
  double px = 0.0;  // dimensionless
  double py = 0.0;  // dimensionless
  double vz = 0.0;  // m/s
  double cz = 0.0;  // m, must be > 0
  double wy = 0.0;  // rad/s
};

// Lateral velocity commands produced by the policies.
struct ControlInput {
  double vx = 0.0;  // m/s
  double vy = 0.0;  // m/s
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool valid() const { return lo < hi; }
  bool contains(double v) const { return v >= lo && v <= hi; }
  double mid() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
};

// State box over which datasets are generated and stability is checked.
struct Roi {
  Interval px{-1.0, 1.0};
  Interval py{-1.0, 1.0};
  Interval wy{-0.2, 0.2};
  Interval vz{0.1, 15.0};
  Interval cz{0.5, 50.0};

  static Roi defaults() { return Roi{}; }

  bool valid() const {
    return px.valid() && py.valid() && wy.valid() && vz.valid() &&
           cz.valid() && cz.lo > 0.0;
  }

  bool contains(const InterceptState& s) const {
    return px.contains(s.px) && py.contains(s.py) && wy.contains(s.wy) &&
           vz.contains(s.vz) && cz.contains(s.cz);
  }
};

struct LyapunovValue {
  double vx = 0.0;  // px component
  double vy = 0.0;  // py component
  double v = 0.0;   // sum
};

// V_x = px^2/2, V_y = py^2/2, V = V_x + V_y.
LyapunovValue lyapunov_v(double px, double py);

// Time derivative of V_x along the image dynamics for lateral command vx.
// d_x = px * (-vx/cz + vz*px/cz - (1+px^2)*wy). Throws on cz <= 0.
double d_x(const InterceptState& s, double vx);

// Time derivative of V_y: d_y = py * (-vy/cz + vz*py/cz - px*py*wy).
double d_y(const InterceptState& s, double vy);

// Decrease-rate shaping function, W(p) = p^2.
double w_value(double p_component);

}  // namespace ibvs
