#include "ibvs/lyapunov.hpp"

#include <cmath>
#include <stdexcept>

namespace ibvs {

namespace {

void check_state(const InterceptState& s) {
  if (!(s.cz > 0.0) || !std::isfinite(s.cz)) {
    throw std::domain_error("object distance must be positive");
  }
  if (!std::isfinite(s.px) || !std::isfinite(s.py) || !std::isfinite(s.vz) ||
      !std::isfinite(s.wy)) {
    throw std::invalid_argument("non-finite state component");
  }
}

}  // namespace

LyapunovValue lyapunov_v(double px, double py) {
  if (!std::isfinite(px) || !std::isfinite(py)) {
    throw std::invalid_argument("non-finite image coordinate");
  }
  LyapunovValue out;
  out.vx = 0.5 * px * px;
  out.vy = 0.5 * py * py;
  out.v = out.vx + out.vy;
  return out;
}

double d_x(const InterceptState& s, double vx) {
  check_state(s);
  if (!std::isfinite(vx)) {
    throw std::invalid_argument("non-finite input vx");
  }
  return s.px * (-vx / s.cz + s.vz * s.px / s.cz -
                 (1.0 + s.px * s.px) * s.wy);
}

double d_y(const InterceptState& s, double vy) {
  check_state(s);
  if (!std::isfinite(vy)) {
    throw std::invalid_argument("non-finite input vy");
  }
  return s.py * (-vy / s.cz + s.vz * s.py / s.cz - s.px * s.py * s.wy);
}

double w_value(double p_component) {
  if (!std::isfinite(p_component)) {
    throw std::invalid_argument("non-finite image coordinate");
  }
  return p_component * p_component;
}

}  // namespace ibvs
