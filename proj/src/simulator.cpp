#include "ibvs/simulator.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ibvs/io.hpp"

namespace ibvs {

namespace {

// Keeps the step count insensitive to float accumulation when the stop
// distance lands exactly on a step boundary.
constexpr double kStopSlack = 1e-9;

SimState add_scaled(const SimState& s, const StateRate& r, double h) {
  return {s.cz + h * r.cz_dot, s.px + h * r.px_dot, s.py + h * r.py_dot};
}

}  // namespace

StateRate dynamics(const SimState& s, double vx, double vy, double vz,
                   double wy) {
  if (!(s.cz > 0.0) || !std::isfinite(s.cz)) {
    throw std::domain_error("object distance must be positive");
  }
  StateRate r;
  r.cz_dot = -vz;
  r.px_dot = -vx / s.cz + s.px * vz / s.cz - (1.0 + s.px * s.px) * wy;
  r.py_dot = -vy / s.cz + s.py * vz / s.cz - s.px * s.py * wy;
  return r;
}

Trajectory run_closed_loop(const Controller& policy_x,
                           const Controller& policy_y, const SimState& s0,
                           const SimConfig& cfg) {
  if (!cfg.valid()) {
    throw std::invalid_argument("invalid sim config");
  }
  if (!(s0.cz > cfg.cz_stop)) {
    throw std::invalid_argument("initial distance must exceed cz_stop");
  }

  Trajectory traj;
  SimState s = s0;
  const std::size_t max_steps =
      static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.dt));
  traj.points.reserve(max_steps + 1);

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    const double cz_input =
        cfg.distance_mode == DistanceMode::fabricated ? cfg.cz_fixed : s.cz;
    const double vx = policy_x(s.px, cfg.vz, cz_input);
    const double vy = policy_y(s.py, cfg.vz, cz_input);
    const double wy =
        cfg.yaw_mode == YawMode::proportional ? cfg.yaw_gain * s.px : 0.0;

    TrajectoryPoint pt;
    pt.t = t;
    pt.cz = s.cz;
    pt.px = s.px;
    pt.py = s.py;
    pt.vx_cmd = vx;
    pt.vy_cmd = vy;
    pt.wy_cmd = wy;
    const LyapunovValue lv = lyapunov_v(s.px, s.py);
    pt.Vx = lv.vx;
    pt.Vy = lv.vy;
    InterceptState full{s.px, s.py, cfg.vz, s.cz, wy};
    pt.Dx = d_x(full, vx);
    pt.Dy = d_y(full, vy);
    traj.points.push_back(pt);

    if (s.cz <= cfg.cz_stop + kStopSlack) break;
    if (t >= cfg.t_max) {
      traj.timed_out = true;
      break;
    }

    // Commands held constant across the step.
    if (cfg.integrator == IntegratorKind::euler) {
      const StateRate r = dynamics(s, vx, vy, cfg.vz, wy);
      s = add_scaled(s, r, cfg.dt);
    } else {
      const StateRate k1 = dynamics(s, vx, vy, cfg.vz, wy);
      const StateRate k2 =
          dynamics(add_scaled(s, k1, cfg.dt / 2.0), vx, vy, cfg.vz, wy);
      const StateRate k3 =
          dynamics(add_scaled(s, k2, cfg.dt / 2.0), vx, vy, cfg.vz, wy);
      const StateRate k4 = dynamics(add_scaled(s, k3, cfg.dt), vx, vy, cfg.vz, wy);
      s.cz += cfg.dt / 6.0 *
              (k1.cz_dot + 2.0 * k2.cz_dot + 2.0 * k3.cz_dot + k4.cz_dot);
      s.px += cfg.dt / 6.0 *
              (k1.px_dot + 2.0 * k2.px_dot + 2.0 * k3.px_dot + k4.px_dot);
      s.py += cfg.dt / 6.0 *
              (k1.py_dot + 2.0 * k2.py_dot + 2.0 * k3.py_dot + k4.py_dot);
    }
  }
  return traj;
}

Trajectory run_closed_loop(const MlpParams& policy_x, const MlpParams& policy_y,
                           const SimState& s0, const SimConfig& cfg) {
  return run_closed_loop(controller_from_policy(policy_x),
                         controller_from_policy(policy_y), s0, cfg);
}

std::string trajectories_to_csv(std::span<const Trajectory> trajs) {
  std::ostringstream out;
  out << "t,cz,px,py,vx_cmd,vy_cmd,wy_cmd,Vx,Vy,Dx,Dy\n";
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    if (trajs.size() > 1) {
      out << "# trajectory " << i
          << (trajs[i].timed_out ? " (timed out)" : "") << "\n";
    }
    for (const TrajectoryPoint& pt : trajs[i].points) {
      out << format_double(pt.t) << ',' << format_double(pt.cz) << ','
          << format_double(pt.px) << ',' << format_double(pt.py) << ','
          << format_double(pt.vx_cmd) << ',' << format_double(pt.vy_cmd) << ','
          << format_double(pt.wy_cmd) << ',' << format_double(pt.Vx) << ','
          << format_double(pt.Vy) << ',' << format_double(pt.Dx) << ','
          << format_double(pt.Dy) << '\n';
    }
  }
  return out.str();
}

void export_trajectory_csv(const Trajectory& traj,
                           const std::filesystem::path& path) {
  atomic_write_file(path, trajectories_to_csv({&traj, 1}));
}

void export_trajectory_csv(std::span<const Trajectory> trajs,
                           const std::filesystem::path& path) {
  atomic_write_file(path, trajectories_to_csv(trajs));
}

std::array<SimState, 6> default_initial_states(double cz0) {
  return {{{cz0, 0.8, 0.6},
           {cz0, 0.8, -0.6},
           {cz0, -0.8, 0.6},
           {cz0, -0.8, -0.6},
           {cz0, 0.9, 0.0},
           {cz0, 0.0, -0.9}}};
}

std::vector<SimState> default_initial_state_vector(double cz0) {
  const auto states = default_initial_states(cz0);
  return {states.begin(), states.end()};
}

}  // namespace ibvs
