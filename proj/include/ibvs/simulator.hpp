#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ibvs/verifier.hpp"

namespace ibvs {

enum class DistanceMode { true_cz, fabricated };
enum class YawMode { zero, proportional };
enum class IntegratorKind { rk4, euler };

struct SimConfig {
  double dt = 0.005;     // s
  double t_max = 10.0;   // s
  double vz = 15.0;      // m/s
  double cz_stop = 0.5;  // m; the trained policy's domain ends here
  DistanceMode distance_mode = DistanceMode::true_cz;
  double cz_fixed = 10.0;  // m, used when distance_mode == fabricated
  YawMode yaw_mode = YawMode::zero;
  double yaw_gain = 0.002;  // rad/s per unit of the x image coordinate
  IntegratorKind integrator = IntegratorKind::rk4;

  bool valid() const {
    return dt > 0.0 && t_max > 0.0 && cz_stop > 0.0 && vz > 0.0 &&
           vz * dt < cz_stop && (distance_mode != DistanceMode::fabricated ||
                                 cz_fixed > 0.0);
  }
};

struct SimState {
  double cz = 0.0;
  double px = 0.0;
  double py = 0.0;
};

struct StateRate {
  double cz_dot = 0.0;
  double px_dot = 0.0;
  double py_dot = 0.0;
};

// Simplified closed-loop model: the approach speed is held, so the distance
// shrinks linearly while the image point obeys the reduced interaction
// matrix. Throws on cz <= 0.
StateRate dynamics(const SimState& s, double vx, double vy, double vz,
                   double wy);

struct TrajectoryPoint {
  double t = 0.0;
  double cz = 0.0;
  double px = 0.0;
  double py = 0.0;
  double vx_cmd = 0.0;
  double vy_cmd = 0.0;
  double wy_cmd = 0.0;
  double Vx = 0.0;
  double Vy = 0.0;
  double Dx = 0.0;
  double Dy = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  bool timed_out = false;

  const TrajectoryPoint& front() const { return points.front(); }
  const TrajectoryPoint& back() const { return points.back(); }
};

// Integrates the closed loop from s0 until cz <= cz_stop or t_max. Commands
// are held over each step; the policies see either the true distance or the
// fabricated constant, while recorded D values always use the true state.
Trajectory run_closed_loop(const Controller& policy_x,
                           const Controller& policy_y, const SimState& s0,
                           const SimConfig& cfg);
Trajectory run_closed_loop(const MlpParams& policy_x, const MlpParams& policy_y,
                           const SimState& s0, const SimConfig& cfg);

void export_trajectory_csv(const Trajectory& traj,
                           const std::filesystem::path& path);
// Batch export: one block per trajectory, separated by a comment line.
void export_trajectory_csv(std::span<const Trajectory> trajs,
                           const std::filesystem::path& path);
std::string trajectories_to_csv(std::span<const Trajectory> trajs);

// Corner and edge starts of the image box at the far end of the distance
// range.
std::array<SimState, 6> default_initial_states(double cz0 = 50.0);
std::vector<SimState> default_initial_state_vector(double cz0 = 50.0);

}  // namespace ibvs
