#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ibvs/dataset.hpp"
#include "ibvs/lyapunov.hpp"
#include "ibvs/mlp.hpp"

namespace ibvs {

// Velocity command as a function of (image coordinate, vz, cz). Trained
// policies and analytic laws both fit this shape.
using Controller = std::function<double(double p, double vz, double cz)>;

Controller controller_from_policy(const MlpParams& policy);

// Exact decrease-condition controller with bound clamping; the reference
// against which trained policies are checked.
Controller closed_form_controller(Axis axis, double eta,
                                  Interval bounds = {-30.0, 30.0});

// Dense evaluation slice: the image coordinate and the object distance are
// swept, everything else is held fixed.
struct GridSpec {
  double vz = 15.0;       // m/s
  double wy = 0.0;        // rad/s
  double p_other = 0.0;   // the image coordinate of the other axis
  Interval p{-1.0, 1.0};
  Interval cz{0.5, 50.0};
  int p_count = 200;
  int cz_count = 200;

  bool valid() const {
    return p.valid() && cz.valid() && cz.lo > 0.0 && p_count >= 2 &&
           cz_count >= 2;
  }
  std::size_t total() const {
    return static_cast<std::size_t>(p_count) *
           static_cast<std::size_t>(cz_count);
  }
};

// |D| <= this counts as boundary, not violation; keeps float noise on the
// zero-coordinate line out of the violation statistics.
inline constexpr double kSignThreshold = 1e-12;

struct RoaPoint {
  double p = 0.0;
  double cz = 0.0;
  double u = 0.0;  // m/s
  double d = 0.0;  // 1/s
  int sign = 0;    // -1, 0 (boundary), +1 (violation)
};

struct RoaReport {
  Axis axis = Axis::X;
  GridSpec grid;
  std::vector<RoaPoint> points;  // row-major: p index outer, cz index inner
  std::size_t violations = 0;
  std::size_t boundary = 0;

  double violation_fraction() const {
    return points.empty() ? 0.0
                          : static_cast<double>(violations) /
                                static_cast<double>(points.size());
  }
};

// Evaluates sgn(D) for the controller over the grid. Deterministic; rows
// ordered by grid index.
RoaReport verify_axis(const Controller& controller, Axis axis,
                      const GridSpec& grid);
RoaReport verify_axis(const MlpParams& policy, Axis axis,
                      const GridSpec& grid);

// One row per grid point, preceded by a comment documenting fixed states.
void export_roa_csv(const RoaReport& report, const std::filesystem::path& path);
std::string roa_to_csv(const RoaReport& report);

struct CzBinBound {
  double cz = 0.0;
  double max_violating_p = 0.0;  // largest |p| with D > 0 at this cz; 0 if none
};

struct ViolationSummary {
  double violation_fraction = 0.0;
  bool any_violation = false;
  double max_cz_with_violation = 0.0;
  double max_violating_p = 0.0;  // over the whole grid
  std::vector<CzBinBound> per_cz;

  // Predicted static-error bound at the grid cz nearest to the query.
  double static_error_bound_at(double cz) const;
  std::string to_text() const;
};

ViolationSummary violation_summary(const RoaReport& report);

}  // namespace ibvs
