#include "ibvs/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ibvs/io.hpp"

namespace ibvs {

Controller controller_from_policy(const MlpParams& policy) {
  return [policy](double p, double vz, double cz) {
    return forward(policy, p, vz, cz);
  };
}

Controller closed_form_controller(Axis axis, double eta, Interval bounds) {
  return [axis, eta, bounds](double p, double vz, double cz) {
    InterceptState s;
    s.vz = vz;
    s.cz = cz;
    if (axis == Axis::X) {
      s.px = p;
    } else {
      s.py = p;
    }
    if (p == 0.0) {
      return 0.0;  // limit input at wy = 0
    }
    return std::clamp(solve_input_closed_form(axis, s, eta), bounds.lo,
                      bounds.hi);
  };
}

RoaReport verify_axis(const Controller& controller, Axis axis,
                      const GridSpec& grid) {
  if (!grid.valid()) {
    throw std::invalid_argument("invalid grid spec");
  }
  RoaReport report;
  report.axis = axis;
  report.grid = grid;
  report.points.reserve(grid.total());

  for (int ip = 0; ip < grid.p_count; ++ip) {
    const double p = grid.p.lo + (grid.p.hi - grid.p.lo) *
                                     static_cast<double>(ip) /
                                     static_cast<double>(grid.p_count - 1);
    for (int ic = 0; ic < grid.cz_count; ++ic) {
      const double cz = grid.cz.lo + (grid.cz.hi - grid.cz.lo) *
                                         static_cast<double>(ic) /
                                         static_cast<double>(grid.cz_count - 1);
      InterceptState s;
      s.vz = grid.vz;
      s.wy = grid.wy;
      s.cz = cz;
      if (axis == Axis::X) {
        s.px = p;
        s.py = grid.p_other;
      } else {
        s.px = grid.p_other;
        s.py = p;
      }
      RoaPoint pt;
      pt.p = p;
      pt.cz = cz;
      pt.u = controller(p, grid.vz, cz);
      pt.d = axis == Axis::X ? d_x(s, pt.u) : d_y(s, pt.u);
      if (pt.d > kSignThreshold) {
        pt.sign = 1;
        ++report.violations;
      } else if (pt.d >= -kSignThreshold) {
        pt.sign = 0;
        ++report.boundary;
      } else {
        pt.sign = -1;
      }
      report.points.push_back(pt);
    }
  }
  return report;
}

RoaReport verify_axis(const MlpParams& policy, Axis axis,
                      const GridSpec& grid) {
  return verify_axis(controller_from_policy(policy), axis, grid);
}

std::string roa_to_csv(const RoaReport& report) {
  std::ostringstream out;
  out << "# axis=" << axis_name(report.axis)
      << " vz=" << format_double(report.grid.vz)
      << " wy=" << format_double(report.grid.wy)
      << " p_other=" << format_double(report.grid.p_other) << "\n";
  out << "p,cz,u,d,sign\n";
  for (const RoaPoint& pt : report.points) {
    out << format_double(pt.p) << ',' << format_double(pt.cz) << ','
        << format_double(pt.u) << ',' << format_double(pt.d) << ','
        << pt.sign << '\n';
  }
  return out.str();
}

void export_roa_csv(const RoaReport& report,
                    const std::filesystem::path& path) {
  atomic_write_file(path, roa_to_csv(report));
}

double ViolationSummary::static_error_bound_at(double cz) const {
  if (per_cz.empty()) return 0.0;
  const CzBinBound* best = &per_cz.front();
  for (const CzBinBound& bin : per_cz) {
    if (std::abs(bin.cz - cz) < std::abs(best->cz - cz)) best = &bin;
  }
  return best->max_violating_p;
}

std::string ViolationSummary::to_text() const {
  std::ostringstream out;
  out << "violation_fraction: " << format_double(violation_fraction) << "\n";
  if (any_violation) {
    out << "max_cz_with_violation: " << format_double(max_cz_with_violation)
        << "\n"
        << "max_violating_p: " << format_double(max_violating_p) << "\n";
  } else {
    out << "max_cz_with_violation: none\n"
        << "max_violating_p: none\n";
  }
  out << "per_cz_static_error_bound:\n";
  for (const CzBinBound& bin : per_cz) {
    out << "  cz=" << format_double(bin.cz) << " bound="
        << format_double(bin.max_violating_p) << "\n";
  }
  return out.str();
}

ViolationSummary violation_summary(const RoaReport& report) {
  if (report.points.empty()) {
    throw std::invalid_argument("empty report");
  }
  ViolationSummary summary;
  summary.violation_fraction = report.violation_fraction();

  // One bin per swept cz value; rows are p-major so cz cycles fastest.
  const int cz_count = report.grid.cz_count;
  summary.per_cz.resize(static_cast<std::size_t>(cz_count));
  for (int ic = 0; ic < cz_count; ++ic) {
    summary.per_cz[static_cast<std::size_t>(ic)].cz =
        report.points[static_cast<std::size_t>(ic)].cz;
  }
  for (std::size_t k = 0; k < report.points.size(); ++k) {
    const RoaPoint& pt = report.points[k];
    if (pt.sign != 1) continue;
    summary.any_violation = true;
    CzBinBound& bin = summary.per_cz[k % static_cast<std::size_t>(cz_count)];
    bin.max_violating_p = std::max(bin.max_violating_p, std::abs(pt.p));
    summary.max_violating_p = std::max(summary.max_violating_p, std::abs(pt.p));
    summary.max_cz_with_violation =
        std::max(summary.max_cz_with_violation, pt.cz);
  }
  return summary;
}

}  // namespace ibvs
