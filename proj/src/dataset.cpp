#include "ibvs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ibvs/errors.hpp"
#include "ibvs/io.hpp"
#include "ibvs/rng.hpp"

namespace ibvs {

namespace {

double axis_coordinate(Axis axis, const InterceptState& s) {
  return axis == Axis::X ? s.px : s.py;
}

double eval_d(Axis axis, const InterceptState& s, double u) {
  return axis == Axis::X ? d_x(s, u) : d_y(s, u);
}

// Limit of the closed-form input as the axis coordinate goes to zero. Keeps
// the labeled map continuous through the origin, where D < 0 is infeasible.
double degenerate_limit_input(Axis axis, const InterceptState& s) {
  if (axis == Axis::X) {
    return -s.cz * (1.0 + s.px * s.px) * s.wy;
  }
  return 0.0;  // every term of the y-axis expression carries a py factor
}

void check_search_inputs(const InterceptState& s, double eta) {
  if (!(s.cz > 0.0)) {
    throw std::domain_error("object distance must be positive");
  }
  if (!(eta > 0.0)) {
    throw std::invalid_argument("eta must be positive");
  }
}

}  // namespace

const char* axis_name(Axis axis) { return axis == Axis::X ? "x" : "y"; }

Axis axis_from_name(const std::string& name) {
  if (name == "x" || name == "X") return Axis::X;
  if (name == "y" || name == "Y") return Axis::Y;
  throw std::invalid_argument("unknown axis: '" + name + "'");
}

double solve_input_closed_form(Axis axis, const InterceptState& s,
                               double eta) {
  check_search_inputs(s, eta);
  const double p = axis_coordinate(axis, s);
  if (p == 0.0) {
    throw DegenerateStateError(
        "decrease condition infeasible at zero image coordinate");
  }
  if (axis == Axis::X) {
    return s.vz * s.px + eta * s.cz * s.px -
           s.cz * (1.0 + s.px * s.px) * s.wy;
  }
  return s.vz * s.py + eta * s.cz * s.py - s.cz * s.px * s.py * s.wy;
}

SolveResult solve_input_numeric(Axis axis, const InterceptState& s,
                                const SearchConfig& cfg) {
  if (!cfg.valid()) {
    throw std::invalid_argument("invalid search config");
  }
  check_search_inputs(s, cfg.eta);

  const double p = axis_coordinate(axis, s);
  const double w = w_value(p);
  const auto objective = [&](double u) { return std::abs(eval_d(axis, s, u) + cfg.eta * w); };

  const double lo = cfg.input_bounds.lo;
  const double hi = cfg.input_bounds.hi;
  constexpr int kGridPoints = 1024;
  const double step = (hi - lo) / (kGridPoints - 1);

  int best_idx = -1;
  double best_obj = 0.0;
  double least_d = 0.0;
  double least_d_u = lo;
  for (int i = 0; i < kGridPoints; ++i) {
    const double u = (i == kGridPoints - 1) ? hi : lo + i * step;
    const double d = eval_d(axis, s, u);
    if (i == 0 || d < least_d) {
      least_d = d;
      least_d_u = u;
    }
    if (d < 0.0) {
      const double obj = std::abs(d + cfg.eta * w);
      if (best_idx < 0 || obj < best_obj) {
        best_idx = i;
        best_obj = obj;
      }
    }
  }

  if (best_idx < 0) {
    // No feasible input; report the closest approach to D < 0.
    return {SolveStatus::infeasible, least_d_u, least_d};
  }

  // Golden-section refinement around the best grid point. |D + eta*W| is
  // V-shaped in u, so the bracket contains a single minimum.
  double a = std::max(lo, lo + (best_idx - 1) * step);
  double b = std::min(hi, lo + (best_idx + 1) * step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d_pt = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d_pt);
  double best_u = lo + best_idx * step;
  if (best_idx == kGridPoints - 1) best_u = hi;
  auto consider = [&](double u, double obj) {
    if (eval_d(axis, s, u) < 0.0 && obj < best_obj) {
      best_obj = obj;
      best_u = u;
    }
  };
  consider(c, fc);
  consider(d_pt, fd);
  for (int iter = 0; iter < 90 && (b - a) > 1e-13 * std::max(1.0, std::abs(b) + std::abs(a)); ++iter) {
    if (fc < fd) {
      b = d_pt;
      d_pt = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
      consider(c, fc);
    } else {
      a = c;
      c = d_pt;
      fc = fd;
      d_pt = a + inv_phi * (b - a);
      fd = objective(d_pt);
      consider(d_pt, fd);
    }
  }

  const double final_d = eval_d(axis, s, best_u);
  const SolveStatus status = best_obj <= cfg.tolerance ? SolveStatus::solved
                                                       : SolveStatus::clamped;
  return {status, best_u, final_d};
}

std::vector<InterceptState> sample_roi(const Roi& roi, std::size_t n,
                                       std::uint64_t seed,
                                       SamplingScheme scheme) {
  if (!roi.valid()) {
    throw std::invalid_argument("invalid RoI");
  }
  std::vector<InterceptState> states;
  if (n == 0) return states;

  if (scheme == SamplingScheme::uniform_random) {
    states.reserve(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
      InterceptState s;
      s.px = rng.uniform(roi.px.lo, roi.px.hi);
      s.py = rng.uniform(roi.py.lo, roi.py.hi);
      s.vz = rng.uniform(roi.vz.lo, roi.vz.hi);
      s.cz = rng.uniform(roi.cz.lo, roi.cz.hi);
      s.wy = rng.uniform(roi.wy.lo, roi.wy.hi);
      states.push_back(s);
    }
    return states;
  }

  // Regular grid, round(n^(1/5)) points per dimension.
  const long ppd = std::max(1L, std::lround(std::pow(static_cast<double>(n), 0.2)));
  const auto coord = [ppd](const Interval& iv, long i) {
    if (ppd == 1) return iv.mid();
    return iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) /
                       static_cast<double>(ppd - 1);
  };
  states.reserve(static_cast<std::size_t>(std::pow(ppd, 5)));
  for (long a = 0; a < ppd; ++a)
    for (long b = 0; b < ppd; ++b)
      for (long c = 0; c < ppd; ++c)
        for (long d = 0; d < ppd; ++d)
          for (long e = 0; e < ppd; ++e) {
            InterceptState s;
            s.px = coord(roi.px, a);
            s.py = coord(roi.py, b);
            s.vz = coord(roi.vz, c);
            s.cz = coord(roi.cz, d);
            s.wy = coord(roi.wy, e);
            states.push_back(s);
          }
  return states;
}

std::string GenerationReport::to_text() const {
  std::ostringstream out;
  out << "requested:  " << requested << "\n"
      << "solved:     " << solved << "\n"
      << "clamped:    " << clamped << "\n"
      << "degenerate: " << degenerate << "\n"
      << "infeasible: " << infeasible << " (dropped)\n"
      << "retained:   " << retained() << "\n";
  return out.str();
}

Dataset generate_dataset(Axis axis, const Roi& roi, std::size_t n,
                         const SearchConfig& cfg, std::uint64_t seed,
                         GenerationReport* report, SamplingScheme sampling) {
  if (!cfg.valid()) {
    throw std::invalid_argument("invalid search config");
  }
  Dataset ds;
  ds.axis = axis;
  ds.roi = roi;
  ds.eta = cfg.eta;
  ds.seed = seed;
  GenerationReport rep;

  const auto states = sample_roi(roi, n, seed, sampling);
  rep.requested = states.size();
  ds.samples.reserve(states.size());
  for (const InterceptState& s : states) {
    LabeledSample sample;
    sample.axis = axis;
    sample.state = s;

    const double p = axis_coordinate(axis, s);
    if (p == 0.0) {
      const double u = std::clamp(degenerate_limit_input(axis, s),
                                  cfg.input_bounds.lo, cfg.input_bounds.hi);
      sample.input = u;
      sample.achieved_d = eval_d(axis, s, u);
      sample.status = SolveStatus::degenerate;
      ds.samples.push_back(sample);
      ++rep.degenerate;
      continue;
    }

    if (cfg.scheme == SearchScheme::closed_form) {
      const double exact = solve_input_closed_form(axis, s, cfg.eta);
      if (cfg.input_bounds.contains(exact)) {
        sample.input = exact;
        sample.status = SolveStatus::solved;
      } else {
        sample.input =
            std::clamp(exact, cfg.input_bounds.lo, cfg.input_bounds.hi);
        sample.status = SolveStatus::clamped;
      }
      sample.achieved_d = eval_d(axis, s, sample.input);
      if (sample.achieved_d < 0.0) {
        ds.samples.push_back(sample);
        if (sample.status == SolveStatus::solved) {
          ++rep.solved;
        } else {
          ++rep.clamped;
        }
      } else {
        ++rep.infeasible;
      }
    } else {
      const SolveResult res = solve_input_numeric(axis, s, cfg);
      if (res.status == SolveStatus::infeasible) {
        ++rep.infeasible;
      } else {
        sample.input = res.input;
        sample.achieved_d = res.achieved_d;
        sample.status = res.status;
        ds.samples.push_back(sample);
        if (res.status == SolveStatus::solved) {
          ++rep.solved;
        } else {
          ++rep.clamped;
        }
      }
    }
  }

  if (report != nullptr) *report = rep;
  return ds;
}

std::string dataset_to_csv(const Dataset& ds) {
  std::ostringstream out;
  out << "axis,p,vz,cz,wy,u,achieved_d\n";
  for (const LabeledSample& s : ds.samples) {
    out << axis_name(s.axis) << ',' << format_double(axis_coordinate(s.axis, s.state))
        << ',' << format_double(s.state.vz) << ',' << format_double(s.state.cz)
        << ',' << format_double(s.state.wy) << ',' << format_double(s.input)
        << ',' << format_double(s.achieved_d) << '\n';
  }
  return out.str();
}

void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path) {
  atomic_write_file(path, dataset_to_csv(ds));
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  const std::string contents = read_file(path);
  std::istringstream in(contents);
  std::string line;
  if (!std::getline(in, line) || line != "axis,p,vz,cz,wy,u,achieved_d") {
    throw std::runtime_error("bad dataset header in " + path.string());
  }
  Dataset ds;
  bool first = true;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 7) {
      throw std::runtime_error("bad dataset row at line " +
                               std::to_string(line_no) + " of " +
                               path.string());
    }
    LabeledSample s;
    s.axis = axis_from_name(fields[0]);
    const double p = parse_double(fields[1]);
    s.state.px = s.axis == Axis::X ? p : 0.0;
    s.state.py = s.axis == Axis::Y ? p : 0.0;
    s.state.vz = parse_double(fields[2]);
    s.state.cz = parse_double(fields[3]);
    s.state.wy = parse_double(fields[4]);
    s.input = parse_double(fields[5]);
    s.achieved_d = parse_double(fields[6]);
    s.status = p == 0.0 ? SolveStatus::degenerate : SolveStatus::solved;
    if (first) {
      ds.axis = s.axis;
      first = false;
    } else if (s.axis != ds.axis) {
      throw std::runtime_error("mixed axes in dataset " + path.string());
    }
    ds.samples.push_back(s);
  }
  return ds;
}

}  // namespace ibvs
