#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ibvs/lyapunov.hpp"

namespace ibvs {

enum class Axis { X, Y };

const char* axis_name(Axis axis);
Axis axis_from_name(const std::string& name);

enum class SearchScheme { closed_form, numeric };

// Controls the per-state input search for the decrease condition
// D(s, u) = -eta * W(p).
struct SearchConfig {
  double eta = 2.0;
  Interval input_bounds{-30.0, 30.0};  // m/s
  double tolerance = 1e-9;             // on |D + eta*W|
  SearchScheme scheme = SearchScheme::closed_form;

  bool valid() const {
    return eta > 0.0 && input_bounds.valid() && tolerance > 0.0;
  }
};

enum class SolveStatus {
  solved,      // exact decrease rate achieved inside bounds
  clamped,     // bound-constrained minimizer, still D < 0
  degenerate,  // image coordinate is zero; labeled with the limit input
  infeasible   // no input in bounds gives D < 0
};

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  double input = 0.0;       // m/s (best found when infeasible)
  double achieved_d = 0.0;  // D at `input`
};

// Input that achieves D = -eta * W exactly. The expression is affine in the
// state and needs no search. Throws DegenerateStateError when the relevant
// image coordinate is zero (D < 0 is infeasible there).
double solve_input_closed_form(Axis axis, const InterceptState& s, double eta);

// Bounded search: coarse 1024-point grid over the input bounds followed by
// golden-section refinement of |D + eta*W| restricted to D < 0. Independent
// of the closed-form expression.
SolveResult solve_input_numeric(Axis axis, const InterceptState& s,
                                const SearchConfig& cfg);

enum class SamplingScheme { uniform_random, grid };

// n states inside the box, deterministic given the seed. The grid scheme
// places round(n^(1/5)) points per dimension, so the returned count is the
// nearest fifth power.
std::vector<InterceptState> sample_roi(const Roi& roi, std::size_t n,
                                       std::uint64_t seed,
                                       SamplingScheme scheme);

struct LabeledSample {
  Axis axis = Axis::X;
  InterceptState state;
  double input = 0.0;       // m/s
  double achieved_d = 0.0;  // 1/s
  SolveStatus status = SolveStatus::solved;
};

struct GenerationReport {
  std::size_t requested = 0;
  std::size_t solved = 0;
  std::size_t clamped = 0;
  std::size_t degenerate = 0;
  std::size_t infeasible = 0;  // dropped

  std::size_t retained() const { return solved + clamped + degenerate; }
  double infeasible_fraction() const {
    return requested == 0 ? 0.0
                          : static_cast<double>(infeasible) /
                                static_cast<double>(requested);
  }
  std::string to_text() const;
};

struct Dataset {
  Axis axis = Axis::X;
  Roi roi;
  double eta = 2.0;
  std::uint64_t seed = 0;
  std::vector<LabeledSample> samples;
};

// Samples the box, solves each state per cfg.scheme, and keeps every sample
// with D < 0 plus the degenerate zero-coordinate states, which are labeled
// with the limit of the closed-form input so the learned map stays continuous
// through the origin. Infeasible states are dropped and counted.
Dataset generate_dataset(Axis axis, const Roi& roi, std::size_t n,
                         const SearchConfig& cfg, std::uint64_t seed,
                         GenerationReport* report = nullptr,
                         SamplingScheme sampling = SamplingScheme::uniform_random);

// CSV interchange: header `axis,p,vz,cz,wy,u,achieved_d`, where p is the
// image coordinate of the dataset's axis.
void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path);
std::string dataset_to_csv(const Dataset& ds);

// Reads the CSV back. The off-axis image coordinate is not stored in the
// file and is restored as zero.
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace ibvs
