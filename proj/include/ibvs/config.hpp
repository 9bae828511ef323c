#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ibvs/dataset.hpp"
#include "ibvs/mlp.hpp"
#include "ibvs/simulator.hpp"
#include "ibvs/verifier.hpp"

namespace ibvs {

// Everything the pipeline needs, with defaults matching the interception
// case study: eta = 2, the standard state box, vz = 15 m/s, 5 epochs.
struct PipelineConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  Roi roi;
  SearchConfig search;
  std::size_t samples_per_axis = 100000;
  SamplingScheme sampling = SamplingScheme::uniform_random;
  // gen-data exits nonzero when more than this fraction of states is
  // infeasible.
  double max_infeasible_fraction = 0.01;
  TrainConfig train;
  GridSpec grid;
  double violation_threshold = 0.10;
  SimConfig sim;
  std::vector<SimState> initial_states = default_initial_state_vector();

  // Throws ConfigError with a description of the first problem.
  void validate() const;
};

// Serialized form used by --config and --dump-config.
std::string config_to_json(const PipelineConfig& cfg);

// Parses over the defaults: absent keys keep their default value, unknown
// keys are rejected. Throws ConfigError.
PipelineConfig config_from_json(const std::string& text);

PipelineConfig load_config_file(const std::filesystem::path& path);

}  // namespace ibvs
