#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ibvs/config.hpp"

namespace ibvs {

// Stage seeds derived from the master seed so that each artifact is
// reproducible in isolation.
struct StageSeeds {
  std::uint64_t gen_x, gen_y, init_x, init_y, train_x, train_y;
};
StageSeeds stage_seeds(std::uint64_t master);

struct GenDataResult {
  Dataset x, y;
  GenerationReport report_x, report_y;
};

GenDataResult run_gen_data(const PipelineConfig& cfg);

struct TrainResult {
  MlpParams model;
  TrainReport report;
};

// Initializes a fresh policy for the dataset's axis and fits the labels.
TrainResult run_train(const Dataset& ds, const PipelineConfig& cfg);

// epoch,train_mse,holdout_mse rows; epoch 0 is the untrained loss.
std::string loss_curve_csv(const TrainReport& report);

struct VerifyResult {
  RoaReport report;
  ViolationSummary summary;
};

VerifyResult run_verify(const MlpParams& policy, Axis axis,
                        const PipelineConfig& cfg);

// One run per configured initial state.
std::vector<Trajectory> run_simulations(const MlpParams& policy_x,
                                        const MlpParams& policy_y,
                                        const SimConfig& sim,
                                        const std::vector<SimState>& starts);

// Reference target radius (m) for the hit-offset comparison in the summary.
inline constexpr double kReferenceTargetRadius = 0.3;

struct PipelineResult {
  GenDataResult data;
  TrainResult train_x, train_y;
  VerifyResult verify_x, verify_y;
  std::vector<Trajectory> sims_true;
  std::vector<Trajectory> sims_fabricated;
  std::string summary_text;
  bool quality_ok = true;  // infeasibility + violation gates
};

// Full reproduction: generate, train, verify, simulate (true and fabricated
// distance), write every artifact under out_dir.
PipelineResult run_pipeline(const PipelineConfig& cfg,
                            const std::filesystem::path& out_dir);

}  // namespace ibvs
