#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ibvs/dataset.hpp"

namespace ibvs {

// Per-input affine map onto [-1, 1], derived from the state box. Fixed at
// init time; not trained.
struct InputScaler {
  std::array<double, 3> shift{0.0, 0.0, 0.0};
  std::array<double, 3> scale{1.0, 1.0, 1.0};

  // Inputs are (image coordinate, vz, cz).
  static InputScaler from_roi(Axis axis, const Roi& roi);

  std::array<double, 3> apply(double p, double vz, double cz) const {
    return {(p - shift[0]) / scale[0], (vz - shift[1]) / scale[1],
            (cz - shift[2]) / scale[2]};
  }
};

// Feed-forward tanh network. Hidden layers use tanh; the output layer is
// linear and multiplied by output_scale to produce a velocity command.
struct MlpParams {
  std::vector<int> layer_sizes;              // e.g. {3, 16, 16, 16, 1}
  std::vector<std::vector<double>> weights;  // [layer], row-major out x in
  std::vector<std::vector<double>> biases;   // [layer]
  InputScaler scaler;
  double output_scale = 30.0;  // m/s

  std::size_t parameter_count() const;
  bool shapes_consistent() const;
};

inline const std::vector<int> kPolicyLayerSizes{3, 16, 16, 16, 1};

// Deterministic symmetric-uniform init (fan-in/fan-out scaled), zero biases.
MlpParams mlp_init(const std::vector<int>& layer_sizes, std::uint64_t seed,
                   const InputScaler& scaler = InputScaler{},
                   double output_scale = 30.0);

// Velocity command for (image coordinate, vz, cz), m/s.
double forward(const MlpParams& p, double input_p, double vz, double cz);

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static Gradients zeros_like(const MlpParams& p);
};

struct Example {
  double p = 0.0;
  double vz = 0.0;
  double cz = 0.0;
  double target = 0.0;  // m/s
};

// Exact gradient of the batch mean squared error with respect to every
// weight and bias. Returns the batch loss. Throws on an empty batch.
double backward(const MlpParams& p, std::span<const Example> batch,
                Gradients& grad);

// Mean squared error over a set of examples.
double evaluate_mse(const MlpParams& p, std::span<const Example> examples);

enum class Optimizer { sgd, adam };

struct TrainConfig {
  int epochs = 5;
  int batch_size = 128;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::adam;
  bool shuffle = true;
  double holdout_fraction = 0.1;

  bool valid() const {
    return epochs > 0 && batch_size > 0 && learning_rate > 0.0 &&
           holdout_fraction >= 0.0 && holdout_fraction < 1.0;
  }
};

struct TrainReport {
  // Index k holds the full-train-set MSE after k epochs; index 0 is the
  // loss of the untrained parameters.
  std::vector<double> train_mse;
  std::vector<double> holdout_mse;  // same indexing; empty without holdout
  double final_holdout_rmse = 0.0;
  double final_holdout_mae = 0.0;
  double wall_seconds = 0.0;
};

std::vector<Example> examples_from_dataset(const Dataset& ds);

// Minibatch regression of the dataset labels. Deterministic given
// (p0, ds, cfg). Throws TrainingError if the loss becomes non-finite.
MlpParams train(const MlpParams& p0, const Dataset& ds,
                const TrainConfig& cfg, TrainReport* report = nullptr);

// Versioned JSON model file, lossless for finite parameters.
void save_model(const MlpParams& p, const std::filesystem::path& path);
MlpParams load_model(const std::filesystem::path& path);
std::string model_to_json(const MlpParams& p);
MlpParams model_from_json(const std::string& text);

}  // namespace ibvs
