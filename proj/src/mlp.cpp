#include "ibvs/mlp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

#include "ibvs/errors.hpp"
#include "ibvs/io.hpp"
#include "ibvs/rng.hpp"

namespace ibvs {

namespace {

// Activations per layer for one forward pass, reused across samples.
struct Workspace {
  std::vector<std::vector<double>> act;  // act[0] = scaled input

  explicit Workspace(const std::vector<int>& sizes) {
    act.resize(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      act[i].assign(static_cast<std::size_t>(sizes[i]), 0.0);
    }
  }
};

// Forward pass into ws; returns the scaled output (m/s).
double forward_ws(const MlpParams& p, double in_p, double vz, double cz,
                  Workspace& ws) {
  const auto scaled = p.scaler.apply(in_p, vz, cz);
  ws.act[0][0] = scaled[0];
  ws.act[0][1] = scaled[1];
  ws.act[0][2] = scaled[2];
  const std::size_t n_layers = p.weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int n_in = p.layer_sizes[l];
    const int n_out = p.layer_sizes[l + 1];
    const std::vector<double>& w = p.weights[l];
    const std::vector<double>& b = p.biases[l];
    const std::vector<double>& x = ws.act[l];
    std::vector<double>& y = ws.act[l + 1];
    const bool hidden = l + 1 < n_layers;
    for (int o = 0; o < n_out; ++o) {
      double acc = b[static_cast<std::size_t>(o)];
      const double* row = w.data() + static_cast<std::size_t>(o) * n_in;
      for (int i = 0; i < n_in; ++i) acc += row[i] * x[static_cast<std::size_t>(i)];
      y[static_cast<std::size_t>(o)] = hidden ? std::tanh(acc) : acc;
    }
  }
  return p.output_scale * ws.act[n_layers][0];
}

void check_params(const MlpParams& p) {
  if (!p.shapes_consistent()) {
    throw std::invalid_argument("inconsistent network shapes");
  }
}

}  // namespace

InputScaler InputScaler::from_roi(Axis axis, const Roi& roi) {
  const Interval& p_iv = axis == Axis::X ? roi.px : roi.py;
  InputScaler s;
  s.shift = {p_iv.mid(), roi.vz.mid(), roi.cz.mid()};
  s.scale = {p_iv.half_width(), roi.vz.half_width(), roi.cz.half_width()};
  for (double v : s.scale) {
    if (!(v > 0.0)) throw std::invalid_argument("input scaler needs a box with positive width");
  }
  return s;
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    n += static_cast<std::size_t>(layer_sizes[l]) * layer_sizes[l + 1] +
         layer_sizes[l + 1];
  }
  return n;
}

bool MlpParams::shapes_consistent() const {
  if (layer_sizes.size() < 2) return false;
  if (layer_sizes.front() != 3 || layer_sizes.back() != 1) return false;
  if (weights.size() != layer_sizes.size() - 1) return false;
  if (biases.size() != layer_sizes.size() - 1) return false;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    if (layer_sizes[l] <= 0 || layer_sizes[l + 1] <= 0) return false;
    if (weights[l].size() != static_cast<std::size_t>(layer_sizes[l]) *
                                 static_cast<std::size_t>(layer_sizes[l + 1]))
      return false;
    if (biases[l].size() != static_cast<std::size_t>(layer_sizes[l + 1]))
      return false;
  }
  for (double s : scaler.scale) {
    if (!(s > 0.0)) return false;
  }
  return output_scale > 0.0;
}

MlpParams mlp_init(const std::vector<int>& layer_sizes, std::uint64_t seed,
                   const InputScaler& scaler, double output_scale) {
  if (layer_sizes.size() < 2 || layer_sizes.front() != 3 ||
      layer_sizes.back() != 1) {
    throw ConfigError("layer sizes must start at 3 inputs and end at 1 output");
  }
  for (int s : layer_sizes) {
    if (s <= 0) throw ConfigError("layer sizes must be positive");
  }
  MlpParams p;
  p.layer_sizes = layer_sizes;
  p.scaler = scaler;
  p.output_scale = output_scale;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int n_in = layer_sizes[l];
    const int n_out = layer_sizes[l + 1];
    const double r = std::sqrt(6.0 / (n_in + n_out));
    std::vector<double> w(static_cast<std::size_t>(n_in) * n_out);
    for (double& v : w) v = rng.uniform(-r, r);
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(static_cast<std::size_t>(n_out), 0.0);
  }
  check_params(p);
  return p;
}

double forward(const MlpParams& p, double input_p, double vz, double cz) {
  check_params(p);
  if (!std::isfinite(input_p) || !std::isfinite(vz) || !std::isfinite(cz)) {
    throw std::invalid_argument("non-finite network input");
  }
  Workspace ws(p.layer_sizes);
  return forward_ws(p, input_p, vz, cz, ws);
}

Gradients Gradients::zeros_like(const MlpParams& p) {
  Gradients g;
  g.weights.reserve(p.weights.size());
  g.biases.reserve(p.biases.size());
  for (const auto& w : p.weights) g.weights.emplace_back(w.size(), 0.0);
  for (const auto& b : p.biases) g.biases.emplace_back(b.size(), 0.0);
  return g;
}

double backward(const MlpParams& p, std::span<const Example> batch,
                Gradients& grad) {
  check_params(p);
  if (batch.empty()) {
    throw std::domain_error("empty batch");
  }
  for (auto& w : grad.weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : grad.biases) std::fill(b.begin(), b.end(), 0.0);

  const std::size_t n_layers = p.weights.size();
  Workspace ws(p.layer_sizes);
  std::vector<std::vector<double>> delta;  // d(loss)/d(pre-activation)
  delta.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    delta[l].assign(static_cast<std::size_t>(p.layer_sizes[l + 1]), 0.0);
  }

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const Example& ex : batch) {
    const double y = forward_ws(p, ex.p, ex.vz, ex.cz, ws);
    const double err = y - ex.target;
    loss += err * err * inv_b;

    // Output layer is linear: y = output_scale * pre.
    delta[n_layers - 1][0] = 2.0 * err * inv_b * p.output_scale;

    for (std::size_t l = n_layers; l-- > 0;) {
      const int n_in = p.layer_sizes[l];
      const int n_out = p.layer_sizes[l + 1];
      const std::vector<double>& x = ws.act[l];
      std::vector<double>& g_w = grad.weights[l];
      std::vector<double>& g_b = grad.biases[l];
      const std::vector<double>& d = delta[l];
      for (int o = 0; o < n_out; ++o) {
        const double dv = d[static_cast<std::size_t>(o)];
        g_b[static_cast<std::size_t>(o)] += dv;
        double* g_row = g_w.data() + static_cast<std::size_t>(o) * n_in;
        for (int i = 0; i < n_in; ++i) g_row[i] += dv * x[static_cast<std::size_t>(i)];
      }
      if (l == 0) break;
      // Propagate through tanh of the layer below.
      const std::vector<double>& w = p.weights[l];
      const std::vector<double>& h = ws.act[l];
      std::vector<double>& d_prev = delta[l - 1];
      for (int i = 0; i < n_in; ++i) {
        double acc = 0.0;
        for (int o = 0; o < n_out; ++o) {
          acc += w[static_cast<std::size_t>(o) * n_in + i] *
                 d[static_cast<std::size_t>(o)];
        }
        const double hv = h[static_cast<std::size_t>(i)];
        d_prev[static_cast<std::size_t>(i)] = acc * (1.0 - hv * hv);
      }
    }
  }
  return loss;
}

double evaluate_mse(const MlpParams& p, std::span<const Example> examples) {
  check_params(p);
  if (examples.empty()) return 0.0;
  Workspace ws(p.layer_sizes);
  double sum = 0.0;
  for (const Example& ex : examples) {
    const double err = forward_ws(p, ex.p, ex.vz, ex.cz, ws) - ex.target;
    sum += err * err;
  }
  return sum / static_cast<double>(examples.size());
}

std::vector<Example> examples_from_dataset(const Dataset& ds) {
  std::vector<Example> out;
  out.reserve(ds.samples.size());
  for (const LabeledSample& s : ds.samples) {
    Example ex;
    ex.p = ds.axis == Axis::X ? s.state.px : s.state.py;
    ex.vz = s.state.vz;
    ex.cz = s.state.cz;
    ex.target = s.input;
    out.push_back(ex);
  }
  return out;
}

MlpParams train(const MlpParams& p0, const Dataset& ds,
                const TrainConfig& cfg, TrainReport* report) {
  check_params(p0);
  if (!cfg.valid()) {
    throw ConfigError("invalid training config");
  }
  if (ds.samples.empty()) {
    throw std::invalid_argument("empty dataset");
  }
  const auto t_start = std::chrono::steady_clock::now();

  const std::vector<Example> all = examples_from_dataset(ds);
  Rng rng(cfg.seed);

  // Holdout split on a seeded permutation.
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  std::size_t n_holdout = static_cast<std::size_t>(
      std::floor(cfg.holdout_fraction * static_cast<double>(all.size())));
  if (all.size() - n_holdout == 0) n_holdout = 0;
  std::vector<Example> train_set, holdout_set;
  train_set.reserve(all.size() - n_holdout);
  holdout_set.reserve(n_holdout);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_holdout ? holdout_set : train_set).push_back(all[order[i]]);
  }

  MlpParams p = p0;
  TrainReport rep;
  rep.train_mse.push_back(evaluate_mse(p, train_set));
  if (!holdout_set.empty()) {
    rep.holdout_mse.push_back(evaluate_mse(p, holdout_set));
  }

  Gradients grad = Gradients::zeros_like(p);
  Gradients m = Gradients::zeros_like(p);  // Adam first moment
  Gradients v = Gradients::zeros_like(p);  // Adam second moment
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  long step = 0;

  std::vector<std::size_t> idx(train_set.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<Example> batch;
  batch.reserve(static_cast<std::size_t>(cfg.batch_size));

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle) rng.shuffle(idx);
    for (std::size_t start = 0; start < idx.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(idx.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_set[idx[i]]);
      const double loss = backward(p, batch, grad);
      if (!std::isfinite(loss)) {
        throw TrainingError("loss diverged at epoch " + std::to_string(epoch) +
                            ", step " + std::to_string(step));
      }
      ++step;
      if (cfg.optimizer == Optimizer::sgd) {
        for (std::size_t l = 0; l < p.weights.size(); ++l) {
          for (std::size_t k = 0; k < p.weights[l].size(); ++k) {
            p.weights[l][k] -= cfg.learning_rate * grad.weights[l][k];
          }
          for (std::size_t k = 0; k < p.biases[l].size(); ++k) {
            p.biases[l][k] -= cfg.learning_rate * grad.biases[l][k];
          }
        }
      } else {
        const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
        auto adam_update = [&](std::vector<double>& theta,
                               const std::vector<double>& g,
                               std::vector<double>& m1, std::vector<double>& m2) {
          for (std::size_t k = 0; k < theta.size(); ++k) {
            m1[k] = kBeta1 * m1[k] + (1.0 - kBeta1) * g[k];
            m2[k] = kBeta2 * m2[k] + (1.0 - kBeta2) * g[k] * g[k];
            const double mhat = m1[k] / bc1;
            const double vhat = m2[k] / bc2;
            theta[k] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + kEps);
          }
        };
        for (std::size_t l = 0; l < p.weights.size(); ++l) {
          adam_update(p.weights[l], grad.weights[l], m.weights[l], v.weights[l]);
          adam_update(p.biases[l], grad.biases[l], m.biases[l], v.biases[l]);
        }
      }
    }
    rep.train_mse.push_back(evaluate_mse(p, train_set));
    if (!holdout_set.empty()) {
      rep.holdout_mse.push_back(evaluate_mse(p, holdout_set));
    }
    if (!std::isfinite(rep.train_mse.back())) {
      throw TrainingError("loss diverged after epoch " + std::to_string(epoch));
    }
  }

  if (!holdout_set.empty()) {
    rep.final_holdout_rmse = std::sqrt(rep.holdout_mse.back());
    Workspace ws(p.layer_sizes);
    double abs_sum = 0.0;
    for (const Example& ex : holdout_set) {
      abs_sum += std::abs(forward_ws(p, ex.p, ex.vz, ex.cz, ws) - ex.target);
    }
    rep.final_holdout_mae = abs_sum / static_cast<double>(holdout_set.size());
  }
  rep.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t_start)
                         .count();
  if (report != nullptr) *report = rep;
  return p;
}

std::string model_to_json(const MlpParams& p) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["layer_sizes"] = p.layer_sizes;
  j["input_shift"] = p.scaler.shift;
  j["input_scale"] = p.scaler.scale;
  j["output_scale"] = p.output_scale;
  j["weights"] = p.weights;
  j["biases"] = p.biases;
  return j.dump(1) + "\n";
}

MlpParams model_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ModelLoadError(ModelLoadError::Kind::corrupt,
                         "model file is not valid JSON");
  }
  if (!j.contains("format_version") || !j["format_version"].is_number_integer() ||
      j["format_version"].get<int>() != 1) {
    throw ModelLoadError(ModelLoadError::Kind::bad_version,
                         "unsupported model format version");
  }
  MlpParams p;
  try {
    p.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    p.scaler.shift = j.at("input_shift").get<std::array<double, 3>>();
    p.scaler.scale = j.at("input_scale").get<std::array<double, 3>>();
    p.output_scale = j.at("output_scale").get<double>();
    p.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    p.biases = j.at("biases").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw ModelLoadError(ModelLoadError::Kind::corrupt,
                         std::string("malformed model file: ") + e.what());
  }
  if (!p.shapes_consistent()) {
    throw ModelLoadError(ModelLoadError::Kind::bad_shape,
                         "model shapes are inconsistent");
  }
  return p;
}

void save_model(const MlpParams& p, const std::filesystem::path& path) {
  check_params(p);
  atomic_write_file(path, model_to_json(p));
}

MlpParams load_model(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw ModelLoadError(ModelLoadError::Kind::io, e.what());
  }
  return model_from_json(text);
}

}  // namespace ibvs
