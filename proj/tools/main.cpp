// Command-line front end for the Lyapunov-constrained policy pipeline:
// dataset synthesis, policy training, sample-based stability verification,
// and closed-loop interception simulation.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ibvs/config.hpp"
#include "ibvs/errors.hpp"
#include "ibvs/io.hpp"
#include "ibvs/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ibvs;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitQualityGate = 3;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  double eta = 0.0;
  int epochs = 0;
  std::string grid;
  bool dry_run = false;
  bool dump_config = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_flag("--dry-run", flags.dry_run,
                "print the resolved config and exit");
  cmd->add_flag("--dump-config", flags.dump_config,
                "print the resolved config and exit");
}

bool flag_given(const CLI::App* cmd, const std::string& name) {
  const CLI::Option* opt = cmd->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

PipelineConfig resolve_config(const CLI::App* cmd, const CommonFlags& flags) {
  PipelineConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = load_config_file(flags.config_path);
  }
  if (flag_given(cmd, "--seed")) cfg.seed = flags.seed;
  if (flag_given(cmd, "--out")) cfg.out_dir = flags.out_dir;
  if (flag_given(cmd, "--eta")) cfg.search.eta = flags.eta;
  if (flag_given(cmd, "--epochs")) cfg.train.epochs = flags.epochs;
  if (flag_given(cmd, "--grid")) {
    const auto sep = flags.grid.find('x');
    try {
      if (sep == std::string::npos) {
        cfg.grid.p_count = std::stoi(flags.grid);
        cfg.grid.cz_count = cfg.grid.p_count;
      } else {
        cfg.grid.p_count = std::stoi(flags.grid.substr(0, sep));
        cfg.grid.cz_count = std::stoi(flags.grid.substr(sep + 1));
      }
    } catch (const std::exception&) {
      throw ConfigError("--grid expects N or NxM");
    }
  }
  cfg.validate();
  return cfg;
}

// Returns true when the command should stop after printing the config.
bool handle_preflight(const PipelineConfig& cfg, const CommonFlags& flags) {
  if (flags.dump_config || flags.dry_run) {
    std::cout << config_to_json(cfg);
    return true;
  }
  return false;
}

int cmd_gen_data(const CLI::App* cmd, const CommonFlags& flags) {
  const PipelineConfig cfg = resolve_config(cmd, flags);
  if (handle_preflight(cfg, flags)) return kExitOk;
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  const GenDataResult res = run_gen_data(cfg);
  write_dataset_csv(res.x, out / "S_x.csv");
  write_dataset_csv(res.y, out / "S_y.csv");
  atomic_write_file(out / "gen_report.txt",
                    "axis x\n" + res.report_x.to_text() + "axis y\n" +
                        res.report_y.to_text());
  std::cout << "axis x\n" << res.report_x.to_text();
  std::cout << "axis y\n" << res.report_y.to_text();
  if (res.report_x.infeasible_fraction() > cfg.max_infeasible_fraction ||
      res.report_y.infeasible_fraction() > cfg.max_infeasible_fraction) {
    std::cerr << "error: infeasible fraction exceeds "
              << cfg.max_infeasible_fraction << "\n";
    return kExitQualityGate;
  }
  return kExitOk;
}

int cmd_train(const CLI::App* cmd, const CommonFlags& flags,
              const std::string& dataset_path) {
  const PipelineConfig cfg = resolve_config(cmd, flags);
  if (handle_preflight(cfg, flags)) return kExitOk;
  if (!fs::exists(dataset_path)) {
    std::cerr << "error: dataset not found: " << dataset_path << "\n";
    return kExitIo;
  }
  const Dataset ds = read_dataset_csv(dataset_path);
  if (ds.samples.empty()) {
    std::cerr << "error: dataset is empty: " << dataset_path << "\n";
    return kExitValidation;
  }
  const TrainResult res = run_train(ds, cfg);
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  const std::string tag = axis_name(ds.axis);
  save_model(res.model, out / ("model_" + tag + ".json"));
  atomic_write_file(out / ("loss_" + tag + ".csv"), loss_curve_csv(res.report));
  std::cout << "axis " << tag << ": initial mse "
            << format_double(res.report.train_mse.front()) << ", final mse "
            << format_double(res.report.train_mse.back()) << ", holdout rmse "
            << format_double(res.report.final_holdout_rmse) << " ("
            << res.report.wall_seconds << " s)\n";
  return kExitOk;
}

int cmd_verify(const CLI::App* cmd, const CommonFlags& flags,
               const std::string& model_x_path,
               const std::string& model_y_path) {
  const PipelineConfig cfg = resolve_config(cmd, flags);
  if (handle_preflight(cfg, flags)) return kExitOk;
  if (model_x_path.empty() && model_y_path.empty()) {
    std::cerr << "error: provide --model-x and/or --model-y\n";
    return kExitValidation;
  }
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  bool gate_ok = true;
  const auto verify_one = [&](const std::string& path, Axis axis) {
    const MlpParams policy = load_model(path);
    const VerifyResult res = run_verify(policy, axis, cfg);
    const std::string tag = axis_name(axis);
    export_roa_csv(res.report, out / ("roa_" + tag + ".csv"));
    atomic_write_file(out / ("roa_summary_" + tag + ".txt"),
                      res.summary.to_text());
    std::cout << "axis " << tag << ": violation fraction "
              << format_double(res.summary.violation_fraction) << "\n";
    if (res.summary.violation_fraction > cfg.violation_threshold) {
      gate_ok = false;
    }
  };
  if (!model_x_path.empty()) verify_one(model_x_path, Axis::X);
  if (!model_y_path.empty()) verify_one(model_y_path, Axis::Y);
  if (!gate_ok) {
    std::cerr << "error: violation fraction exceeds "
              << cfg.violation_threshold << "\n";
    return kExitQualityGate;
  }
  return kExitOk;
}

int cmd_simulate(const CLI::App* cmd, const CommonFlags& flags,
                 const std::string& model_x_path,
                 const std::string& model_y_path) {
  const PipelineConfig cfg = resolve_config(cmd, flags);
  if (handle_preflight(cfg, flags)) return kExitOk;
  const MlpParams policy_x = load_model(model_x_path);
  const MlpParams policy_y = load_model(model_y_path);
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  const auto trajs =
      run_simulations(policy_x, policy_y, cfg.sim, cfg.initial_states);
  const std::string mode =
      cfg.sim.distance_mode == DistanceMode::true_cz ? "true" : "fabricated";
  export_trajectory_csv(trajs, out / ("trajectories_" + mode + ".csv"));
  for (const Trajectory& t : trajs) {
    const auto& a = t.front();
    const auto& b = t.back();
    std::cout << "start (cz=" << format_double(a.cz)
              << ", px=" << format_double(a.px) << ", py=" << format_double(a.py)
              << "): V " << format_double(a.Vx + a.Vy) << " -> "
              << format_double(b.Vx + b.Vy)
              << (t.timed_out ? " (timed out)" : "") << "\n";
  }
  return kExitOk;
}

int cmd_pipeline(const CLI::App* cmd, const CommonFlags& flags) {
  const PipelineConfig cfg = resolve_config(cmd, flags);
  if (handle_preflight(cfg, flags)) return kExitOk;
  const PipelineResult res = run_pipeline(cfg, cfg.out_dir);
  std::cout << res.summary_text;
  if (!res.quality_ok) {
    std::cerr << "error: quality gate failed (see summary)\n";
    return kExitQualityGate;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Data-free initialization of visual-servoing interception policies: "
      "synthesize decrease-condition datasets, train per-axis networks, "
      "verify stability on dense grids, and simulate the closed loop."};
  app.require_subcommand(1);

  CommonFlags gen_flags, train_flags, verify_flags, sim_flags, pipe_flags;
  std::string dataset_path, model_x_path, model_y_path, sim_model_x,
      sim_model_y;

  CLI::App* gen = app.add_subcommand("gen-data",
                                     "generate decrease-condition datasets");
  add_common(gen, gen_flags);
  gen->add_option("--eta", gen_flags.eta, "decrease-rate weight (> 0)");

  CLI::App* tr = app.add_subcommand("train", "train a policy on a dataset CSV");
  add_common(tr, train_flags);
  tr->add_option("--eta", train_flags.eta, "decrease-rate weight (> 0)");
  tr->add_option("--epochs", train_flags.epochs, "training epochs");
  tr->add_option("--dataset", dataset_path, "dataset CSV path")->required();

  CLI::App* ver = app.add_subcommand("verify",
                                     "evaluate sgn(D) over a state grid");
  add_common(ver, verify_flags);
  ver->add_option("--grid", verify_flags.grid, "grid resolution N or NxM");
  ver->add_option("--model-x", model_x_path, "x-axis model file");
  ver->add_option("--model-y", model_y_path, "y-axis model file");

  CLI::App* sim = app.add_subcommand("simulate",
                                     "closed-loop interception runs");
  add_common(sim, sim_flags);
  sim->add_option("--model-x", sim_model_x, "x-axis model file")->required();
  sim->add_option("--model-y", sim_model_y, "y-axis model file")->required();

  CLI::App* pipe = app.add_subcommand(
      "pipeline", "gen-data + train + verify + simulate with one config");
  add_common(pipe, pipe_flags);
  pipe->add_option("--eta", pipe_flags.eta, "decrease-rate weight (> 0)");
  pipe->add_option("--epochs", pipe_flags.epochs, "training epochs");
  pipe->add_option("--grid", pipe_flags.grid, "grid resolution N or NxM");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(gen, gen_flags);
    if (tr->parsed()) return cmd_train(tr, train_flags, dataset_path);
    if (ver->parsed())
      return cmd_verify(ver, verify_flags, model_x_path, model_y_path);
    if (sim->parsed())
      return cmd_simulate(sim, sim_flags, sim_model_x, sim_model_y);
    if (pipe->parsed()) return cmd_pipeline(pipe, pipe_flags);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ModelLoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ModelLoadError::Kind::io ? kExitIo : kExitValidation;
  } catch (const TrainingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitQualityGate;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
