#include "ibvs/pipeline.hpp"

#include <cmath>
#include <sstream>

#include "ibvs/camera_geometry.hpp"
#include "ibvs/io.hpp"

namespace ibvs {

StageSeeds stage_seeds(std::uint64_t master) {
  return {master + 1, master + 2, master + 3, master + 4, master + 5,
          master + 6};
}

GenDataResult run_gen_data(const PipelineConfig& cfg) {
  cfg.validate();
  const StageSeeds seeds = stage_seeds(cfg.seed);
  GenDataResult out;
  out.x = generate_dataset(Axis::X, cfg.roi, cfg.samples_per_axis, cfg.search,
                           seeds.gen_x, &out.report_x, cfg.sampling);
  out.y = generate_dataset(Axis::Y, cfg.roi, cfg.samples_per_axis, cfg.search,
                           seeds.gen_y, &out.report_y, cfg.sampling);
  return out;
}

TrainResult run_train(const Dataset& ds, const PipelineConfig& cfg) {
  const StageSeeds seeds = stage_seeds(cfg.seed);
  const bool is_x = ds.axis == Axis::X;
  const InputScaler scaler = InputScaler::from_roi(ds.axis, cfg.roi);
  const double output_scale =
      std::max(std::abs(cfg.search.input_bounds.lo),
               std::abs(cfg.search.input_bounds.hi));
  MlpParams p0 = mlp_init(kPolicyLayerSizes,
                          is_x ? seeds.init_x : seeds.init_y, scaler,
                          output_scale);
  TrainConfig tc = cfg.train;
  tc.seed = is_x ? seeds.train_x : seeds.train_y;
  TrainResult out;
  out.model = train(p0, ds, tc, &out.report);
  return out;
}

std::string loss_curve_csv(const TrainReport& report) {
  std::ostringstream out;
  out << "epoch,train_mse,holdout_mse\n";
  for (std::size_t k = 0; k < report.train_mse.size(); ++k) {
    out << k << ',' << format_double(report.train_mse[k]) << ',';
    if (k < report.holdout_mse.size()) {
      out << format_double(report.holdout_mse[k]);
    }
    out << '\n';
  }
  return out.str();
}

VerifyResult run_verify(const MlpParams& policy, Axis axis,
                        const PipelineConfig& cfg) {
  VerifyResult out;
  out.report = verify_axis(policy, axis, cfg.grid);
  out.summary = violation_summary(out.report);
  return out;
}

std::vector<Trajectory> run_simulations(const MlpParams& policy_x,
                                        const MlpParams& policy_y,
                                        const SimConfig& sim,
                                        const std::vector<SimState>& starts) {
  std::vector<Trajectory> out;
  out.reserve(starts.size());
  const Controller cx = controller_from_policy(policy_x);
  const Controller cy = controller_from_policy(policy_y);
  for (const SimState& s0 : starts) {
    out.push_back(run_closed_loop(cx, cy, s0, sim));
  }
  return out;
}

namespace {

bool converged(const Trajectory& traj) {
  if (traj.timed_out) return false;
  const double v0 = traj.front().Vx + traj.front().Vy;
  const double v_end = traj.back().Vx + traj.back().Vy;
  return v_end < v0 / 10.0;
}

void append_sim_block(std::ostringstream& out, const char* name,
                      const std::vector<Trajectory>& trajs) {
  out << name << " runs:\n";
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const TrajectoryPoint& a = trajs[i].front();
    const TrajectoryPoint& b = trajs[i].back();
    out << "  start (cz=" << format_double(a.cz) << ", px=" << format_double(a.px)
        << ", py=" << format_double(a.py) << ") -> V " << format_double(a.Vx + a.Vy)
        << " -> " << format_double(b.Vx + b.Vy)
        << (converged(trajs[i]) ? "  converged" : "  NOT converged")
        << (trajs[i].timed_out ? " (timed out)" : "") << "\n";
  }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg,
                            const std::filesystem::path& out_dir) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);

  PipelineResult res;
  res.data = run_gen_data(cfg);
  write_dataset_csv(res.data.x, out_dir / "S_x.csv");
  write_dataset_csv(res.data.y, out_dir / "S_y.csv");
  atomic_write_file(out_dir / "gen_report.txt",
                    "axis x\n" + res.data.report_x.to_text() + "axis y\n" +
                        res.data.report_y.to_text());
  const bool gen_ok =
      res.data.report_x.infeasible_fraction() <= cfg.max_infeasible_fraction &&
      res.data.report_y.infeasible_fraction() <= cfg.max_infeasible_fraction;

  res.train_x = run_train(res.data.x, cfg);
  res.train_y = run_train(res.data.y, cfg);
  save_model(res.train_x.model, out_dir / "model_x.json");
  save_model(res.train_y.model, out_dir / "model_y.json");
  atomic_write_file(out_dir / "loss_x.csv", loss_curve_csv(res.train_x.report));
  atomic_write_file(out_dir / "loss_y.csv", loss_curve_csv(res.train_y.report));

  res.verify_x = run_verify(res.train_x.model, Axis::X, cfg);
  res.verify_y = run_verify(res.train_y.model, Axis::Y, cfg);
  export_roa_csv(res.verify_x.report, out_dir / "roa_x.csv");
  export_roa_csv(res.verify_y.report, out_dir / "roa_y.csv");
  atomic_write_file(out_dir / "roa_summary_x.txt", res.verify_x.summary.to_text());
  atomic_write_file(out_dir / "roa_summary_y.txt", res.verify_y.summary.to_text());
  const bool verify_ok =
      res.verify_x.summary.violation_fraction <= cfg.violation_threshold &&
      res.verify_y.summary.violation_fraction <= cfg.violation_threshold;

  SimConfig sim_true = cfg.sim;
  sim_true.distance_mode = DistanceMode::true_cz;
  SimConfig sim_fab = cfg.sim;
  sim_fab.distance_mode = DistanceMode::fabricated;
  res.sims_true = run_simulations(res.train_x.model, res.train_y.model,
                                  sim_true, cfg.initial_states);
  res.sims_fabricated = run_simulations(res.train_x.model, res.train_y.model,
                                        sim_fab, cfg.initial_states);
  export_trajectory_csv(res.sims_true, out_dir / "trajectories_true.csv");
  export_trajectory_csv(res.sims_fabricated,
                        out_dir / "trajectories_fabricated.csv");

  std::ostringstream sum;
  sum << "pipeline summary\n"
      << "================\n"
      << "dataset x: retained " << res.data.report_x.retained() << "/"
      << res.data.report_x.requested << " (infeasible "
      << res.data.report_x.infeasible << ")\n"
      << "dataset y: retained " << res.data.report_y.retained() << "/"
      << res.data.report_y.requested << " (infeasible "
      << res.data.report_y.infeasible << ")\n"
      << "train x: initial mse " << format_double(res.train_x.report.train_mse.front())
      << ", final mse " << format_double(res.train_x.report.train_mse.back())
      << ", holdout rmse " << format_double(res.train_x.report.final_holdout_rmse)
      << "\n"
      << "train y: initial mse " << format_double(res.train_y.report.train_mse.front())
      << ", final mse " << format_double(res.train_y.report.train_mse.back())
      << ", holdout rmse " << format_double(res.train_y.report.final_holdout_rmse)
      << "\n"
      << "verify x: violation fraction "
      << format_double(res.verify_x.summary.violation_fraction) << "\n"
      << "verify y: violation fraction "
      << format_double(res.verify_y.summary.violation_fraction) << "\n";
  const double bound_cz1 = res.verify_x.summary.static_error_bound_at(1.0);
  const double hit_limit = max_hit_offset(kReferenceTargetRadius, 1.0);
  sum << "static-error bound at cz=1m: " << format_double(bound_cz1)
      << " (hit limit for r=" << format_double(kReferenceTargetRadius)
      << "m target: " << format_double(hit_limit) << ", "
      << (bound_cz1 <= hit_limit ? "hit" : "miss") << ")\n";
  append_sim_block(sum, "simulation (true distance)", res.sims_true);
  append_sim_block(sum, "simulation (fabricated distance)", res.sims_fabricated);
  res.summary_text = sum.str();
  atomic_write_file(out_dir / "summary.txt", res.summary_text);

  res.quality_ok = gen_ok && verify_ok;
  return res;
}

}  // namespace ibvs
