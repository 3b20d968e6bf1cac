// vqf: run the orientation filters on CSV recordings, generate synthetic
// recordings, and evaluate estimates against ground truth.
//
// Exit codes: 0 success, 1 runtime error, 2 usage or parse error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vqf/csv_io.hpp"
#include "vqf/metrics.hpp"
#include "vqf/offline.hpp"
#include "vqf/params.hpp"
#include "vqf/streams.hpp"
#include "vqf/synth.hpp"

namespace {

// Raised for bad user input that should end with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw std::runtime_error("cannot write " + path);
}

std::string flag_name(std::string_view field) {
  std::string s(field);
  for (auto& c : s) {
    if (c == '_') c = '-';
  }
  return "--" + s;
}

struct RunOptions {
  std::string mode = "full";
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::optional<double> rate;
  std::string params_file;
  std::map<std::string, std::string> overrides;
};

struct SynthOptions {
  std::string spec_file;
  double rate = 100.0;
  std::string imu_out;
  std::string truth_out;
  bool no_mag = false;
};

struct EvalOptions {
  std::string estimate;
  std::string truth;
  std::string quat = "9d";
  std::size_t skip = 0;
  std::string output;
};

vqf::VqfParams build_params(const RunOptions& opt, CLI::App& run) {
  vqf::VqfParams params = opt.mode == "basic" ? vqf::VqfParams::basic() : vqf::VqfParams{};
  if (!opt.params_file.empty()) {
    try {
      params = vqf::parse_key_value(read_file(opt.params_file), params);
    } catch (const std::invalid_argument& e) {
      throw UsageError(opt.params_file + ": " + e.what());
    }
  }
  for (const auto& [name, value] : opt.overrides) {
    if (run.count(flag_name(name)) == 0) continue;
    try {
      vqf::set_param(params, name, value);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (opt.mode == "basic") {
    params.motion_bias_est = false;
    params.rest_bias_est = false;
    params.mag_dist_rejection = false;
  }
  try {
    vqf::validate(params);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return params;
}

// Offline estimation needs finite data: run it on the finite rows only and
// fill skipped rows with the preceding estimate.
std::string run_offline(const vqf::csv::ImuData& data, double ts, const vqf::VqfParams& params,
                        std::size_t& skipped) {
  const std::size_t n = data.gyr.size();
  std::vector<std::size_t> keep;
  std::vector<vqf::Vec3> gyr, acc, mag;
  for (std::size_t i = 0; i < n; ++i) {
    const bool ok = vqf::is_finite(data.gyr[i]) && vqf::is_finite(data.acc[i]) &&
                    (data.mag.empty() || vqf::is_finite(data.mag[i]));
    if (!ok) continue;
    keep.push_back(i);
    gyr.push_back(data.gyr[i]);
    acc.push_back(data.acc[i]);
    if (!data.mag.empty()) mag.push_back(data.mag[i]);
  }
  skipped = n - keep.size();
  const vqf::OfflineResult res = vqf::offline_vqf(gyr, acc, mag, ts, params, vqf::Execution::serial);

  std::vector<vqf::EstimateRecord> records(n);
  std::size_t j = 0;
  vqf::EstimateRecord prev;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < keep.size() && keep[j] == i) {
      prev = vqf::EstimateRecord{res.q6[j], res.q9[j], res.delta[j], res.bias[j], res.bias_sigma[j],
                                 res.rest[j] != 0, res.mag_disturbed[j] != 0, false};
      records[i] = prev;
      ++j;
    } else {
      records[i] = prev;
      records[i].skipped = true;
    }
  }
  return vqf::csv::estimates_csv(records);
}

int cmd_run(const RunOptions& opt, CLI::App& run) {
  if (!opt.outputs.empty() && opt.outputs.size() != opt.inputs.size()) {
    throw UsageError("number of outputs must match number of inputs");
  }
  if (opt.outputs.empty() && opt.inputs.size() > 1) {
    throw UsageError("multiple inputs need one -o per input");
  }
  if (opt.rate && !(*opt.rate > 0.0)) throw UsageError("--rate must be positive");
  const vqf::VqfParams params = build_params(opt, run);

  std::vector<vqf::csv::ImuData> data;
  std::vector<double> ts;
  for (const auto& path : opt.inputs) {
    try {
      data.push_back(vqf::csv::read_imu(vqf::csv::parse_table(read_file(path))));
    } catch (const vqf::csv::ParseError& e) {
      throw UsageError(path + ": " + e.what());
    }
    const auto& d = data.back();
    double t = opt.rate ? 1.0 / *opt.rate : 0.01;
    if (d.ts) {
      if (opt.rate && std::abs(*d.ts - t) > 0.01 * t) {
        throw UsageError(path + ": time column disagrees with --rate");
      }
      t = *d.ts;
    }
    ts.push_back(t);
  }

  std::vector<std::string> outputs(data.size());
  std::vector<std::size_t> skipped(data.size(), 0);
  if (opt.mode == "offline") {
    std::vector<std::string> errors(data.size());
    const long n = static_cast<long>(data.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) {
      try {
        outputs[i] = run_offline(data[i], ts[i], params, skipped[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
    for (std::size_t i = 0; i < errors.size(); ++i) {
      if (!errors[i].empty()) throw std::runtime_error(opt.inputs[i] + ": " + errors[i]);
    }
  } else {
    std::vector<vqf::StreamInput> streams;
    for (std::size_t i = 0; i < data.size(); ++i) {
      streams.push_back({ts[i], data[i].gyr, data[i].acc, data[i].mag});
    }
    const auto results = vqf::process_streams(streams, params);
    for (std::size_t i = 0; i < results.size(); ++i) {
      for (const auto& r : results[i]) skipped[i] += r.skipped ? 1 : 0;
      outputs[i] = vqf::csv::estimates_csv(results[i]);
    }
  }

  for (std::size_t i = 0; i < data.size(); ++i) {
    if (skipped[i] > 0) {
      std::cerr << "warning: " << opt.inputs[i] << ": " << skipped[i] << " rows with non-finite values skipped\n";
    }
    write_output(opt.outputs.empty() ? std::string{} : opt.outputs[i], outputs[i]);
  }
  return 0;
}

int cmd_synth(const SynthOptions& opt) {
  if (!(opt.rate > 0.0)) throw UsageError("--rate must be positive");
  vqf::synth::Dataset data;
  try {
    const auto spec = vqf::synth::spec_from_json(read_file(opt.spec_file));
    data = vqf::synth::generate(spec, 1.0 / opt.rate);
  } catch (const std::invalid_argument& e) {
    throw UsageError(opt.spec_file + ": " + e.what());
  }
  write_output(opt.imu_out, vqf::synth::imu_csv(data, !opt.no_mag));
  if (!opt.truth_out.empty()) write_output(opt.truth_out, vqf::synth::truth_csv(data));
  return 0;
}

int cmd_eval(const EvalOptions& opt) {
  vqf::csv::Table est, truth;
  try {
    est = vqf::csv::parse_table(read_file(opt.estimate));
  } catch (const vqf::csv::ParseError& e) {
    throw UsageError(opt.estimate + ": " + e.what());
  }
  try {
    truth = vqf::csv::parse_table(read_file(opt.truth));
  } catch (const vqf::csv::ParseError& e) {
    throw UsageError(opt.truth + ": " + e.what());
  }
  if (est.rows.size() != truth.rows.size()) {
    throw UsageError("estimate has " + std::to_string(est.rows.size()) + " rows, truth has " +
                     std::to_string(truth.rows.size()));
  }
  auto q_est = vqf::csv::read_quats(est, opt.quat == "6d" ? "q6" : "q9");
  if (!q_est) q_est = vqf::csv::read_quats(est, "q");
  if (!q_est) throw UsageError(opt.estimate + ": no quaternion columns");
  const auto q_ref = vqf::csv::read_quats(truth, "q");
  if (!q_ref) throw UsageError(opt.truth + ": needs q_w,q_x,q_y,q_z columns");
  if (opt.skip >= q_est->size()) throw UsageError("--skip removes all rows");

  std::vector<std::uint8_t> motion(q_est->size(), 1);
  if (const auto rest = vqf::csv::read_flags(truth, "rest")) {
    for (std::size_t i = 0; i < motion.size(); ++i) motion[i] = (*rest)[i] ? 0 : 1;
  } else {
    std::cerr << "warning: no rest column in " << opt.truth << ", treating all samples as motion\n";
  }
  for (std::size_t i = 0; i < opt.skip; ++i) motion[i] = 0;

  std::vector<vqf::Vec3> b_est, b_true;
  const auto be = vqf::csv::read_vec3(est, "bias");
  const auto bt = vqf::csv::read_vec3(truth, "bias");
  if (be && bt) {
    b_est.assign(be->begin() + static_cast<long>(opt.skip), be->end());
    b_true.assign(bt->begin() + static_cast<long>(opt.skip), bt->end());
  }
  const auto report = vqf::metrics::evaluate(*q_est, *q_ref, motion, b_est, b_true);
  write_output(opt.output, vqf::metrics::to_key_value(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VQF orientation estimation"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Estimate orientation from an IMU CSV file");
  run->add_option("--mode", run_opt.mode, "basic, full or offline")
      ->check(CLI::IsMember({"basic", "full", "offline"}))
      ->capture_default_str();
  run->add_option("-i,--input", run_opt.inputs, "Input CSV (repeatable)")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", run_opt.outputs, "Output CSV, one per input (default: stdout)");
  run->add_option("--rate", run_opt.rate, "Sampling rate in Hz if the input has no t column (default 100)");
  run->add_option("--params", run_opt.params_file, "Parameter file with 'key = value' lines")
      ->check(CLI::ExistingFile);
  for (const auto& field : vqf::param_fields()) {
    const std::string name(field.name);
    run->add_option(flag_name(name), run_opt.overrides[name], "Override " + name);
  }

  SynthOptions synth_opt;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic recording from a JSON trajectory");
  synth->add_option("spec", synth_opt.spec_file, "Trajectory JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("--rate", synth_opt.rate, "Sampling rate in Hz")->capture_default_str();
  synth->add_option("--imu", synth_opt.imu_out, "IMU CSV output (default: stdout)");
  synth->add_option("--truth", synth_opt.truth_out, "Ground truth CSV output");
  synth->add_flag("--no-mag", synth_opt.no_mag, "Omit magnetometer columns");

  EvalOptions eval_opt;
  auto* eval = app.add_subcommand("eval", "Compare an estimate CSV with a ground truth CSV");
  eval->add_option("estimate", eval_opt.estimate, "Estimate CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("truth", eval_opt.truth, "Ground truth CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--quat", eval_opt.quat, "Estimate to evaluate: 6d or 9d")
      ->check(CLI::IsMember({"6d", "9d"}))
      ->capture_default_str();
  eval->add_option("--skip", eval_opt.skip, "Exclude the first N samples");
  eval->add_option("-o,--output", eval_opt.output, "Report file (default: stdout)");

  auto* params = app.add_subcommand("params", "Print the default parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) return cmd_run(run_opt, *run);
    if (*synth) return cmd_synth(synth_opt);
    if (*eval) return cmd_eval(eval_opt);
    if (*params) {
      std::cout << vqf::to_key_value(vqf::VqfParams{});
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
