#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unig/dataset.hpp"
#include "unig/train.hpp"

namespace unig::cli {

/// Everything one `train` invocation needs.
struct RunConfig {
  std::string dataset_path;
  LoadOptions load;
  SplitSpec split;
  EncoderSpec encoder;
  Hyperparams hp;
  std::string out_path;
};

/// Candidate values per hyperparameter. Every combination is a trial.
struct SweepGrid {
  std::vector<double> lr{0.1, 0.02, 0.01, 0.001, 0.0001};
  std::vector<double> weight_decay{0.0, 0.005, 0.0005, 0.00005};
  std::vector<double> dropout{0.0, 0.5, 0.7, 0.9};
  std::vector<Index> hidden{64, 128, 256, 512};
  std::vector<int> layers{1, 2};
  std::vector<double> pv_weight{1.0, 10.0, 100.0, 0.1, 0.001, 0.0001};
  std::vector<std::string> pv_mode{"constant", "degree"};
  std::vector<std::string> norm{"row-row"};
  std::vector<std::string> placement{"full"};
  /// Cap on evaluated grid points; larger grids are subsampled with the run seed.
  int max_trials = 200;
  /// Splits (from the front) used to score each trial.
  int trial_splits = 3;
  /// Parallel trials; 0 reads UNIG_THREADS (default 1).
  int threads = 0;

  void validate() const;
};

nlohmann::json cmd_train(const RunConfig& cfg);
nlohmann::json cmd_sweep(const SweepGrid& grid, const RunConfig& base);
nlohmann::json cmd_homophily(const Dataset& d);

struct SynthRequest {
  std::string dataset_path;
  LoadOptions load;
  SynthSpec spec;
  std::string out_path;
  /// Optional clique-expanded graph output.
  std::string graph_out_path;
  /// Defaults to "<out without extension>.meta.json".
  std::string sidecar_path;
};

/// Writes the grown hypergraph (and optional graph) and returns the sidecar.
nlohmann::json cmd_synth(const SynthRequest& req);

/// Exit codes returned by run().
enum ExitCode : int { ok = 0, usage_or_data_error = 1, diverged = 2 };

/// Parses `args` (without the program name) and dispatches to a command.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace unig::cli
