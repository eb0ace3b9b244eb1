#include "unig/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "CLI11.hpp"

namespace unig::cli {

using nlohmann::json;

namespace {

void emit(const json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw InvalidInput("cannot write " + path);
  file << text;
}

int thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("UNIG_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw InvalidInput(std::string("UNIG_THREADS must be an integer, got '") + env + "'");
    }
  }
  return 1;
}

struct Trial {
  EncoderSpec encoder;
  Hyperparams hp;
  json config;
  std::string key;
};

struct TrialResult {
  double mean_val = -1.0;
  double mean_test = 0.0;
  bool diverged = false;
};

std::vector<Trial> enumerate(const SweepGrid& grid, const RunConfig& base) {
  std::vector<Trial> trials;
  std::set<std::string> seen;
  for (int layers : grid.layers)
    for (Index hidden : grid.hidden)
      for (double lr : grid.lr)
        for (double wd : grid.weight_decay)
          for (double dropout : grid.dropout)
            for (const auto& mode : grid.pv_mode)
              for (double w : grid.pv_weight)
                for (const auto& norm : grid.norm)
                  for (const auto& placement_text : grid.placement) {
                    std::optional<Placement> placement;
                    try {
                      placement = parse_placement(placement_text, layers);
                    } catch (const InvalidInput&) {
                      continue;  // stage beyond this depth
                    }
                    Trial t;
                    t.encoder = base.encoder;
                    t.encoder.num_layers = layers;
                    // Settings without effect are pinned so equivalent points collapse.
                    t.encoder.hidden = layers == 1 ? grid.hidden.front() : hidden;
                    t.encoder.placement = placement;
                    t.encoder.projection.normalization = parse_normalization(norm);
                    t.encoder.projection.pv_weight = placement ? w : grid.pv_weight.front();
                    t.encoder.projection.pv_weight_mode =
                        parse_pv_weight_mode(placement ? mode : grid.pv_mode.front());
                    t.hp = base.hp;
                    t.hp.learning_rate = lr;
                    t.hp.weight_decay = wd;
                    t.hp.dropout = layers == 1 ? grid.dropout.front() : dropout;
                    t.config = config_to_json(t.encoder, t.hp);
                    t.key = t.config.dump();
                    if (seen.insert(t.key).second) trials.push_back(std::move(t));
                  }
  return trials;
}

}  // namespace

void SweepGrid::validate() const {
  if (lr.empty() || weight_decay.empty() || dropout.empty() || hidden.empty() || layers.empty() ||
      pv_weight.empty() || pv_mode.empty() || norm.empty() || placement.empty())
    throw InvalidInput("sweep: every grid list must be non-empty");
  if (max_trials < 1) throw InvalidInput("sweep: max-trials must be >= 1");
  if (trial_splits < 1) throw InvalidInput("sweep: trial-splits must be >= 1");
  for (const auto& n : norm) parse_normalization(n);
  for (const auto& m : pv_mode) parse_pv_weight_mode(m);
}

json cmd_train(const RunConfig& cfg) {
  const Dataset d = load_dataset(cfg.dataset_path, cfg.load);
  const auto splits = make_splits(d, cfg.split);
  const TrainReport report = train(d, splits, cfg.encoder, cfg.hp);
  json j = report.to_json();
  j["dataset"] = d.name;
  j["config"]["protocol"] = cfg.split.to_string();
  j["config"]["splits"] = cfg.split.num_splits;
  return j;
}

json cmd_sweep(const SweepGrid& grid, const RunConfig& base) {
  grid.validate();
  const Dataset d = load_dataset(base.dataset_path, base.load);
  const auto splits = make_splits(d, base.split);
  const std::vector<Split> trial_splits(
      splits.begin(), splits.begin() + std::min<std::ptrdiff_t>(grid.trial_splits, std::ssize(splits)));

  std::vector<Trial> trials = enumerate(grid, base);
  const std::size_t grid_size = trials.size();
  if (trials.empty()) throw InvalidInput("sweep: grid has no valid points");
  if (trials.size() > static_cast<std::size_t>(grid.max_trials)) {
    std::vector<std::size_t> order(trials.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(base.hp.seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(static_cast<std::size_t>(grid.max_trials));
    std::sort(order.begin(), order.end());
    std::vector<Trial> kept;
    for (std::size_t i : order) kept.push_back(std::move(trials[i]));
    trials = std::move(kept);
  }

  std::vector<TrialResult> results(trials.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < trials.size(); i = next++) {
      try {
        const TrainReport r = train(d, trial_splits, trials[i].encoder, trials[i].hp);
        results[i] = {r.mean_val_accuracy, r.mean_accuracy, false};
      } catch (const DivergenceError&) {
        results[i].diverged = true;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int n_threads = std::min<int>(thread_count(grid.threads), static_cast<int>(trials.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  std::vector<std::size_t> ranking(trials.size());
  std::iota(ranking.begin(), ranking.end(), std::size_t{0});
  std::stable_sort(ranking.begin(), ranking.end(), [&](std::size_t a, std::size_t b) {
    if (results[a].diverged != results[b].diverged) return !results[a].diverged;
    if (results[a].mean_val != results[b].mean_val) return results[a].mean_val > results[b].mean_val;
    return trials[a].key < trials[b].key;
  });

  json leaderboard = json::array();
  for (std::size_t rank = 0; rank < ranking.size(); ++rank) {
    const auto i = ranking[rank];
    leaderboard.push_back({{"rank", rank + 1},
                           {"config", trials[i].config},
                           {"mean_val_accuracy", results[i].mean_val},
                           {"mean_test_accuracy", results[i].mean_test},
                           {"diverged", results[i].diverged}});
  }

  const auto best = ranking.front();
  if (results[best].diverged) throw DivergenceError("sweep: every trial diverged");
  const TrainReport final_report = train(d, splits, trials[best].encoder, trials[best].hp);
  json report = final_report.to_json();
  report["dataset"] = d.name;
  report["config"]["protocol"] = base.split.to_string();
  report["config"]["splits"] = base.split.num_splits;

  json j;
  j["dataset"] = d.name;
  j["grid_size"] = grid_size;
  j["trials"] = trials.size();
  j["trial_splits"] = trial_splits.size();
  j["leaderboard"] = std::move(leaderboard);
  j["best_config"] = trials[best].config;
  j["report"] = std::move(report);
  return j;
}

json cmd_homophily(const Dataset& d) {
  const HomophilyScore h = homophily_score(d.structure, d.labels);
  return {{"dataset", d.name},
          {"homophily", h.score},
          {"matching_edges", h.matching_edges},
          {"total_edges", h.total_edges},
          {"no_edges", h.no_edges}};
}

json cmd_synth(const SynthRequest& req) {
  if (req.out_path.empty()) throw InvalidInput("synth: --out is required");
  const Dataset graph = load_dataset(req.dataset_path, req.load);
  const SynthResult result = synth_extend(graph, req.spec);
  save_dataset(result.dataset, req.out_path);

  json sidecar;
  sidecar["homophily"] = homophily_score(result.dataset.structure, result.dataset.labels).score;
  sidecar["fallback_count"] = result.fallback_count;
  sidecar["duplicates_removed"] = result.duplicates_removed;
  sidecar["num_edges"] = result.dataset.structure.num_edges();
  sidecar["rank"] = req.spec.rank;
  sidecar["p"] = req.spec.probability;
  sidecar["seed"] = req.spec.seed;
  sidecar["hypergraph"] = req.out_path;
  if (!req.graph_out_path.empty()) {
    const Dataset expanded =
        result.dataset.kind == GraphKind::hypergraph ? synth_graph(result.dataset) : result.dataset;
    save_dataset(expanded, req.graph_out_path);
    sidecar["graph"] = req.graph_out_path;
  }

  std::string sidecar_path = req.sidecar_path;
  if (sidecar_path.empty()) {
    std::filesystem::path p(req.out_path);
    sidecar_path = (p.parent_path() / (p.stem().string() + ".meta.json")).string();
  }
  std::ofstream file(sidecar_path);
  if (!file) throw InvalidInput("cannot write " + sidecar_path);
  file << sidecar.dump(2) << '\n';
  return sidecar;
}

// ---- argument parsing ------------------------------------------------------

namespace {

/// Fills options that were not given on the command line from a flat JSON
/// object whose keys are long option names without the leading dashes.
void apply_config_file(CLI::App& app, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvalidInput("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw InvalidInput("config " + path + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    CLI::Option* opt = app.get_option_no_throw("--" + key);
    if (!opt) throw InvalidInput("config " + path + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    std::vector<std::string> inputs;
    auto as_text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_array())
      for (const auto& v : value) inputs.push_back(as_text(v));
    else
      inputs.push_back(as_text(value));
    for (const auto& s : inputs) opt->add_result(s);
    opt->run_callback();
  }
}

struct RunFlags {
  RunConfig cfg;
  std::string protocol = "per-class";
  std::string norm = "row-row";
  std::string pv_mode = "constant";
  std::string placement = "full";
  std::string config_path;
};

void add_load_flags(CLI::App* app, LoadOptions& load) {
  app->add_flag("--dedupe", load.dedupe, "Drop duplicate edges instead of failing");
  app->add_flag("--one-based", load.one_based, "Edge indices in the file start at 1");
}

void add_run_flags(CLI::App* app, RunFlags& f) {
  auto& c = f.cfg;
  app->add_option("--config", f.config_path, "JSON file with flag values (flags override)");
  app->add_option("--dataset", c.dataset_path, "Dataset JSON file");
  add_load_flags(app, c.load);
  app->add_option("--protocol", f.protocol,
                  "Split protocol: per-class[:tr,va,te] or uniform[:tr,va,te]")
      ->capture_default_str();
  app->add_option("--splits", c.split.num_splits, "Number of random splits")->capture_default_str();
  app->add_option("--seed", c.hp.seed, "Seed for splits, initialization and dropout")
      ->capture_default_str();
  app->add_option("--layers", c.encoder.num_layers, "Number of linear layers")->capture_default_str();
  app->add_option("--hidden", c.encoder.hidden, "Hidden width")->capture_default_str();
  app->add_option("--dropout", c.hp.dropout, "Dropout rate")->capture_default_str();
  app->add_option("--lr", c.hp.learning_rate, "Adam learning rate")->capture_default_str();
  app->add_option("--weight-decay", c.hp.weight_decay, "L2 weight decay")->capture_default_str();
  app->add_option("--epochs", c.hp.epochs, "Training epochs")->capture_default_str();
  app->add_option("--norm", f.norm, "none|row-row|col-col|row-col|col-row")->capture_default_str();
  app->add_option("--pv-weight", c.encoder.projection.pv_weight, "Node-block weight c")
      ->capture_default_str();
  app->add_option("--pv-mode", f.pv_mode, "constant|degree")->capture_default_str();
  app->add_option("--placement", f.placement, "none, full, or f,r stage pair")->capture_default_str();
  app->add_option("--hops", c.encoder.projection.hops, "Compound operator power (f == r only)")
      ->capture_default_str();
  app->add_flag("--float32", c.encoder.single_precision, "Train in single precision");
  app->add_option("--out", c.out_path, "Write the JSON report here instead of stdout");
}

RunConfig finish(CLI::App* app, RunFlags& f) {
  if (!f.config_path.empty()) apply_config_file(*app, f.config_path);
  RunConfig c = f.cfg;
  if (c.dataset_path.empty()) throw InvalidInput("--dataset is required");
  const int num_splits = c.split.num_splits;
  c.split = SplitSpec::parse(f.protocol);
  c.split.num_splits = num_splits;
  c.split.seed = c.hp.seed;
  c.split.validate();
  c.encoder.projection.normalization = parse_normalization(f.norm);
  c.encoder.projection.pv_weight_mode = parse_pv_weight_mode(f.pv_mode);
  c.encoder.placement = parse_placement(f.placement, c.encoder.num_layers);
  return c;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Node classification on graphs and hypergraphs with projection encoders", "unig"};
  app.require_subcommand(1);

  RunFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "Train on every split and report test accuracy");
  add_run_flags(train_cmd, train_flags);

  RunFlags sweep_flags;
  SweepGrid grid;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid search, then rerun the best config on all splits");
  add_run_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--grid-lr", grid.lr)->delimiter(',');
  sweep_cmd->add_option("--grid-weight-decay", grid.weight_decay)->delimiter(',');
  sweep_cmd->add_option("--grid-dropout", grid.dropout)->delimiter(',');
  sweep_cmd->add_option("--grid-hidden", grid.hidden)->delimiter(',');
  sweep_cmd->add_option("--grid-layers", grid.layers)->delimiter(',');
  sweep_cmd->add_option("--grid-pv-weight", grid.pv_weight)->delimiter(',');
  sweep_cmd->add_option("--grid-pv-mode", grid.pv_mode)->delimiter(',');
  sweep_cmd->add_option("--grid-norm", grid.norm)->delimiter(',');
  sweep_cmd->add_option("--grid-placement", grid.placement,
                        "Placements, e.g. --grid-placement none 0,2 full");
  sweep_cmd->add_option("--max-trials", grid.max_trials)->capture_default_str();
  sweep_cmd->add_option("--trial-splits", grid.trial_splits, "Splits used to score each trial")
      ->capture_default_str();
  sweep_cmd->add_option("--threads", grid.threads, "Parallel trials (default: UNIG_THREADS or 1)");

  std::string homophily_path, homophily_out;
  LoadOptions homophily_load;
  auto* homophily_cmd = app.add_subcommand("homophily", "Clique-expansion edge homophily");
  homophily_cmd->add_option("--dataset", homophily_path)->required();
  homophily_cmd->add_option("--out", homophily_out);
  add_load_flags(homophily_cmd, homophily_load);

  SynthRequest synth;
  auto* synth_cmd = app.add_subcommand("synth", "Grow graph edges into label-correlated hyperedges");
  synth_cmd->add_option("--dataset", synth.dataset_path)->required();
  add_load_flags(synth_cmd, synth.load);
  synth_cmd->add_option("--rank", synth.spec.rank)->required();
  synth_cmd->add_option("--p", synth.spec.probability, "Same-label probability")->required();
  synth_cmd->add_option("--seed", synth.spec.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth.out_path, "Hypergraph output")->required();
  synth_cmd->add_option("--graph-out", synth.graph_out_path, "Clique-expanded graph output");
  synth_cmd->add_option("--sidecar", synth.sidecar_path, "Sidecar JSON path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? ok : usage_or_data_error;
  }

  try {
    if (*train_cmd) {
      const RunConfig cfg = finish(train_cmd, train_flags);
      emit(cmd_train(cfg), cfg.out_path, out);
    } else if (*sweep_cmd) {
      const RunConfig cfg = finish(sweep_cmd, sweep_flags);
      emit(cmd_sweep(grid, cfg), cfg.out_path, out);
    } else if (*homophily_cmd) {
      const json j = cmd_homophily(load_dataset(homophily_path, homophily_load));
      if (homophily_out.empty()) {
        emit(j, "", out);
      } else {
        emit(j, homophily_out, out);
        out << j["homophily"].get<double>() << '\n';
      }
    } else if (*synth_cmd) {
      emit(cmd_synth(synth), "", out);
    }
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return diverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return usage_or_data_error;
  }
  return ok;
}

}  // namespace unig::cli
