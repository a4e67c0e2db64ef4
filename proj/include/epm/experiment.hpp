#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epm/data.hpp"
#include "epm/eval.hpp"
#include "epm/rng.hpp"

namespace epm {

/// Flat key=value run description. Unknown keys are rejected.
struct ExperimentConfig {
  std::string dataset;              // edge-list path; empty selects `synthetic`
  std::string synthetic = "blocks";  // SyntheticSpec text
  std::string model = "idepm";      // epm | cepm | depm | idepm
  std::vector<int> truncations{128};  // ignored for idepm
  int iterations = 600;
  int retained = 100;
  int folds = 10;
  int max_folds = 0;  // run only the first n folds; 0 runs all
  std::uint64_t seed = 1;
  double e0 = 0.01;
  double f0 = 0.01;
  std::optional<double> C1;
  std::optional<double> C2;
  std::string output_dir = "epm_out";
  int jobs = 1;
  TdllMode tdll_mode = TdllMode::mean_probability;

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::string& path);
  /// Applies one key=value assignment; throws on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// Canonical form: every key, fixed order, one per line.
  std::string serialize() const;
  void validate() const;

  bool is_idepm() const { return model == "idepm"; }
};

struct ChainResult {
  std::string model;
  int T = 0;  // 0 for idepm
  int fold = -1;  // -1 when run on the full matrix
  EvalReport report;
  double seconds = 0.0;
};

/// One chain on `train`, scored on `test` after every sweep. With an empty
/// test set the TDLL and AUC fields are NaN.
ChainResult run_chain(const BinaryMatrix& train, std::span<const TestEntry> test,
                      const ExperimentConfig& cfg, int T, Rng rng);

/// Training matrix of the experiment (file or synthetic).
BinaryMatrix load_dataset(const ExperimentConfig& cfg);

/// Fold x truncation chains, run on up to `jobs` threads and returned in
/// (T, fold) order. Writes traces, summary.csv, config.txt and
/// metadata.json into output_dir unless it is empty.
std::vector<ChainResult> run_experiment(const ExperimentConfig& cfg);

/// Mean and standard error of `values` (SE is 0 for fewer than 2 values).
std::pair<double, double> mean_se(const std::vector<double>& values);

/// Elapsed seconds at the first iteration whose trailing `window`-iteration
/// mean of TDLL_sample lies within `tol` of the mean over the final `tail`
/// iterations. NaN if the trace has no test scores.
double convergence_time(const std::vector<TraceRow>& trace, int window = 10, double tol = 0.01,
                        int tail = 100);

std::string trace_file_name(const std::string& model, int T, int fold);

/// Edge-list file plus `<path>.meta.json` describing the generator.
SyntheticData gen_dataset(const SyntheticSpec& spec, const std::string& path);

/// Ratings file to edge-list file; returns the binarized matrix.
BinaryMatrix convert_ratings(const std::string& in_path, const std::string& out_path,
                             double threshold = 3.0, LoadStats* stats = nullptr);

}  // namespace epm
