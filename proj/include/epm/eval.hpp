#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "epm/data.hpp"
#include "epm/idepm.hpp"
#include "epm/truncated.hpp"

namespace epm {

/// Link probabilities for a fixed list of test entries, one row per
/// retained posterior sample.
class PredictiveEnsemble {
 public:
  explicit PredictiveEnsemble(std::size_t entries = 0) : entries_(entries) {}

  void add_sample(std::span<const double> probs);
  std::size_t samples() const { return entries_ ? probs_.size() / entries_ : 0; }
  std::size_t entries() const { return entries_; }
  std::span<const double> sample(std::size_t s) const {
    return {probs_.data() + s * entries_, entries_};
  }
  double prob(std::size_t s, std::size_t e) const { return probs_[s * entries_ + e]; }
  /// Per-entry average over samples.
  std::vector<double> mean() const;

 private:
  std::size_t entries_;
  std::vector<double> probs_;
};

enum class TdllMode {
  mean_probability,  ///< log of the sample-averaged probability, averaged over entries
  mean_log,          ///< log-probabilities averaged over samples and entries
};

inline constexpr double kProbClamp = 1e-12;

double tdll(const PredictiveEnsemble& ens, std::span<const TestEntry> test,
            TdllMode mode = TdllMode::mean_probability);

/// Precision-recall AUC: descending-score sweep, tied scores grouped into one
/// curve point, trapezoids in recall. The curve starts at recall 0 with the
/// first point's precision.
double pr_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

std::vector<double> predict(const TruncatedState& s, std::span<const TestEntry> entries);
std::vector<double> predict(const CollapsedState& s, std::span<const TestEntry> entries);

PredictiveEnsemble posterior_predictive(const std::vector<TruncatedState>& states,
                                        std::span<const TestEntry> entries);
PredictiveEnsemble posterior_predictive(const std::vector<CollapsedState>& states,
                                        std::span<const TestEntry> entries);

struct TraceRow {
  int iteration = 0;
  double elapsed_s = 0.0;
  int active_atoms = 0;
  double tdll_running = 0.0;
  double tdll_sample = 0.0;
};

struct EvalReport {
  std::string label;
  double k_mean = 0.0;
  double tdll = 0.0;
  double tdauc_pr = 0.0;
  std::vector<TraceRow> trace;
};

/// Trace CSV: header, one row per iteration, then a summary row
/// `summary,<total seconds>,<mean K>,<TDLL>,<TDAUC-PR>`.
void write_trace_csv(std::ostream& out, const EvalReport& report);

}  // namespace epm
