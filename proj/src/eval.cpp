#include "epm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace epm {

void PredictiveEnsemble::add_sample(std::span<const double> probs) {
  if (probs.size() != entries_) throw std::invalid_argument("ensemble: entry count mismatch");
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("ensemble: probability outside [0,1]");
  }
  probs_.insert(probs_.end(), probs.begin(), probs.end());
}

std::vector<double> PredictiveEnsemble::mean() const {
  std::vector<double> m(entries_, 0.0);
  const std::size_t n = samples();
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t e = 0; e < entries_; ++e) m[e] += prob(s, e);
  }
  for (double& v : m) v /= static_cast<double>(n);
  return m;
}

double tdll(const PredictiveEnsemble& ens, std::span<const TestEntry> test, TdllMode mode) {
  if (ens.samples() == 0) throw std::invalid_argument("tdll: empty ensemble");
  if (ens.entries() != test.size()) throw std::invalid_argument("tdll: ensemble not aligned with test entries");
  if (test.empty()) throw std::invalid_argument("tdll: no test entries");
  const std::size_t n = ens.samples();
  auto clamp = [](double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); };
  double acc = 0.0;
  for (std::size_t e = 0; e < test.size(); ++e) {
    const bool one = test[e].value != 0;
    if (mode == TdllMode::mean_probability) {
      double p = 0.0;
      for (std::size_t s = 0; s < n; ++s) p += one ? ens.prob(s, e) : 1.0 - ens.prob(s, e);
      acc += std::log(clamp(p / static_cast<double>(n)));
    } else {
      double l = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        l += std::log(clamp(one ? ens.prob(s, e) : 1.0 - ens.prob(s, e)));
      }
      acc += l / static_cast<double>(n);
    }
  }
  return acc / static_cast<double>(test.size());
}

double pr_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("pr_auc: size mismatch");
  const auto positives = std::count_if(labels.begin(), labels.end(), [](auto v) { return v != 0; });
  if (positives == 0) throw std::invalid_argument("pr_auc: no positive labels");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double tp = 0, fp = 0;
  double prev_recall = 0.0, prev_precision = -1.0, area = 0.0;
  for (std::size_t p = 0; p < order.size();) {
    const double threshold = scores[order[p]];
    for (; p < order.size() && scores[order[p]] == threshold; ++p) {
      (labels[order[p]] ? tp : fp) += 1.0;
    }
    const double recall = tp / static_cast<double>(positives);
    const double precision = tp / (tp + fp);
    if (prev_precision < 0.0) prev_precision = precision;
    area += (recall - prev_recall) * 0.5 * (precision + prev_precision);
    prev_recall = recall;
    prev_precision = precision;
  }
  return area;
}

std::vector<double> predict(const TruncatedState& s, std::span<const TestEntry> entries) {
  std::vector<double> p(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    p[e] = link_probability(s, entries[e].row, entries[e].col);
  }
  return p;
}

std::vector<double> predict(const CollapsedState& s, std::span<const TestEntry> entries) {
  std::vector<double> p(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    p[e] = link_probability(s, entries[e].row, entries[e].col);
  }
  return p;
}

PredictiveEnsemble posterior_predictive(const std::vector<TruncatedState>& states,
                                        std::span<const TestEntry> entries) {
  PredictiveEnsemble ens(entries.size());
  for (const auto& s : states) ens.add_sample(predict(s, entries));
  return ens;
}

PredictiveEnsemble posterior_predictive(const std::vector<CollapsedState>& states,
                                        std::span<const TestEntry> entries) {
  PredictiveEnsemble ens(entries.size());
  for (const auto& s : states) ens.add_sample(predict(s, entries));
  return ens;
}

void write_trace_csv(std::ostream& out, const EvalReport& report) {
  out << "iteration,elapsed_s,K,TDLL_running,TDLL_sample\n";
  out << std::setprecision(10);
  for (const TraceRow& r : report.trace) {
    out << r.iteration << ',' << std::fixed << std::setprecision(6) << r.elapsed_s
        << std::defaultfloat << std::setprecision(10) << ',' << r.active_atoms << ','
        << r.tdll_running << ',' << r.tdll_sample << '\n';
  }
  const double total = report.trace.empty() ? 0.0 : report.trace.back().elapsed_s;
  out << "summary," << std::fixed << std::setprecision(6) << total << std::defaultfloat
      << std::setprecision(10) << ',' << report.k_mean << ',' << report.tdll << ','
      << report.tdauc_pr << '\n';
}

}  // namespace epm
