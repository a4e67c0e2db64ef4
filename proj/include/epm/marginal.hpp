#pragma once

#include <cstdint>
#include <vector>

#include "epm/distributions.hpp"

namespace epm {

struct IdepmHypers {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double gamma0 = 1.0;
  double c0 = 1.0;
  double e0 = 0.01;
  double f0 = 0.01;

  void validate() const;
  friend bool operator==(const IdepmHypers&, const IdepmHypers&) = default;
};

struct CountEntry {
  std::int32_t row;
  std::int32_t col;
  count_t count;
};

/// Latent counts grouped by atom: a partition of the customers together with
/// their per-cell counts. Empty atoms and zero entries are ignored.
struct CountTable {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<CountEntry>> atoms;

  int active_atoms() const;
  count_t total() const;
  void validate() const;
};

/// Closed-form marginal likelihood of counts and partition in the
/// infinite limit, in log space.
double log_marginal_likelihood(const CountTable& table, const IdepmHypers& h);

/// Truncated marginal at level T. With `partition` the labelled-assignment
/// likelihood is multiplied by T!/(T-K+)!; otherwise it is the likelihood of
/// one specific labelling. Throws if K+ > T.
double log_marginal_likelihood_truncated(const CountTable& table, std::int64_t T,
                                         const IdepmHypers& h, bool partition = true);

}  // namespace epm
