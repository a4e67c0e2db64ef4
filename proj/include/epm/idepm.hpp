#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "epm/data.hpp"
#include "epm/distributions.hpp"
#include "epm/marginal.hpp"
#include "epm/rng.hpp"

namespace epm {

/// One active atom of the collapsed sampler with its count statistics.
struct Atom {
  std::int64_t id = 0;  // stable across swap-removal, for trace reporting
  count_t total = 0;    // m(.,.,k)
  std::vector<count_t> row_counts;  // m(i,.,k)
  std::vector<count_t> col_counts;  // m(.,j,k)
};

/// Parameters drawn for the atoms that were active at the last
/// instantiation step; columns follow `ids`.
struct InstantiatedParams {
  std::vector<std::int64_t> ids;
  Eigen::MatrixXd phi;  // I x K
  Eigen::MatrixXd psi;  // J x K
  Eigen::VectorXd lambda;
  double lambda_rest = 0.0;
};

/// Collapsed-sampler state. Customers are stored per edge (edge index into
/// the matrix's ones) and labelled with stable atom ids.
struct CollapsedState {
  int rows = 0;
  int cols = 0;
  IdepmHypers hypers;
  std::vector<Atom> atoms;
  std::vector<Cell> cells;
  std::vector<std::size_t> offsets;  // customers of edge e: [offsets[e], offsets[e+1])
  std::vector<std::int64_t> labels;
  std::vector<std::int32_t> slot_of_id;  // -1 for retired ids
  std::int64_t next_id = 0;
  InstantiatedParams params;
  Rng rng;

  int active_atoms() const { return static_cast<int>(atoms.size()); }
  count_t customers() const { return static_cast<count_t>(labels.size()); }
  count_t edge_total(std::size_t e) const {
    return static_cast<count_t>(offsets[e + 1] - offsets[e]);
  }
};

/// One customer per one-entry, seated sequentially by the assignment rule.
CollapsedState init_collapsed(const BinaryMatrix& x, const IdepmHypers& hypers, Rng rng);

/// Builds a state from explicit per-atom counts (atoms with zero total are dropped).
CollapsedState collapsed_from_table(const CountTable& table, const IdepmHypers& hypers, Rng rng);
CountTable to_count_table(const CollapsedState& s);

/// Unnormalized assignment weights for a customer of cell (i, j) that has
/// already been removed: one per active atom, then the new-atom weight.
void assignment_weights(const CollapsedState& s, int i, int j, std::vector<double>& out);

void sample_assignments(CollapsedState& s);
void instantiate_parameters(CollapsedState& s);
void sample_counts(CollapsedState& s, const BinaryMatrix& x);
void sample_hypers_idepm(CollapsedState& s);
void sample_alpha_idepm(CollapsedState& s, bool rows);
void sample_gamma0_idepm(CollapsedState& s);
void sample_c0_idepm(CollapsedState& s);

/// assignments, instantiation, counts, hyperparameters.
void collapsed_sweep(CollapsedState& s, const BinaryMatrix& x);

double log_marginal_likelihood(const CollapsedState& s);

/// Intensity and link probability from the instantiated active-atom parameters.
double intensity(const CollapsedState& s, int i, int j);
double link_probability(const CollapsedState& s, int i, int j);

/// Recounts every atom's statistics from the labels and drops empty atoms.
void rebuild_statistics(CollapsedState& s);

/// True iff per-atom statistics equal a from-scratch recount of the labels
/// and every active atom is nonempty.
bool audit(const CollapsedState& s);

/// Relabels atoms by the permutation `order` (new slot p holds old slot order[p]).
void permute_atoms(CollapsedState& s, const std::vector<int>& order);

}  // namespace epm
