#pragma once

#include <iosfwd>
#include <string>

#include "epm/idepm.hpp"
#include "epm/truncated.hpp"

namespace epm {

/// Line-oriented text checkpoints, format version 1.
///
///   epm-checkpoint 1 truncated
///   variant <epm|cepm|depm>
///   shape <I> <J> <T>
///   hypers <a1> <a2> <b1> <b2> <C1> <C2> <alpha1> <alpha2> <gamma0> <c0> <e0> <f0>
///   lambda <T values>
///   row_factors            followed by I lines of T values
///   col_factors            followed by J lines of T values
///   edges <E>              followed by E lines `i j n k:c ...` (nonzero atoms only)
///   rng <engine state>
///   end
///
/// Collapsed states replace the model sections with
///
///   epm-checkpoint 1 collapsed
///   shape <I> <J>
///   hypers <alpha1> <alpha2> <gamma0> <c0> <e0> <f0>
///   atoms <K> <next id>    followed by one line of K atom ids
///   edges <E>              followed by E lines `i j n id...` (atom id per customer)
///   params <K'> <lambda_rest>  followed by K' lines `id lambda phi... psi...`
///
/// Reals are written with 17 significant digits so a load restores the
/// exact bits.
inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(std::ostream& out, const TruncatedState& s);
void save_checkpoint(std::ostream& out, const CollapsedState& s);

TruncatedState load_truncated_checkpoint(std::istream& in);
CollapsedState load_collapsed_checkpoint(std::istream& in);

/// Kind word of the checkpoint file's header ("truncated" or "collapsed").
std::string checkpoint_kind(const std::string& path);

void save_checkpoint_file(const std::string& path, const TruncatedState& s);
void save_checkpoint_file(const std::string& path, const CollapsedState& s);

}  // namespace epm
