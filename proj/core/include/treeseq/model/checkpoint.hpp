#pragma once

#include <filesystem>
#include <iosfwd>

#include "treeseq/autodiff/param_set.hpp"

namespace treeseq::model {

/// Checkpoint layout:
///   treeseq-checkpoint v1
///   <count>
///   <name> <trainable> <regularized> <rank> <dims...>   (one line per tensor)
///   payload
/// The payload follows the newline after the last header line and holds every
/// tensor's values in order as little-endian IEEE-754 doubles.
void write_checkpoint(std::ostream& out, const ad::ParamSet& params);
ad::ParamSet read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const ad::ParamSet& params);
ad::ParamSet load_checkpoint(const std::filesystem::path& path);

}  // namespace treeseq::model
