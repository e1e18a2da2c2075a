#pragma once

#include <string>

#include "conformal/types.hpp"

namespace conformal::cli {

enum class TargetKind { real, label };

/// Reads a comma-separated file with a header row. Every column except
/// `target_column` becomes a feature, in header order. For TargetKind::label
/// the target must hold non-negative integers; n_classes is max label + 1.
///
/// Errors (std::runtime_error) name the offending line and column.
Dataset load_csv(const std::string& path, const std::string& target_column,
                 TargetKind kind = TargetKind::real);

/// Writes features then the target column "y" with shortest round-trip
/// number formatting.
void write_csv(const std::string& path, const Dataset& data);

}  // namespace conformal::cli
