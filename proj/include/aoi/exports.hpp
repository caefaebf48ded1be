#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "aoi/belief.hpp"
#include "aoi/solver.hpp"

namespace aoi {

/// First line of every emitted artifact: '# tool=... version=... config=...'.
std::string artifact_header(const std::string& config_json);

/// Columns: row, col, r, delta, action — one row per belief-state, ordered
/// by flattened index.
void write_policy_csv(std::ostream& out, const BeliefStateIndexer& idx,
                      std::span<const std::uint8_t> policy, const std::string& header);

/// Columns: row, col, r, delta, h.
void write_values_csv(std::ostream& out, const BeliefStateIndexer& idx,
                      std::span<const double> values, const std::string& header);

/// Policy grid for one request value: one row per delta, one column per
/// belief "(row,col)" ordered row-major, cell = action.
void write_policy_grid_csv(std::ostream& out, const BeliefStateIndexer& idx,
                           std::span<const std::uint8_t> policy, int r,
                           const std::string& header);

/// Columns: row, col, threshold — smallest commanding delta or "never".
void write_thresholds_csv(std::ostream& out, const ThresholdProfile& profile,
                          const BeliefStateIndexer& idx, const std::string& header);

/// Columns: row, col, beta_0..beta_B (prefixed by the artifact header).
void write_beliefs_csv(std::ostream& out, const TruncatedBeliefSpace& space,
                       const std::string& header);

} // namespace aoi
