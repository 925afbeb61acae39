#pragma once

#include <spinetrack/model.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace spinetrack {

/// Rectangular cost matrix over named rows and columns with a forbidden mask.
/// Entries must be finite wherever not forbidden.
struct CostMatrix {
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
    std::vector<double> costs;       // row-major
    std::vector<uint8_t> forbidden;  // same shape

    CostMatrix() = default;
    CostMatrix(std::vector<std::string> rows, std::vector<std::string> cols);

    size_t rows() const { return row_ids.size(); }
    size_t cols() const { return col_ids.size(); }
    double& cost(size_t r, size_t c) { return costs[r * cols() + c]; }
    double cost(size_t r, size_t c) const { return costs[r * cols() + c]; }
    void forbid(size_t r, size_t c) { forbidden[r * cols() + c] = 1; }
    bool is_forbidden(size_t r, size_t c) const { return forbidden[r * cols() + c] != 0; }

    /// Throws Error on shape mismatch, duplicate ids, or a non-finite
    /// entry outside the forbidden mask.
    void validate() const;
};

struct MatchPair {
    std::string row_id;
    std::string col_id;
    double cost = 0.0;
};

/// Gated optimal assignment: matched pairs plus both leftover id lists.
/// Pairs and unmatched lists together partition the row and column ids.
struct MatchResult {
    std::vector<MatchPair> pairs;
    std::vector<std::string> unmatched_rows;
    std::vector<std::string> unmatched_cols;

    double total_cost() const;
};

/// Minimum-total-cost maximum matching over the non-forbidden cells
/// (Hungarian / shortest augmenting path). Rectangular matrices are fine;
/// forbidden cells are never matched. Ties between equal-cost optimal
/// matchings are broken toward lexicographically smaller (row_id, col_id)
/// pairs so repeated runs are reproducible.
MatchResult solve(const CostMatrix& matrix);

/// Runs solve, then discards pairs whose cost is strictly greater than
/// `threshold` (PostSolve, the default). PreSolve instead forbids those
/// cells before solving, which can change the matching.
MatchResult solve_gated(const CostMatrix& matrix, double threshold,
                        GateMode mode = GateMode::PostSolve);

}  // namespace spinetrack
