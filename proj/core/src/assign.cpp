#include <spinetrack/assign.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

namespace spinetrack {

CostMatrix::CostMatrix(std::vector<std::string> rows, std::vector<std::string> cols)
    : row_ids(std::move(rows)),
      col_ids(std::move(cols)),
      costs(row_ids.size() * col_ids.size(), 0.0),
      forbidden(row_ids.size() * col_ids.size(), 0) {}

void CostMatrix::validate() const {
    const size_t n = rows() * cols();
    if (costs.size() != n || forbidden.size() != n)
        throw Error("CostMatrix: shape mismatch between ids and data");
    std::unordered_set<std::string> ids(row_ids.begin(), row_ids.end());
    if (ids.size() != row_ids.size()) throw Error("CostMatrix: duplicate row id");
    ids.assign(col_ids.begin(), col_ids.end());
    if (ids.size() != col_ids.size()) throw Error("CostMatrix: duplicate col id");
    for (size_t i = 0; i < n; ++i)
        if (!forbidden[i] && !std::isfinite(costs[i]))
            throw Error("CostMatrix: non-finite cost outside forbidden mask");
}

double MatchResult::total_cost() const {
    double total = 0.0;
    for (const auto& p : pairs) total += p.cost;
    return total;
}

namespace {

// Shortest-augmenting-path assignment with potentials on a square matrix.
// Returns row -> col. O(n^3), deterministic: scans columns in index order
// and keeps the first minimum.
std::vector<int> hungarian_square(const std::vector<double>& cost, int n) {
    const double INF = std::numeric_limits<double>::max();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0);  // match[j] = row assigned to col j, 1-based
    std::vector<int> way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, INF);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            double delta = INF;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[static_cast<size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

std::vector<size_t> sorted_order(const std::vector<std::string>& ids) {
    std::vector<size_t> order(ids.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&ids](size_t a, size_t b) { return ids[a] < ids[b]; });
    return order;
}

// Equal-cost canonicalization: among optimal matchings reachable by single
// pair moves or pairwise column swaps, prefer the one whose sorted
// (row, col) pair list is lexicographically smallest. Operates on indices
// into the already-sorted id arrays, so index order == id order.
void lexicographic_polish(const CostMatrix& m, std::vector<int>& row_to_col) {
    const int nr = static_cast<int>(m.rows());
    const int nc = static_cast<int>(m.cols());
    auto allowed = [&](int r, int c) { return !m.is_forbidden(r, c); };

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<char> col_used(nc, 0);
        for (int r = 0; r < nr; ++r)
            if (row_to_col[r] >= 0) col_used[row_to_col[r]] = 1;

        // Move a match to an earlier unmatched row at identical cost.
        for (int r = 0; r < nr; ++r) {
            if (row_to_col[r] < 0) continue;
            const int c = row_to_col[r];
            for (int r2 = 0; r2 < r; ++r2) {
                if (row_to_col[r2] >= 0) continue;
                if (allowed(r2, c) && m.cost(r2, c) == m.cost(r, c)) {
                    row_to_col[r2] = c;
                    row_to_col[r] = -1;
                    changed = true;
                    break;
                }
            }
        }
        // Move a match to an earlier unmatched column at identical cost.
        for (int r = 0; r < nr; ++r) {
            if (row_to_col[r] < 0) continue;
            const int c = row_to_col[r];
            for (int c2 = 0; c2 < c; ++c2) {
                if (col_used[c2]) continue;
                if (allowed(r, c2) && m.cost(r, c2) == m.cost(r, c)) {
                    col_used[c] = 0;
                    col_used[c2] = 1;
                    row_to_col[r] = c2;
                    changed = true;
                    break;
                }
            }
        }
        // Swap columns between two matched rows when the total is unchanged
        // and the earlier row gets the smaller column.
        for (int r1 = 0; r1 < nr; ++r1) {
            if (row_to_col[r1] < 0) continue;
            for (int r2 = r1 + 1; r2 < nr; ++r2) {
                if (row_to_col[r2] < 0) continue;
                const int c1 = row_to_col[r1];
                const int c2 = row_to_col[r2];
                if (c2 < c1 && allowed(r1, c2) && allowed(r2, c1) &&
                    m.cost(r1, c2) + m.cost(r2, c1) == m.cost(r1, c1) + m.cost(r2, c2)) {
                    row_to_col[r1] = c2;
                    row_to_col[r2] = c1;
                    changed = true;
                }
            }
        }
    }
}

}  // namespace

MatchResult solve(const CostMatrix& input) {
    input.validate();
    const size_t nr = input.rows();
    const size_t nc = input.cols();

    MatchResult result;
    if (nr == 0 || nc == 0) {
        result.unmatched_rows = input.row_ids;
        result.unmatched_cols = input.col_ids;
        std::sort(result.unmatched_rows.begin(), result.unmatched_rows.end());
        std::sort(result.unmatched_cols.begin(), result.unmatched_cols.end());
        return result;
    }

    // Canonical id order makes the solve independent of input permutation.
    const auto row_order = sorted_order(input.row_ids);
    const auto col_order = sorted_order(input.col_ids);
    CostMatrix m(std::vector<std::string>(nr), std::vector<std::string>(nc));
    for (size_t r = 0; r < nr; ++r) m.row_ids[r] = input.row_ids[row_order[r]];
    for (size_t c = 0; c < nc; ++c) m.col_ids[c] = input.col_ids[col_order[c]];
    for (size_t r = 0; r < nr; ++r)
        for (size_t c = 0; c < nc; ++c) {
            m.cost(r, c) = input.cost(row_order[r], col_order[c]);
            if (input.is_forbidden(row_order[r], col_order[c])) m.forbid(r, c);
        }

    // Square construction with per-id escape cells so maximum cardinality
    // wins first and cost second. Row r escapes to slack column nc+r,
    // column c is absorbed by slack row nr+c; slack-slack cells are free.
    double max_abs = 0.0;
    for (size_t i = 0; i < m.costs.size(); ++i)
        if (!m.forbidden[i]) max_abs = std::max(max_abs, std::abs(m.costs[i]));
    const double unmatch = static_cast<double>(std::max(nr, nc)) * max_abs + 1.0;
    const double block = static_cast<double>(nr + nc) * unmatch + 1.0;

    const int n = static_cast<int>(nr + nc);
    std::vector<double> sq(static_cast<size_t>(n) * n, block);
    for (size_t r = 0; r < nr; ++r)
        for (size_t c = 0; c < nc; ++c)
            if (!m.is_forbidden(r, c)) sq[r * n + c] = m.cost(r, c);
    for (size_t r = 0; r < nr; ++r) sq[r * n + nc + r] = unmatch;
    for (size_t c = 0; c < nc; ++c) sq[(nr + c) * n + c] = unmatch;
    for (size_t r = 0; r < nr; ++r)
        for (size_t c = 0; c < nc; ++c) sq[(nr + c) * n + (nc + r)] = 0.0;

    const auto assignment = hungarian_square(sq, n);

    std::vector<int> row_to_col(nr, -1);
    for (size_t r = 0; r < nr; ++r) {
        const int c = assignment[r];
        if (c >= 0 && c < static_cast<int>(nc) && !m.is_forbidden(r, c)) row_to_col[r] = c;
    }

    lexicographic_polish(m, row_to_col);

    std::vector<char> col_matched(nc, 0);
    for (size_t r = 0; r < nr; ++r) {
        const int c = row_to_col[r];
        if (c >= 0) {
            result.pairs.push_back({m.row_ids[r], m.col_ids[c], m.cost(r, c)});
            col_matched[c] = 1;
        } else {
            result.unmatched_rows.push_back(m.row_ids[r]);
        }
    }
    for (size_t c = 0; c < nc; ++c)
        if (!col_matched[c]) result.unmatched_cols.push_back(m.col_ids[c]);
    return result;
}

MatchResult solve_gated(const CostMatrix& matrix, double threshold, GateMode mode) {
    if (mode == GateMode::PreSolve) {
        CostMatrix pruned = matrix;
        for (size_t r = 0; r < pruned.rows(); ++r)
            for (size_t c = 0; c < pruned.cols(); ++c)
                if (!pruned.is_forbidden(r, c) && pruned.cost(r, c) > threshold)
                    pruned.forbid(r, c);
        return solve(pruned);
    }

    MatchResult result = solve(matrix);
    std::vector<MatchPair> kept;
    for (auto& p : result.pairs) {
        if (p.cost > threshold) {
            result.unmatched_rows.push_back(p.row_id);
            result.unmatched_cols.push_back(p.col_id);
        } else {
            kept.push_back(std::move(p));
        }
    }
    result.pairs = std::move(kept);
    std::sort(result.unmatched_rows.begin(), result.unmatched_rows.end());
    std::sort(result.unmatched_cols.begin(), result.unmatched_cols.end());
    return result;
}

}  // namespace spinetrack
