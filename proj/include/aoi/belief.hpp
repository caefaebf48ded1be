#pragma once

#include <iosfwd>
#include <vector>

#include "aoi/model.hpp"

namespace aoi {

/// Probability vector over battery levels; entry j = Pr(battery = j).
using Belief = std::vector<double>;

/// Dense row-major matrix, only used for the small (B+1)x(B+1) operators.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
};

/// One-slot belief advance operator for a no-command slot: lower-bidiagonal,
/// left stochastic (columns sum to one).  Diagonal 1-lambda except the
/// bottom-right corner, subdiagonal lambda.
Matrix build_lambda(double lambda, int capacity);

/// m-th power of the advance operator in closed form: zero above the
/// diagonal, (1-lambda)^m on the diagonal of the non-final rows,
/// lambda^(j-l) (1-lambda)^(m-j+l) C(m, j-l) below it, and a final row that
/// completes every column sum to one.
Matrix lambda_power_closed_form(double lambda, int capacity, int m);

/// Reset beliefs after a command, indexed by the observed outcome:
/// rho^0 = rho^1 = (1-lambda, lambda, 0, ...); rho^j for j >= 2 carries
/// 1-lambda at entry j-1 and lambda at entry j.
std::vector<Belief> rho_vectors(double lambda, int capacity);

/// Lambda * beta in O(B) using the banded structure.
Belief advance_belief(const Belief& beta, double lambda);

/// Observation available to the edge node at the start of the next slot.
struct Observation {
    int r = 0;
    int delta = 1;    ///< next-slot AoI
    int b_tilde = 1;  ///< next-slot partial battery knowledge
};

/// Belief update map.  No command advances by Lambda; a command resets to
/// rho^0 when no update arrived (delta' > 1) and to rho^j when the update
/// reported battery level j.  Rejects the inconsistent observation
/// (a = 0, delta' = 1).
Belief update_belief(const Belief& beta, int a, const Observation& obs, double lambda);

/// Smallest truncation depth M such that Lambda^M maps every belief within
/// eps (infinity norm) of the full-battery point mass.  Worst case over
/// point-mass bases, which covers any initial belief by convexity.
int choose_m(double lambda, int capacity, double eps);

/// Position of a belief in the truncated table: `row` selects the base
/// (0 = initial belief, j >= 1 = rho^j) and `col` counts consecutive
/// no-command advances, saturated at M.
struct BeliefIndex {
    int row = 0;
    int col = 0;
    bool operator==(const BeliefIndex&) const = default;
};

/// The (B+1) x (M+1) table of reachable beliefs.  Closed under the index
/// transitions: a no-command slot moves (row, col) to (row, min(col+1, M));
/// a command resets to (j, 0) for the observed outcome j, with rho^0
/// identified with rho^1 at row 1.
class TruncatedBeliefSpace {
public:
    static TruncatedBeliefSpace build(const Belief& beta0, double lambda, int capacity, int m);

    /// Uniform initial belief over battery levels.
    static Belief uniform_belief(int capacity);

    int capacity() const { return capacity_; }
    int depth() const { return depth_; }
    double lambda() const { return lambda_; }
    int rows() const { return capacity_ + 1; }
    int cols() const { return depth_ + 1; }
    int size() const { return rows() * cols(); }

    const Belief& at(int row, int col) const;
    const Belief& at(BeliefIndex idx) const { return at(idx.row, idx.col); }

    int linear(int row, int col) const { return row * cols() + col; }
    int linear(BeliefIndex idx) const { return linear(idx.row, idx.col); }
    BeliefIndex from_linear(int idx) const { return {idx / cols(), idx % cols()}; }

    BeliefIndex step_no_command(BeliefIndex idx) const;
    /// Reset index after a command whose update reported level b_tilde.
    BeliefIndex reset_after_update(int b_tilde) const;
    /// Reset index after a command that produced no update (rho^0 == rho^1).
    BeliefIndex reset_no_update() const { return {1, 0}; }

    /// CSV rows: row, col, beta_0, ..., beta_B.
    void write_csv(std::ostream& out) const;

private:
    double lambda_ = 0.0;
    int capacity_ = 0;
    int depth_ = 0;
    std::vector<Belief> table_;
};

} // namespace aoi
