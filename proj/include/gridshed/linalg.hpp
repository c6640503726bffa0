#pragma once

// Symmetric indefinite LDL^T factorization (Bunch-Kaufman, 1x1/2x2 pivots)
// of reduced KKT matrices, and bordered re-solves that reuse the factors
// when the active set is tweaked.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <memory>
#include <stdexcept>
#include <vector>

namespace gridshed {

struct FactorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StructurallySingular : FactorError {
    using FactorError::FactorError;
};
struct NumericallySingular : FactorError {
    using FactorError::FactorError;
};
struct BorderSingular : FactorError {
    using FactorError::FactorError;
};

struct Inertia {
    int positive = 0, negative = 0, zero = 0;
};

class KktFactorization {
  public:
    // A must be symmetric; only structural symmetry is assumed, values are
    // symmetrized by averaging.
    explicit KktFactorization(const Eigen::SparseMatrix<double>& A);
    explicit KktFactorization(const Eigen::MatrixXd& A);

    int dim() const { return n_; }
    const Inertia& inertia() const { return inertia_; }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    void solve_in_place(Eigen::VectorXd& b) const;

    // Explicit factors for verification: perm maps factored position ->
    // original index, L is unit lower triangular, D block diagonal.
    const std::vector<int>& permutation() const { return perm_; }
    Eigen::MatrixXd unit_lower() const;
    Eigen::MatrixXd block_diagonal() const;

    // process-wide count of factorizations, for cost regressions
    static long factorization_count();

  private:
    void factorize(Eigen::MatrixXd A);
    int n_ = 0;
    Eigen::MatrixXd f_;            // L below diagonal, D on (block) diagonal
    std::vector<double> d_off_;    // subdiagonal entries of 2x2 blocks (0 if 1x1)
    std::vector<int> perm_;
    std::vector<char> is_2x2_first_;
    std::vector<int> block_starts_;
    Inertia inertia_;
};

// Appendix-style augmented system [H V; X S] [x1; x2] = [b1; b2] solved by
// reusing the factorization of H.  Border entries are added or removed one
// at a time; Y = H^-1 V is cached per column, C = S - X Y is rebuilt on
// change.  No solve ever refactorizes H.
class AugmentedSystem {
  public:
    explicit AugmentedSystem(std::shared_ptr<const KktFactorization> base);

    int width() const { return static_cast<int>(cols_.size()); }

    // s_row: coefficients of existing border unknowns in the new border row;
    // s_col: coefficients of the new unknown in existing border rows; both of
    // length width() at call time.  Returns the position of the new entry.
    int add_border(const Eigen::VectorXd& col, const Eigen::VectorXd& row,
                   const Eigen::VectorXd& s_row, const Eigen::VectorXd& s_col, double s_diag);
    void remove_border(int pos);
    void clear();

    // Solve with the current border; x2 has length width().  Throws
    // BorderSingular when C = S - X Y is rank deficient.
    void solve(const Eigen::VectorXd& b1, const Eigen::VectorXd& b2, Eigen::VectorXd& x1,
               Eigen::VectorXd& x2) const;

  private:
    std::shared_ptr<const KktFactorization> base_;
    std::vector<Eigen::VectorXd> cols_;        // V columns
    std::vector<Eigen::VectorXd> rows_;        // X rows
    Eigen::MatrixXd s_;                        // dense S, width x width
    mutable std::vector<Eigen::VectorXd> y_;   // cached H^-1 V, empty = not yet computed
    mutable Eigen::MatrixXd c_;                // S - X Y
    mutable Eigen::FullPivLU<Eigen::MatrixXd> c_lu_;
    mutable bool c_valid_ = false;
    void refresh() const;
};

}  // namespace gridshed
