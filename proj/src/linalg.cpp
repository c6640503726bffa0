#include "gridshed/linalg.hpp"

#include <atomic>
#include <cmath>

namespace gridshed {

namespace {
std::atomic<long> g_factorizations{0};
constexpr double kBkAlpha = 0.6403882032022076;   // (1+sqrt(17))/8
}

long KktFactorization::factorization_count() { return g_factorizations.load(); }

KktFactorization::KktFactorization(const Eigen::SparseMatrix<double>& A) {
    Eigen::MatrixXd dense = Eigen::MatrixXd(A);
    dense = 0.5 * (dense + dense.transpose()).eval();
    factorize(std::move(dense));
}

KktFactorization::KktFactorization(const Eigen::MatrixXd& A) {
    Eigen::MatrixXd dense = 0.5 * (A + A.transpose());
    factorize(std::move(dense));
}

void KktFactorization::factorize(Eigen::MatrixXd A) {
    n_ = static_cast<int>(A.rows());
    for (int i = 0; i < n_; ++i)
        if (A.row(i).cwiseAbs().maxCoeff() == 0.0)
            throw StructurallySingular("zero row " + std::to_string(i));
    g_factorizations.fetch_add(1);
    perm_.resize(n_);
    for (int i = 0; i < n_; ++i) perm_[i] = i;
    d_off_.assign(n_, 0.0);
    is_2x2_first_.assign(n_, 0);
    inertia_ = Inertia{};
    const double scale = n_ ? A.cwiseAbs().maxCoeff() : 0.0;
    const double tiny = 1e-12 * std::max(scale, 1.0);

    auto sym_swap = [&](int a, int b) {
        if (a == b) return;
        A.row(a).swap(A.row(b));
        A.col(a).swap(A.col(b));
        std::swap(perm_[a], perm_[b]);
    };

    int k = 0;
    while (k < n_) {
        int r = k;
        double colmax = 0.0;
        for (int i = k + 1; i < n_; ++i) {
            double v = std::abs(A(i, k));
            if (v > colmax) { colmax = v; r = i; }
        }
        double akk = std::abs(A(k, k));
        bool use_2x2 = false;
        if (akk < kBkAlpha * colmax) {
            double rowmax = 0.0;
            for (int i = k; i < n_; ++i)
                if (i != r) rowmax = std::max(rowmax, std::abs(A(i, r)));
            if (akk * rowmax >= kBkAlpha * colmax * colmax) {
                // keep the 1x1 pivot at k
            } else if (std::abs(A(r, r)) >= kBkAlpha * rowmax) {
                sym_swap(k, r);
            } else {
                sym_swap(k + 1, r);
                use_2x2 = true;
            }
        }

        int rem = n_ - k - (use_2x2 ? 2 : 1);
        if (!use_2x2) {
            double d = A(k, k);
            if (std::abs(d) <= tiny)
                throw NumericallySingular("pivot " + std::to_string(k) + " below tolerance");
            if (d > 0) ++inertia_.positive; else ++inertia_.negative;
            if (rem > 0) {
                Eigen::VectorXd w = A.block(k + 1, k, rem, 1);
                Eigen::VectorXd l = w / d;
                A.block(k + 1, k + 1, rem, rem).noalias() -= l * w.transpose();
                A.block(k + 1, k, rem, 1) = l;
            }
            k += 1;
        } else {
            double a = A(k, k), b = A(k + 1, k), c = A(k + 1, k + 1);
            double det = a * c - b * b;
            if (std::abs(det) <= tiny * tiny)
                throw NumericallySingular("2x2 pivot at " + std::to_string(k) + " singular");
            // a Bunch-Kaufman 2x2 block has one eigenvalue of each sign
            ++inertia_.positive;
            ++inertia_.negative;
            is_2x2_first_[k] = 1;
            d_off_[k] = b;
            if (rem > 0) {
                Eigen::MatrixXd W = A.block(k + 2, k, rem, 2);
                Eigen::Matrix2d inv;
                inv << c / det, -b / det, -b / det, a / det;
                Eigen::MatrixXd L = W * inv;
                A.block(k + 2, k + 2, rem, rem).noalias() -= L * W.transpose();
                A.block(k + 2, k, rem, 2) = L;
            }
            k += 2;
        }
    }
    block_starts_.clear();
    for (int j = 0; j < n_;) {
        block_starts_.push_back(j);
        j += is_2x2_first_[j] ? 2 : 1;
    }
    f_ = std::move(A);
}

Eigen::MatrixXd KktFactorization::unit_lower() const {
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n_, n_);
    for (int k : block_starts_) {
        int w = is_2x2_first_[k] ? 2 : 1;
        for (int j = k; j < k + w; ++j)
            for (int i = k + w; i < n_; ++i) L(i, j) = f_(i, j);
    }
    return L;
}

Eigen::MatrixXd KktFactorization::block_diagonal() const {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n_, n_);
    for (int k : block_starts_) {
        if (is_2x2_first_[k]) {
            D(k, k) = f_(k, k);
            D(k + 1, k + 1) = f_(k + 1, k + 1);
            D(k + 1, k) = D(k, k + 1) = d_off_[k];
        } else {
            D(k, k) = f_(k, k);
        }
    }
    return D;
}

void KktFactorization::solve_in_place(Eigen::VectorXd& b) const {
    if (b.size() != n_) throw FactorError("rhs size mismatch");
    Eigen::VectorXd y(n_);
    for (int i = 0; i < n_; ++i) y[i] = b[perm_[i]];
    // L y' = y
    for (int k : block_starts_) {
        int w = is_2x2_first_[k] ? 2 : 1;
        for (int j = k; j < k + w; ++j) {
            double yj = y[j];
            if (yj != 0.0)
                for (int i = k + w; i < n_; ++i) y[i] -= f_(i, j) * yj;
        }
    }
    // D y'' = y'
    for (int k : block_starts_) {
        if (is_2x2_first_[k]) {
            double a = f_(k, k), bb = d_off_[k], c = f_(k + 1, k + 1);
            double det = a * c - bb * bb;
            double y0 = y[k], y1 = y[k + 1];
            y[k] = (c * y0 - bb * y1) / det;
            y[k + 1] = (-bb * y0 + a * y1) / det;
        } else {
            y[k] /= f_(k, k);
        }
    }
    // L^T y''' = y''
    for (auto it = block_starts_.rbegin(); it != block_starts_.rend(); ++it) {
        int k = *it;
        int w = is_2x2_first_[k] ? 2 : 1;
        for (int j = k + w - 1; j >= k; --j) {
            double acc = y[j];
            for (int i = k + w; i < n_; ++i) acc -= f_(i, j) * y[i];
            y[j] = acc;
        }
    }
    for (int i = 0; i < n_; ++i) b[perm_[i]] = y[i];
}

Eigen::VectorXd KktFactorization::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = b;
    solve_in_place(x);
    return x;
}

// ---------------------------------------------------------------------------

AugmentedSystem::AugmentedSystem(std::shared_ptr<const KktFactorization> base)
    : base_(std::move(base)) {
    s_.resize(0, 0);
}

int AugmentedSystem::add_border(const Eigen::VectorXd& col, const Eigen::VectorXd& row,
                                const Eigen::VectorXd& s_row, const Eigen::VectorXd& s_col,
                                double s_diag) {
    int w = width();
    if (col.size() != base_->dim() || row.size() != base_->dim())
        throw FactorError("border size mismatch");
    if (s_row.size() != w || s_col.size() != w) throw FactorError("S segment size mismatch");
    cols_.push_back(col);
    rows_.push_back(row);
    y_.emplace_back();   // computed lazily
    Eigen::MatrixXd s2(w + 1, w + 1);
    s2.topLeftCorner(w, w) = s_;
    s2.block(w, 0, 1, w) = s_row.transpose();
    s2.block(0, w, w, 1) = s_col;
    s2(w, w) = s_diag;
    s_ = std::move(s2);
    c_valid_ = false;
    return w;
}

void AugmentedSystem::remove_border(int pos) {
    int w = width();
    if (pos < 0 || pos >= w) throw FactorError("border position out of range");
    cols_.erase(cols_.begin() + pos);
    rows_.erase(rows_.begin() + pos);
    y_.erase(y_.begin() + pos);
    Eigen::MatrixXd s2(w - 1, w - 1);
    for (int i = 0, ii = 0; i < w; ++i) {
        if (i == pos) continue;
        for (int j = 0, jj = 0; j < w; ++j) {
            if (j == pos) continue;
            s2(ii, jj) = s_(i, j);
            ++jj;
        }
        ++ii;
    }
    s_ = std::move(s2);
    c_valid_ = false;
}

void AugmentedSystem::clear() {
    cols_.clear();
    rows_.clear();
    y_.clear();
    s_.resize(0, 0);
    c_valid_ = false;
}

void AugmentedSystem::refresh() const {
    int w = width();
    for (int j = 0; j < w; ++j)
        if (y_[j].size() == 0) y_[j] = base_->solve(cols_[j]);
    c_ = s_;
    for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j) c_(i, j) -= rows_[i].dot(y_[j]);
    c_lu_.setThreshold(1e-10);
    c_lu_.compute(c_);
    c_valid_ = true;
}

void AugmentedSystem::solve(const Eigen::VectorXd& b1, const Eigen::VectorXd& b2,
                            Eigen::VectorXd& x1, Eigen::VectorXd& x2) const {
    int w = width();
    if (b2.size() != w) throw FactorError("border rhs size mismatch");
    Eigen::VectorXd w1 = base_->solve(b1);
    if (w == 0) {
        x1 = std::move(w1);
        x2.resize(0);
        return;
    }
    if (!c_valid_) refresh();
    if (c_lu_.rank() < w) throw BorderSingular("border Schur complement is singular");
    Eigen::VectorXd rhs2 = b2;
    for (int i = 0; i < w; ++i) rhs2[i] -= rows_[i].dot(w1);
    x2 = c_lu_.solve(rhs2);
    x1 = w1;
    for (int j = 0; j < w; ++j) x1 -= y_[j] * x2[j];
}

}  // namespace gridshed
