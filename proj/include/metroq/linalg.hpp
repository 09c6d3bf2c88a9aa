// Copyright 2026 The metroq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Dense complex matrices and vectors, tensor products, and the
 * vectorization calculus |C> = sum_ij C_ij |i>|j>.
 *
 * Composite index convention: subsystem 0 is the most significant digit, so
 * the basis state |i>|j> of a d x d register has index i*d + j. vec() uses the
 * same (row-major) ordering, which is what makes
 *     (A kron B) vec(C) == vec(A C B^T)
 * hold exactly as written.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace metroq {

using cplx = std::complex<double>;

/// Tolerance for algebraic identities.
inline constexpr double kIdentityTol = 1e-12;
/// Tolerance for structural predicates on matrices built from long products.
inline constexpr double kPredicateTol = 1e-10;

class ComplexVector {
   public:
    explicit ComplexVector(std::size_t dim) : entries_(dim, cplx{0.0, 0.0}) {
        if (dim == 0) {
            throw std::invalid_argument("ComplexVector: dimension must be positive");
        }
    }
    explicit ComplexVector(std::vector<cplx> entries) : entries_(std::move(entries)) {
        if (entries_.empty()) {
            throw std::invalid_argument("ComplexVector: dimension must be positive");
        }
    }
    ComplexVector(std::initializer_list<cplx> entries) : ComplexVector(std::vector<cplx>(entries)) {}

    /// Computational basis vector |index>.
    static ComplexVector basis(std::size_t dim, std::size_t index) {
        if (index >= dim) {
            throw std::out_of_range("ComplexVector::basis: index out of range");
        }
        ComplexVector v(dim);
        v.entries_[index] = 1.0;
        return v;
    }

    std::size_t dim() const { return entries_.size(); }
    cplx &operator[](std::size_t i) { return entries_[i]; }
    const cplx &operator[](std::size_t i) const { return entries_[i]; }
    std::span<const cplx> entries() const { return entries_; }
    std::span<cplx> entries() { return entries_; }

    double norm() const {
        double s = 0.0;
        for (const auto &a : entries_) {
            s += std::norm(a);
        }
        return std::sqrt(s);
    }

    ComplexVector normalized() const {
        const double n = norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw std::invalid_argument("ComplexVector::normalized: zero or non-finite norm");
        }
        ComplexVector out(*this);
        for (auto &a : out.entries_) {
            a /= n;
        }
        return out;
    }

    ComplexVector &operator*=(cplx s) {
        for (auto &a : entries_) {
            a *= s;
        }
        return *this;
    }
    ComplexVector &operator+=(const ComplexVector &o) {
        require_same_dim(o);
        for (std::size_t i = 0; i < dim(); ++i) {
            entries_[i] += o.entries_[i];
        }
        return *this;
    }
    ComplexVector &operator-=(const ComplexVector &o) {
        require_same_dim(o);
        for (std::size_t i = 0; i < dim(); ++i) {
            entries_[i] -= o.entries_[i];
        }
        return *this;
    }
    friend ComplexVector operator*(cplx s, ComplexVector v) { return v *= s; }
    friend ComplexVector operator+(ComplexVector a, const ComplexVector &b) { return a += b; }
    friend ComplexVector operator-(ComplexVector a, const ComplexVector &b) { return a -= b; }

    double max_abs() const {
        double m = 0.0;
        for (const auto &a : entries_) {
            m = std::max(m, std::abs(a));
        }
        return m;
    }

   private:
    void require_same_dim(const ComplexVector &o) const {
        if (o.dim() != dim()) {
            throw std::invalid_argument("ComplexVector: dimension mismatch");
        }
    }

    std::vector<cplx> entries_;
};

/// <a|b>, conjugate-linear in the first argument.
inline cplx inner(const ComplexVector &a, const ComplexVector &b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("inner: dimension mismatch");
    }
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

class ComplexMatrix {
   public:
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
        }
    }
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> row_major)
        : rows_(rows), cols_(cols), entries_(std::move(row_major)) {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
        }
        if (entries_.size() != rows * cols) {
            throw std::invalid_argument("ComplexMatrix: entry count does not match rows*cols");
        }
    }
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
        : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
        if (rows_ == 0 || cols_ == 0) {
            throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
        }
        entries_.reserve(rows_ * cols_);
        for (const auto &r : rows) {
            if (r.size() != cols_) {
                throw std::invalid_argument("ComplexMatrix: ragged initializer");
            }
            entries_.insert(entries_.end(), r.begin(), r.end());
        }
    }

    static ComplexMatrix identity(std::size_t d) {
        ComplexMatrix m(d, d);
        for (std::size_t i = 0; i < d; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }
    static ComplexMatrix diagonal(std::span<const cplx> diag) {
        ComplexMatrix m(diag.size(), diag.size());
        for (std::size_t i = 0; i < diag.size(); ++i) {
            m(i, i) = diag[i];
        }
        return m;
    }
    /// |a><b|
    static ComplexMatrix outer(const ComplexVector &a, const ComplexVector &b) {
        ComplexMatrix m(a.dim(), b.dim());
        for (std::size_t i = 0; i < a.dim(); ++i) {
            for (std::size_t j = 0; j < b.dim(); ++j) {
                m(i, j) = a[i] * std::conj(b[j]);
            }
        }
        return m;
    }
    static ComplexMatrix projector(const ComplexVector &v) { return outer(v, v); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    cplx &operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const cplx &operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
    std::span<const cplx> entries() const { return entries_; }

    ComplexMatrix transpose() const {
        ComplexMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }
    ComplexMatrix conj() const {
        ComplexMatrix c(*this);
        for (auto &a : c.entries_) {
            a = std::conj(a);
        }
        return c;
    }
    ComplexMatrix adjoint() const { return transpose().conj(); }

    cplx trace() const {
        require_square("trace");
        cplx t{0.0, 0.0};
        for (std::size_t i = 0; i < rows_; ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto &a : entries_) {
            m = std::max(m, std::abs(a));
        }
        return m;
    }

    ComplexMatrix &operator*=(cplx s) {
        for (auto &a : entries_) {
            a *= s;
        }
        return *this;
    }
    ComplexMatrix &operator+=(const ComplexMatrix &o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            entries_[i] += o.entries_[i];
        }
        return *this;
    }
    ComplexMatrix &operator-=(const ComplexMatrix &o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            entries_[i] -= o.entries_[i];
        }
        return *this;
    }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix m) { return m *= s; }
    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        if (a.cols_ != b.rows_) {
            throw std::invalid_argument("ComplexMatrix product: inner dimensions differ");
        }
        ComplexMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{0.0, 0.0}) {
                    continue;
                }
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    c(i, j) += aik * b(k, j);
                }
            }
        }
        return c;
    }
    friend ComplexVector operator*(const ComplexMatrix &a, const ComplexVector &v) {
        if (a.cols_ != v.dim()) {
            throw std::invalid_argument("ComplexMatrix * ComplexVector: dimension mismatch");
        }
        ComplexVector out(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            cplx s{0.0, 0.0};
            for (std::size_t j = 0; j < a.cols_; ++j) {
                s += a(i, j) * v[j];
            }
            out[i] = s;
        }
        return out;
    }

   private:
    void require_square(const char *what) const {
        if (!is_square()) {
            throw std::invalid_argument(std::string(what) + ": matrix is not square");
        }
    }
    void require_same_shape(const ComplexMatrix &o) const {
        if (o.rows_ != rows_ || o.cols_ != cols_) {
            throw std::invalid_argument("ComplexMatrix: shape mismatch");
        }
    }

    std::size_t rows_;
    std::size_t cols_;
    std::vector<cplx> entries_;
};

inline double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) { return (a - b).max_abs(); }
inline double max_abs_diff(const ComplexVector &a, const ComplexVector &b) { return (a - b).max_abs(); }

inline ComplexMatrix matrix_power(const ComplexMatrix &m, std::size_t n) {
    if (!m.is_square()) {
        throw std::invalid_argument("matrix_power: matrix is not square");
    }
    ComplexMatrix out = ComplexMatrix::identity(m.rows());
    for (std::size_t i = 0; i < n; ++i) {
        out = out * m;
    }
    return out;
}

// Structural predicates. All are pure functions of the entries.

inline bool is_unitary(const ComplexMatrix &m, double tol = kPredicateTol) {
    if (!m.is_square()) {
        return false;
    }
    return max_abs_diff(m.adjoint() * m, ComplexMatrix::identity(m.rows())) < tol;
}

inline bool is_hermitian(const ComplexMatrix &m, double tol = kPredicateTol) {
    return m.is_square() && max_abs_diff(m, m.adjoint()) < tol;
}

inline bool is_diagonal(const ComplexMatrix &m, double tol = kPredicateTol) {
    if (!m.is_square()) {
        return false;
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (i != j && std::abs(m(i, j)) >= tol) {
                return false;
            }
        }
    }
    return true;
}

inline bool is_antidiagonal(const ComplexMatrix &m, double tol = kPredicateTol) {
    if (!m.is_square()) {
        return false;
    }
    const std::size_t d = m.rows();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (i + j != d - 1 && std::abs(m(i, j)) >= tol) {
                return false;
            }
        }
    }
    return true;
}

/// Tensor product; entry ((i,k),(j,l)) = a(i,j) * b(k,l).
inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
                }
            }
        }
    }
    return out;
}

inline ComplexVector kron(const ComplexVector &a, const ComplexVector &b) {
    ComplexVector out(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t k = 0; k < b.dim(); ++k) {
            out[i * b.dim() + k] = a[i] * b[k];
        }
    }
    return out;
}

/// |C> = sum_ij C_ij |i>|j>, unnormalized.
inline ComplexVector vec(const ComplexMatrix &c) {
    if (!c.is_square()) {
        throw std::invalid_argument("vec: only square operators are vectorized");
    }
    return ComplexVector(std::vector<cplx>(c.entries().begin(), c.entries().end()));
}

inline ComplexMatrix unvec(const ComplexVector &v, std::size_t d) {
    if (d == 0 || v.dim() != d * d) {
        throw std::invalid_argument("unvec: vector dimension is not d^2");
    }
    return ComplexMatrix(d, d, std::vector<cplx>(v.entries().begin(), v.entries().end()));
}

/// max |(A kron B) vec(C) - vec(A C B^T)|; zero up to roundoff for every A, B, C.
inline double vec_identity_residual(const ComplexMatrix &a, const ComplexMatrix &b, const ComplexMatrix &c) {
    if (!a.is_square() || !b.is_square() || !c.is_square() || a.rows() != b.rows() || a.rows() != c.rows()) {
        throw std::invalid_argument("vec_identity_residual: operands must be square with equal dimension");
    }
    return max_abs_diff(kron(a, b) * vec(c), vec(a * c * b.transpose()));
}

// ---------------------------------------------------------------------------
// Subsystem bookkeeping.

inline std::size_t product_of(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

namespace detail {

struct SubsystemSplit {
    std::size_t left;   // product of dims before k
    std::size_t local;  // dims[k]
    std::size_t right;  // product of dims after k
};

inline SubsystemSplit split_at(std::span<const std::size_t> dims, std::size_t k) {
    if (k >= dims.size()) {
        throw std::out_of_range("subsystem index out of range");
    }
    for (auto d : dims) {
        if (d == 0) {
            throw std::invalid_argument("subsystem dimensions must be positive");
        }
    }
    return {product_of(dims.subspan(0, k)), dims[k], product_of(dims.subspan(k + 1))};
}

/// Partial trace without density-matrix validation; used for derivatives and
/// other Hermitian-but-not-positive operators.
inline ComplexMatrix partial_trace_unchecked(const ComplexMatrix &rho, std::span<const std::size_t> dims,
                                             std::span<const std::size_t> keep) {
    const std::size_t total = product_of(dims);
    if (!rho.is_square() || rho.rows() != total) {
        throw std::invalid_argument("partial_trace: operator dimension does not match subsystem dims");
    }
    std::vector<bool> kept(dims.size(), false);
    for (auto k : keep) {
        if (k >= dims.size()) {
            throw std::out_of_range("partial_trace: kept index out of range");
        }
        if (kept[k]) {
            throw std::invalid_argument("partial_trace: duplicate kept index");
        }
        kept[k] = true;
    }
    std::size_t kept_dim = 1;
    std::size_t traced_dim = 1;
    for (std::size_t s = 0; s < dims.size(); ++s) {
        (kept[s] ? kept_dim : traced_dim) *= dims[s];
    }
    // Map each full index to (kept index, traced index) in subsystem order.
    std::vector<std::size_t> kept_of(total), traced_of(total);
    std::vector<std::size_t> digits(dims.size());
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (std::size_t s = dims.size(); s-- > 0;) {
            digits[s] = rem % dims[s];
            rem /= dims[s];
        }
        std::size_t ki = 0, ti = 0;
        for (std::size_t s = 0; s < dims.size(); ++s) {
            if (kept[s]) {
                ki = ki * dims[s] + digits[s];
            } else {
                ti = ti * dims[s] + digits[s];
            }
        }
        kept_of[idx] = ki;
        traced_of[idx] = ti;
    }
    ComplexMatrix out(kept_dim, kept_dim);
    for (std::size_t r = 0; r < total; ++r) {
        for (std::size_t c = 0; c < total; ++c) {
            if (traced_of[r] == traced_of[c]) {
                out(kept_of[r], kept_of[c]) += rho(r, c);
            }
        }
    }
    return out;
}

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix &m) {
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
        }
    }
    return e;
}

}  // namespace detail

/// Eigenvalues of a Hermitian matrix in ascending order.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix &m) {
    if (!is_hermitian(m)) {
        throw std::invalid_argument("hermitian_eigenvalues: matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(detail::to_eigen(m), Eigen::EigenvaluesOnly);
    const auto &ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

inline std::vector<double> singular_values(const ComplexMatrix &m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(detail::to_eigen(m));
    const auto &sv = svd.singularValues();
    return {sv.data(), sv.data() + sv.size()};
}

/// Hermitian, positive semidefinite within kPredicateTol, unit trace within kPredicateTol.
inline bool is_density_matrix(const ComplexMatrix &rho) {
    if (!is_hermitian(rho)) {
        return false;
    }
    const cplx tr = rho.trace();
    if (std::abs(tr - 1.0) > kPredicateTol) {
        return false;
    }
    return hermitian_eigenvalues(rho).front() > -kPredicateTol;
}

/// (M + M^dagger) / 2
inline ComplexMatrix hermitize(const ComplexMatrix &m) { return 0.5 * (m + m.adjoint()); }

/// Reduced density matrix on the subsystems listed in `keep` (in subsystem order).
inline ComplexMatrix partial_trace(const ComplexMatrix &rho, std::span<const std::size_t> dims,
                                   std::span<const std::size_t> keep) {
    if (!rho.is_square() || rho.rows() != product_of(dims)) {
        throw std::invalid_argument("partial_trace: operator dimension does not match subsystem dims");
    }
    if (!is_density_matrix(rho)) {
        throw std::invalid_argument("partial_trace: input is not a density matrix");
    }
    return hermitize(detail::partial_trace_unchecked(rho, dims, keep));
}

inline ComplexMatrix partial_trace(const ComplexMatrix &rho, std::initializer_list<std::size_t> dims,
                                   std::initializer_list<std::size_t> keep) {
    return partial_trace(rho, std::span<const std::size_t>(dims.begin(), dims.size()),
                         std::span<const std::size_t>(keep.begin(), keep.size()));
}

/// Apply a local operator to subsystem k of a pure state.
inline ComplexVector apply_local(const ComplexVector &state, std::span<const std::size_t> dims, std::size_t k,
                                 const ComplexMatrix &op) {
    const auto [left, local, right] = detail::split_at(dims, k);
    if (state.dim() != left * local * right) {
        throw std::invalid_argument("apply_local: state dimension does not match subsystem dims");
    }
    if (op.rows() != local || op.cols() != local) {
        throw std::invalid_argument("apply_local: operator does not match subsystem dimension");
    }
    ComplexVector out(state.dim());
    for (std::size_t l = 0; l < left; ++l) {
        for (std::size_t a = 0; a < local; ++a) {
            for (std::size_t b = 0; b < local; ++b) {
                const cplx oab = op(a, b);
                if (oab == cplx{0.0, 0.0}) {
                    continue;
                }
                const std::size_t dst = (l * local + a) * right;
                const std::size_t src = (l * local + b) * right;
                for (std::size_t r = 0; r < right; ++r) {
                    out[dst + r] += oab * state[src + r];
                }
            }
        }
    }
    return out;
}

/// I kron ... kron op kron ... kron I with `op` on subsystem k.
inline ComplexMatrix embed(const ComplexMatrix &op, std::span<const std::size_t> dims, std::size_t k) {
    const auto [left, local, right] = detail::split_at(dims, k);
    if (op.rows() != local || op.cols() != local) {
        throw std::invalid_argument("embed: operator does not match subsystem dimension");
    }
    return kron(kron(ComplexMatrix::identity(left), op), ComplexMatrix::identity(right));
}

/// Outcome of projecting one subsystem of a pure state onto a vector.
struct Projection {
    double probability = 0.0;
    /// Renormalized state of the remaining subsystems; empty when the outcome
    /// has zero probability.
    std::optional<ComplexVector> conditional;

    bool defined() const { return conditional.has_value(); }
};

/// Probabilities below this are treated as impossible outcomes.
inline constexpr double kZeroProbability = 1e-24;

inline Projection project_subsystem(const ComplexVector &state, std::span<const std::size_t> dims, std::size_t k,
                                    const ComplexVector &onto) {
    const auto [left, local, right] = detail::split_at(dims, k);
    if (state.dim() != left * local * right) {
        throw std::invalid_argument("project_subsystem: state dimension does not match subsystem dims");
    }
    if (onto.dim() != local) {
        throw std::invalid_argument("project_subsystem: projection vector does not match subsystem dimension");
    }
    if (std::abs(state.norm() - 1.0) > kPredicateTol || std::abs(onto.norm() - 1.0) > kPredicateTol) {
        throw std::invalid_argument("project_subsystem: state and projection vector must be normalized");
    }
    ComplexVector residual(left * right);
    for (std::size_t l = 0; l < left; ++l) {
        for (std::size_t r = 0; r < right; ++r) {
            cplx s{0.0, 0.0};
            for (std::size_t a = 0; a < local; ++a) {
                s += std::conj(onto[a]) * state[(l * local + a) * right + r];
            }
            residual[l * right + r] = s;
        }
    }
    const double n = residual.norm();
    Projection out;
    out.probability = std::min(1.0, n * n);
    if (out.probability > kZeroProbability) {
        out.conditional = residual.normalized();
    } else {
        out.probability = 0.0;
    }
    return out;
}

inline Projection project_subsystem(const ComplexVector &state, std::initializer_list<std::size_t> dims,
                                    std::size_t k, const ComplexVector &onto) {
    return project_subsystem(state, std::span<const std::size_t>(dims.begin(), dims.size()), k, onto);
}

/// Mixed-state analogue of project_subsystem: conditional density matrix of
/// the remaining subsystems after finding subsystem k in state `onto`.
struct MixedProjection {
    double probability = 0.0;
    std::optional<ComplexMatrix> conditional;
};

inline MixedProjection project_subsystem(const ComplexMatrix &rho, std::span<const std::size_t> dims, std::size_t k,
                                         const ComplexVector &onto) {
    const auto [left, local, right] = detail::split_at(dims, k);
    if (!rho.is_square() || rho.rows() != left * local * right) {
        throw std::invalid_argument("project_subsystem: operator dimension does not match subsystem dims");
    }
    if (onto.dim() != local) {
        throw std::invalid_argument("project_subsystem: projection vector does not match subsystem dimension");
    }
    const std::size_t rest = left * right;
    // (I kron <onto| kron I) rho (I kron |onto> kron I)
    ComplexMatrix reduced(rest, rest);
    for (std::size_t l1 = 0; l1 < left; ++l1) {
        for (std::size_t r1 = 0; r1 < right; ++r1) {
            for (std::size_t l2 = 0; l2 < left; ++l2) {
                for (std::size_t r2 = 0; r2 < right; ++r2) {
                    cplx s{0.0, 0.0};
                    for (std::size_t a = 0; a < local; ++a) {
                        for (std::size_t b = 0; b < local; ++b) {
                            s += std::conj(onto[a]) * rho((l1 * local + a) * right + r1, (l2 * local + b) * right + r2) *
                                 onto[b];
                        }
                    }
                    reduced(l1 * right + r1, l2 * right + r2) = s;
                }
            }
        }
    }
    MixedProjection out;
    out.probability = std::clamp(reduced.trace().real(), 0.0, 1.0);
    if (out.probability > kZeroProbability) {
        out.conditional = hermitize((1.0 / out.probability) * reduced);
    } else {
        out.probability = 0.0;
    }
    return out;
}

/// Half the sum of singular values of r1 - r2.
inline double trace_distance(const ComplexMatrix &r1, const ComplexMatrix &r2) {
    if (r1.rows() != r2.rows() || r1.cols() != r2.cols()) {
        throw std::invalid_argument("trace_distance: dimension mismatch");
    }
    const auto sv = singular_values(r1 - r2);
    return 0.5 * std::accumulate(sv.begin(), sv.end(), 0.0);
}

/// |<v1|v2>|^2 of the normalized inputs; insensitive to global phase.
inline double fidelity_up_to_phase(const ComplexVector &v1, const ComplexVector &v2) {
    if (v1.dim() != v2.dim()) {
        throw std::invalid_argument("fidelity_up_to_phase: dimension mismatch");
    }
    const double f = std::norm(inner(v1.normalized(), v2.normalized()));
    return std::clamp(f, 0.0, 1.0);
}

}  // namespace metroq
