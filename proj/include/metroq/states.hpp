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
 * Generators, phase unitaries, probe states and Kraus noise channels.
 *
 * Throughout, |0> and |1> name the eigenvectors of the generator with the
 * minimum and maximum eigenvalue. For the default qubit generator
 * H = diag(0, 1) these are the computational basis states.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "metroq/linalg.hpp"

namespace metroq {

inline const ComplexMatrix &pauli_x() {
    static const ComplexMatrix m{{0.0, 1.0}, {1.0, 0.0}};
    return m;
}
inline const ComplexMatrix &pauli_y() {
    static const ComplexMatrix m{{0.0, cplx{0.0, -1.0}}, {cplx{0.0, 1.0}, 0.0}};
    return m;
}
inline const ComplexMatrix &pauli_z() {
    static const ComplexMatrix m{{1.0, 0.0}, {0.0, -1.0}};
    return m;
}

/// Hermitian generator stored by its eigenvalues in its own eigenbasis.
class Generator {
   public:
    explicit Generator(std::vector<double> eigenvalues) : eigenvalues_(std::move(eigenvalues)) {
        if (eigenvalues_.size() < 2) {
            throw std::invalid_argument("Generator: need at least two levels");
        }
        for (std::size_t i = 0; i < eigenvalues_.size(); ++i) {
            if (!std::isfinite(eigenvalues_[i])) {
                throw std::invalid_argument("Generator: non-finite eigenvalue");
            }
            if (eigenvalues_[i] < eigenvalues_[min_index_]) {
                min_index_ = i;
            }
            if (eigenvalues_[i] > eigenvalues_[max_index_]) {
                max_index_ = i;
            }
        }
        if (!(eigenvalues_[max_index_] > eigenvalues_[min_index_])) {
            throw std::invalid_argument("Generator: spectrum has no spread");
        }
    }

    /// H = diag(0, 1).
    static Generator qubit() { return Generator({0.0, 1.0}); }

    std::size_t dim() const { return eigenvalues_.size(); }
    const std::vector<double> &eigenvalues() const { return eigenvalues_; }
    std::size_t min_index() const { return min_index_; }
    std::size_t max_index() const { return max_index_; }
    double min_eigenvalue() const { return eigenvalues_[min_index_]; }
    double max_eigenvalue() const { return eigenvalues_[max_index_]; }
    double spread() const { return max_eigenvalue() - min_eigenvalue(); }

    /// sum_j H^(j) acting on n copies of the probe.
    Generator total(std::size_t n) const {
        if (n == 0) {
            throw std::invalid_argument("Generator::total: need at least one probe");
        }
        std::vector<double> acc = eigenvalues_;
        for (std::size_t copy = 1; copy < n; ++copy) {
            std::vector<double> next;
            next.reserve(acc.size() * dim());
            for (double a : acc) {
                for (double e : eigenvalues_) {
                    next.push_back(a + e);
                }
            }
            acc = std::move(next);
        }
        return Generator(std::move(acc));
    }

    Generator scaled(double factor) const {
        std::vector<double> ev = eigenvalues_;
        for (auto &e : ev) {
            e *= factor;
        }
        return Generator(std::move(ev));
    }

    ComplexMatrix matrix() const {
        std::vector<cplx> d(eigenvalues_.begin(), eigenvalues_.end());
        return ComplexMatrix::diagonal(d);
    }

   private:
    std::vector<double> eigenvalues_;
    std::size_t min_index_ = 0;
    std::size_t max_index_ = 0;
};

/// U_phi = exp(i phi H), diagonal in the eigenbasis of H.
inline ComplexMatrix u_phi(const Generator &h, double phi) {
    std::vector<cplx> d;
    d.reserve(h.dim());
    for (double e : h.eigenvalues()) {
        d.push_back(std::polar(1.0, phi * e));
    }
    return ComplexMatrix::diagonal(d);
}

/// (|0> + sign e^{i lambda} |1>)/sqrt(2) with |0>, |1> the extremal eigenvectors of h.
inline ComplexVector probe_state(const Generator &h, int sign, double lambda = 0.0) {
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("probe_state: sign must be +1 or -1");
    }
    ComplexVector v(h.dim());
    v[h.min_index()] = std::numbers::sqrt2 / 2.0;
    v[h.max_index()] = static_cast<double>(sign) * std::polar(std::numbers::sqrt2 / 2.0, lambda);
    return v;
}

inline ComplexVector plus_state() { return probe_state(Generator::qubit(), +1); }
inline ComplexVector minus_state() { return probe_state(Generator::qubit(), -1); }

/// (|0>^n + e^{i lambda}|1>^n)/sqrt(2) on n copies of the probe of h.
inline ComplexVector ghz_state(const Generator &h, std::size_t n, double lambda = 0.0) {
    if (n == 0) {
        throw std::invalid_argument("ghz_state: need at least one probe");
    }
    std::size_t dim = 1;
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t j = 0; j < n; ++j) {
        lo = lo * h.dim() + h.min_index();
        hi = hi * h.dim() + h.max_index();
        dim *= h.dim();
    }
    ComplexVector v(dim);
    v[lo] = std::numbers::sqrt2 / 2.0;
    v[hi] = std::polar(std::numbers::sqrt2 / 2.0, lambda);
    return v;
}

inline ComplexVector ghz_state(std::size_t n, double lambda = 0.0) {
    return ghz_state(Generator::qubit(), n, lambda);
}

/// n-fold tensor power of a single-probe state.
inline ComplexVector product_state(const ComplexVector &single, std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("product_state: need at least one probe");
    }
    ComplexVector out = single;
    for (std::size_t j = 1; j < n; ++j) {
        out = kron(out, single);
    }
    return out;
}

enum class CorrelationBasis { Computational, Hadamard };

inline std::string_view to_string(CorrelationBasis b) {
    return b == CorrelationBasis::Computational ? "computational" : "hadamard";
}

/// Weighted pure components of a classically correlated two-probe state.
struct MixtureComponent {
    double weight;
    ComplexVector state;
};

/// |00>,|11> (computational) or |++>,|-->, (hadamard), each with weight 1/2.
inline std::vector<MixtureComponent> classical_corr_components(CorrelationBasis basis) {
    const ComplexVector a = basis == CorrelationBasis::Computational ? ComplexVector::basis(2, 0) : plus_state();
    const ComplexVector b = basis == CorrelationBasis::Computational ? ComplexVector::basis(2, 1) : minus_state();
    return {{0.5, kron(a, a)}, {0.5, kron(b, b)}};
}

inline ComplexMatrix classical_corr_state(CorrelationBasis basis) {
    ComplexMatrix rho(4, 4);
    for (const auto &c : classical_corr_components(basis)) {
        rho += c.weight * ComplexMatrix::projector(c.state);
    }
    return rho;
}

// ---------------------------------------------------------------------------
// Noise channels.

/// Finite Kraus family acting on a d-dimensional system.
///
/// The regular constructor enforces trace preservation. family() builds a
/// completely positive map without that check; the effective channels produced
/// by the parallel-to-sequential conversion are only trace preserving when the
/// second probe's noise is unital.
class KrausChannel {
   public:
    explicit KrausChannel(std::vector<ComplexMatrix> ops) : KrausChannel(std::move(ops), true) {}

    static KrausChannel family(std::vector<ComplexMatrix> ops) { return KrausChannel(std::move(ops), false); }

    static KrausChannel identity(std::size_t d) { return KrausChannel({ComplexMatrix::identity(d)}); }

    std::size_t dim() const { return ops_.front().rows(); }
    const std::vector<ComplexMatrix> &ops() const { return ops_; }

    /// max |sum_k A_k^dagger A_k - I|
    double completeness_residual() const {
        ComplexMatrix s(dim(), dim());
        for (const auto &a : ops_) {
            s += a.adjoint() * a;
        }
        return max_abs_diff(s, ComplexMatrix::identity(dim()));
    }

    /// max |sum_k A_k A_k^dagger - I|
    double unitality_residual() const {
        ComplexMatrix s(dim(), dim());
        for (const auto &a : ops_) {
            s += a * a.adjoint();
        }
        return max_abs_diff(s, ComplexMatrix::identity(dim()));
    }

    bool is_trace_preserving(double tol = kPredicateTol) const { return completeness_residual() < tol; }

    /// Channel applied to a full-register density matrix.
    ComplexMatrix operator()(const ComplexMatrix &rho) const {
        ComplexMatrix out(rho.rows(), rho.cols());
        for (const auto &a : ops_) {
            out += a * rho * a.adjoint();
        }
        return out;
    }

   private:
    KrausChannel(std::vector<ComplexMatrix> ops, bool require_complete) : ops_(std::move(ops)) {
        if (ops_.empty()) {
            throw std::invalid_argument("KrausChannel: empty Kraus family");
        }
        const std::size_t d = ops_.front().rows();
        for (const auto &a : ops_) {
            if (a.rows() != d || a.cols() != d) {
                throw std::invalid_argument("KrausChannel: Kraus operators must all be d x d");
            }
        }
        if (require_complete && !is_trace_preserving()) {
            throw std::invalid_argument("KrausChannel: Kraus operators are not complete");
        }
    }

    std::vector<ComplexMatrix> ops_;
};

namespace detail {
inline void require_probability(double p, const char *what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string(what) + ": parameter must lie in [0, 1]");
    }
}
}  // namespace detail

/// Phase flip: {sqrt(1-p) I, sqrt(p) Z}.
inline KrausChannel dephasing(double p) {
    detail::require_probability(p, "dephasing");
    return KrausChannel({std::sqrt(1.0 - p) * ComplexMatrix::identity(2), std::sqrt(p) * pauli_z()});
}

/// Bit flip with phase: {sqrt(1-p) X, sqrt(p) Y}.
inline KrausChannel bit_phase_flip(double p) {
    detail::require_probability(p, "bit_phase_flip");
    return KrausChannel({std::sqrt(1.0 - p) * pauli_x(), std::sqrt(p) * pauli_y()});
}

/// {diag(1, sqrt(1-g)), sqrt(g)|0><1|}; not unital for g > 0.
inline KrausChannel amplitude_damping(double g) {
    detail::require_probability(g, "amplitude_damping");
    return KrausChannel(
        {ComplexMatrix{{1.0, 0.0}, {0.0, std::sqrt(1.0 - g)}}, ComplexMatrix{{0.0, std::sqrt(g)}, {0.0, 0.0}}});
}

/// Apply `ch` to subsystem k of a multi-probe density matrix.
inline ComplexMatrix apply_channel(const ComplexMatrix &rho, const KrausChannel &ch, std::span<const std::size_t> dims,
                                   std::size_t k) {
    if (!rho.is_square() || rho.rows() != product_of(dims)) {
        throw std::invalid_argument("apply_channel: density matrix does not match subsystem dims");
    }
    if (k >= dims.size() || dims[k] != ch.dim()) {
        throw std::invalid_argument("apply_channel: channel dimension does not match subsystem");
    }
    ComplexMatrix out(rho.rows(), rho.cols());
    for (const auto &a : ch.ops()) {
        const ComplexMatrix full = embed(a, dims, k);
        out += full * rho * full.adjoint();
    }
    return hermitize(out);
}

inline ComplexMatrix apply_channel(const ComplexMatrix &rho, const KrausChannel &ch,
                                   std::initializer_list<std::size_t> dims, std::size_t k) {
    return apply_channel(rho, ch, std::span<const std::size_t>(dims.begin(), dims.size()), k);
}

inline bool is_unital(const KrausChannel &ch) { return ch.unitality_residual() < kPredicateTol; }

/// Kraus family is uniformly diagonal or uniformly anti-diagonal. This is the
/// condition under which every A_k kron A_j is itself diagonal or
/// anti-diagonal; a mixed family such as amplitude damping (one diagonal, one
/// anti-diagonal operator) fails it.
inline bool is_diag_or_antidiag(const KrausChannel &ch) {
    bool all_diagonal = true;
    bool all_antidiagonal = true;
    for (const auto &a : ch.ops()) {
        all_diagonal = all_diagonal && is_diagonal(a);
        all_antidiagonal = all_antidiagonal && is_antidiagonal(a);
    }
    return all_diagonal || all_antidiagonal;
}

// ---------------------------------------------------------------------------
// Strategies.

enum class StrategyKind { Sequential, ClassicalParallel, EntangledParallel, GeneralizedEntangled };

inline std::string_view to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::Sequential:
            return "sequential";
        case StrategyKind::ClassicalParallel:
            return "classical";
        case StrategyKind::EntangledParallel:
            return "entangled";
        case StrategyKind::GeneralizedEntangled:
            return "generalized";
    }
    return "unknown";
}

inline std::optional<StrategyKind> parse_strategy_kind(std::string_view s) {
    for (auto k : {StrategyKind::Sequential, StrategyKind::ClassicalParallel, StrategyKind::EntangledParallel,
                   StrategyKind::GeneralizedEntangled}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

struct StrategySpec {
    StrategyKind kind = StrategyKind::EntangledParallel;
    std::size_t n_probes = 1;
    Generator generator = Generator::qubit();
    double lambda = 0.0;
    /// Only for GeneralizedEntangled: the black box is W e^{i phi H} V.
    std::optional<ComplexMatrix> w;
    std::optional<ComplexMatrix> v;

    void validate() const {
        if (n_probes == 0) {
            throw std::invalid_argument("StrategySpec: n_probes must be at least 1");
        }
        const bool generalized = kind == StrategyKind::GeneralizedEntangled;
        if (generalized ? !(w && v) : (w || v)) {
            throw std::invalid_argument("StrategySpec: W and V are required exactly for the generalized strategy");
        }
        if (generalized) {
            for (const auto *m : {&*w, &*v}) {
                if (m->rows() != generator.dim() || !is_unitary(*m)) {
                    throw std::invalid_argument("StrategySpec: W and V must be unitaries on the probe space");
                }
            }
        }
    }

    static StrategySpec make(StrategyKind kind, std::size_t n, Generator h = Generator::qubit(), double lambda = 0.0) {
        StrategySpec s{kind, n, std::move(h), lambda, std::nullopt, std::nullopt};
        if (kind == StrategyKind::GeneralizedEntangled) {
            s.w = ComplexMatrix::identity(s.generator.dim());
            s.v = ComplexMatrix::identity(s.generator.dim());
        }
        s.validate();
        return s;
    }

    static StrategySpec generalized(std::size_t n, ComplexMatrix w, ComplexMatrix v, Generator h = Generator::qubit()) {
        StrategySpec s{StrategyKind::GeneralizedEntangled, n, std::move(h), 0.0, std::move(w), std::move(v)};
        s.validate();
        return s;
    }
};

}  // namespace metroq
