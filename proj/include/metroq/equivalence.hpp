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
 * Parallel-to-sequential conversion of entangled estimation strategies.
 *
 * An N-probe register prepared in (|0>^N + e^{i lambda}|1>^N)/sqrt(2) and
 * sampled by U_1 x ... x U_N is measured probe by probe (probes 2..N) in the
 * |+>,|-> basis. Every branch leaves probe 1 in U_1 U_2 ... U_N |+/->, i.e.
 * the state a single probe reaches after passing through all N boxes in
 * sequence. The functions here run that cascade explicitly and report how
 * closely each branch matches the sequential reference.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "metroq/information.hpp"
#include "metroq/linalg.hpp"
#include "metroq/states.hpp"
#include "metroq/strategy.hpp"

namespace metroq {

struct BranchRecord {
    /// Outcomes of probes 2..N, one '+' or '-' each.
    std::string outcome;
    double probability = 0.0;
    /// Fidelity of the conditional probe-1 state with the sequential reference.
    double fidelity = 0.0;
};

struct ConversionCertificate {
    std::size_t n_probes = 0;
    std::vector<BranchRecord> branches;
    double min_fidelity = 1.0;
    /// max |probability - 2^{-(N-1)}| over branches.
    double max_prob_error = 0.0;
    /// |sum of probabilities - 1|
    double total_prob_error = 0.0;

    bool passed(double fidelity_tol = kIdentityTol, double prob_tol = kPredicateTol) const {
        return 1.0 - min_fidelity < fidelity_tol && max_prob_error < prob_tol && total_prob_error < prob_tol;
    }
};

namespace detail {

/// Measures probes n-1, n-2, ..., 1 of an n-qubit register in the +/- basis
/// (exhaustively, all branches) and compares the probe-0 remainder with
/// reference(sign), sign = (-1)^{number of '-' outcomes}.
template <typename Reference>
ConversionCertificate measure_cascade(const ComplexVector &state, std::size_t n, std::size_t local_dim,
                                      const ComplexVector &plus, const ComplexVector &minus, Reference &&reference) {
    ConversionCertificate cert;
    cert.n_probes = n;
    const double expected = std::ldexp(1.0, -static_cast<int>(n - 1));
    const ComplexVector ref_plus = reference(+1);
    const ComplexVector ref_minus = reference(-1);

    struct Node {
        ComplexVector state;
        std::size_t probes;
        double probability;
        std::string outcome;  // outcomes for probes probes..n-1 (filled from the back)
    };
    std::vector<Node> stack;
    stack.push_back({state, n, 1.0, std::string()});
    double total = 0.0;
    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        if (node.probes == 1) {
            BranchRecord rec;
            rec.outcome = node.outcome;
            rec.probability = node.probability;
            const auto minus_count = std::count(node.outcome.begin(), node.outcome.end(), '-');
            rec.fidelity = fidelity_up_to_phase(node.state, minus_count % 2 == 0 ? ref_plus : ref_minus);
            cert.min_fidelity = std::min(cert.min_fidelity, rec.fidelity);
            cert.max_prob_error = std::max(cert.max_prob_error, std::abs(rec.probability - expected));
            total += rec.probability;
            cert.branches.push_back(std::move(rec));
            continue;
        }
        const std::vector<std::size_t> dims(node.probes, local_dim);
        // Push '-' first so '+' branches are emitted first.
        for (const auto &[symbol, onto] : {std::pair{'-', &minus}, std::pair{'+', &plus}}) {
            Projection p = project_subsystem(node.state, dims, node.probes - 1, *onto);
            const double joint = node.probability * p.probability;
            if (!p.defined()) {
                // Impossible branch: record it so the certificate shows the gap.
                BranchRecord rec;
                rec.outcome = std::string(1, symbol) + node.outcome;
                rec.outcome.insert(0, node.probes - 2, '?');
                rec.probability = 0.0;
                rec.fidelity = 0.0;
                cert.min_fidelity = 0.0;
                cert.max_prob_error = std::max(cert.max_prob_error, expected);
                cert.branches.push_back(std::move(rec));
                continue;
            }
            stack.push_back({std::move(*p.conditional), node.probes - 1, joint, symbol + node.outcome});
        }
    }
    cert.total_prob_error = std::abs(total - 1.0);
    return cert;
}

inline void require_qubit(const Generator &h, const char *what) {
    if (h.dim() != 2) {
        throw std::invalid_argument(std::string(what) + ": a two-level generator is required");
    }
}

}  // namespace detail

/// N = 2 through the vectorization identity: (U kron U') vec(I)/sqrt(2), probe 2
/// measured in +/-, compared with U U' |+/->.
inline ConversionCertificate convert_n2(const Generator &h, double phi, double phi_prime) {
    detail::require_qubit(h, "convert_n2");
    const ComplexVector entangled = vec(ComplexMatrix::identity(2)).normalized();
    const ComplexMatrix u = u_phi(h, phi);
    const ComplexMatrix u_prime = u_phi(h, phi_prime);
    const ComplexVector evolved = kron(u, u_prime) * entangled;
    const ComplexMatrix sequential = u * u_prime;
    // |00> + |11> = |++> + |--> only for the computational +/- pair.
    const ComplexVector plus = ComplexVector{1.0, 1.0}.normalized();
    const ComplexVector minus = ComplexVector{1.0, -1.0}.normalized();
    return detail::measure_cascade(evolved, 2, 2, plus, minus,
                                   [&](int sign) { return sequential * (sign > 0 ? plus : minus); });
}

/// Arbitrary N: U_{phi_1} x ... x U_{phi_N} on the N-probe GHZ state, probes
/// 2..N measured in +/-, compared with e^{i (sum phi) H}(|0> +/- e^{i lambda}|1>)/sqrt(2).
inline ConversionCertificate convert_general_n(const Generator &h, std::span<const double> phis, double lambda = 0.0) {
    detail::require_qubit(h, "convert_general_n");
    const std::size_t n = phis.size();
    if (n < 2) {
        throw std::invalid_argument("convert_general_n: need at least two probes");
    }
    ComplexVector state = ghz_state(h, n, lambda);
    const std::vector<std::size_t> dims(n, 2);
    for (std::size_t k = 0; k < n; ++k) {
        state = apply_local(state, dims, k, u_phi(h, phis[k]));
    }
    double total_phase = 0.0;
    for (double p : phis) {
        total_phase += p;
    }
    const ComplexMatrix u_total = u_phi(h, total_phase);
    return detail::measure_cascade(state, n, 2, probe_state(h, +1), probe_state(h, -1),
                                   [&](int sign) { return u_total * probe_state(h, sign, lambda); });
}

inline ConversionCertificate convert_general_n(const Generator &h, std::initializer_list<double> phis,
                                               double lambda = 0.0) {
    return convert_general_n(h, std::span<const double>(phis.begin(), phis.size()), lambda);
}

/// Restriction of U_a kron U_b to span{|00>, |11>}.
inline ComplexMatrix restrict_to_correlated_subspace(const ComplexMatrix &two_probe_op) {
    if (two_probe_op.rows() != 4 || two_probe_op.cols() != 4) {
        throw std::invalid_argument("restrict_to_correlated_subspace: expected a 4x4 operator");
    }
    return ComplexMatrix{{two_probe_op(0, 0), two_probe_op(0, 3)}, {two_probe_op(3, 0), two_probe_op(3, 3)}};
}

/// Leakage of span{|00>, |11>} under a 4x4 operator: max |entry| coupling the
/// subspace to |01>, |10>.
inline double correlated_subspace_leakage(const ComplexMatrix &op) {
    double m = 0.0;
    for (std::size_t r : {1u, 2u}) {
        for (std::size_t c : {0u, 3u}) {
            m = std::max({m, std::abs(op(r, c)), std::abs(op(c, r))});
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Classically correlated probes.

struct CounterexampleResult {
    /// Probe-1 state averaged over the probe-2 outcome.
    ComplexMatrix averaged;
    /// Trace distance between `averaged` at phi and at phi = 0.
    double phi_dependence = 0.0;
    /// Trace distance between `averaged` and I/2.
    double deviation_from_mixed = 0.0;
};

namespace detail {
inline ComplexMatrix averaged_probe_one(CorrelationBasis basis, double phi) {
    const Generator h = Generator::qubit();
    const ComplexMatrix u2 = kron(u_phi(h, phi), u_phi(h, phi));
    const ComplexMatrix rho = u2 * classical_corr_state(basis) * u2.adjoint();
    const std::vector<std::size_t> dims{2, 2};
    ComplexMatrix avg(2, 2);
    for (const auto &onto : {plus_state(), minus_state()}) {
        const MixedProjection p = project_subsystem(rho, dims, 1, onto);
        if (p.conditional) {
            avg += p.probability * *p.conditional;
        }
    }
    return hermitize(avg);
}
}  // namespace detail

inline CounterexampleResult counterexample(CorrelationBasis basis, double phi) {
    CounterexampleResult out{detail::averaged_probe_one(basis, phi), 0.0, 0.0};
    out.phi_dependence = trace_distance(out.averaged, detail::averaged_probe_one(basis, 0.0));
    out.deviation_from_mixed = trace_distance(out.averaged, 0.5 * ComplexMatrix::identity(2));
    return out;
}

/// Fisher information about phi when the measurement records are kept: which
/// correlated pair was prepared and both probes' +/- outcomes.
inline double unaveraged_counterexample_fisher(CorrelationBasis basis, double phi) {
    const Generator h = Generator::qubit();
    const ComplexMatrix u = u_phi(h, phi);
    const ComplexMatrix u2 = kron(u, u);
    // d/dphi (U kron U) = i (H kron I + I kron H)(U kron U)
    const ComplexMatrix h_total = Generator::qubit().total(2).matrix();
    const ComplexMatrix du2 = cplx{0.0, 1.0} * h_total * u2;
    std::vector<double> probs, dprobs;
    for (const auto &comp : classical_corr_components(basis)) {
        const ComplexVector psi = u2 * comp.state;
        const ComplexVector dpsi = du2 * comp.state;
        for (const auto &a : {plus_state(), minus_state()}) {
            for (const auto &b : {plus_state(), minus_state()}) {
                const ComplexVector ab = kron(a, b);
                const cplx amp = inner(ab, psi);
                const cplx damp = inner(ab, dpsi);
                probs.push_back(comp.weight * std::norm(amp));
                dprobs.push_back(comp.weight * 2.0 * std::real(std::conj(amp) * damp));
            }
        }
    }
    return classical_fisher(probs, dprobs);
}

/// Fisher information of a +/- measurement on the averaged probe-1 state.
inline double averaged_counterexample_fisher(CorrelationBasis basis, double phi) {
    const Generator h = Generator::qubit();
    const ComplexMatrix u2 = kron(u_phi(h, phi), u_phi(h, phi));
    const ComplexMatrix rho = u2 * classical_corr_state(basis) * u2.adjoint();
    const ComplexMatrix h_total = h.total(2).matrix();
    // d rho / d phi = i [H_total, rho]
    const ComplexMatrix drho = cplx{0.0, 1.0} * (h_total * rho - rho * h_total);
    const std::vector<std::size_t> dims{2, 2};
    const std::vector<std::size_t> keep{0};
    const ComplexMatrix avg = detail::partial_trace_unchecked(rho, dims, keep);
    const ComplexMatrix davg = detail::partial_trace_unchecked(drho, dims, keep);
    std::vector<double> probs, dprobs;
    for (const auto &a : {plus_state(), minus_state()}) {
        probs.push_back(inner(a, avg * a).real());
        dprobs.push_back(inner(a, davg * a).real());
    }
    return classical_fisher(probs, dprobs);
}

// ---------------------------------------------------------------------------
// Noise.

struct EffectiveChannel {
    /// {A_k B_j^T} acting on probe 1 alone.
    KrausChannel channel;
    bool trace_preserving = false;
    /// max-abs residual between the two sides of the two-probe noise identity.
    double identity_residual = 0.0;
};

/// Moves probe-2 noise B onto probe 1: sum (A kron B)|I><I|(A kron B)^dagger ==
/// sum (A B^T kron I)|I><I|(A B^T kron I)^dagger. Trace preserving iff B is unital.
inline EffectiveChannel effective_sequential_channel(const KrausChannel &cha, const KrausChannel &chb) {
    if (cha.dim() != chb.dim()) {
        throw std::invalid_argument("effective_sequential_channel: channel dimensions differ");
    }
    const std::size_t d = cha.dim();
    const ComplexVector omega = vec(ComplexMatrix::identity(d)).normalized();
    const ComplexMatrix omega_proj = ComplexMatrix::projector(omega);
    const ComplexMatrix id = ComplexMatrix::identity(d);
    ComplexMatrix lhs(d * d, d * d);
    ComplexMatrix rhs(d * d, d * d);
    std::vector<ComplexMatrix> kraus;
    for (const auto &a : cha.ops()) {
        for (const auto &b : chb.ops()) {
            const ComplexMatrix ab = kron(a, b);
            lhs += ab * omega_proj * ab.adjoint();
            ComplexMatrix k = a * b.transpose();
            const ComplexMatrix kk = kron(k, id);
            rhs += kk * omega_proj * kk.adjoint();
            kraus.push_back(std::move(k));
        }
    }
    EffectiveChannel out{KrausChannel::family(std::move(kraus)), false, max_abs_diff(lhs, rhs)};
    out.trace_preserving = out.channel.is_trace_preserving();
    return out;
}

/// Every A_k kron B_j diagonal or anti-diagonal, so span{|00>, |11>} stays
/// invariant and the N-probe induction carries through.
inline bool noisy_conversion_valid_beyond_n2(const KrausChannel &cha, const KrausChannel &chb) {
    if (cha.dim() != 2 || chb.dim() != 2) {
        throw std::invalid_argument("noisy_conversion_valid_beyond_n2: qubit channels required");
    }
    for (const auto &a : cha.ops()) {
        for (const auto &b : chb.ops()) {
            const ComplexMatrix ab = kron(a, b);
            if (!is_diagonal(ab) && !is_antidiagonal(ab)) {
                return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Which two-probe entangled states are useful.

struct UsefulnessVerdict {
    bool is_useful = false;
    /// Relative phase of the sequential probe state, in (-pi, pi].
    std::optional<double> lambda_hat;
};

/// Accepts |E> iff e^{i phi H} E e^{i phi H}|+/-> == e^{2 i phi H}(|0> +/- e^{i lambda}|1>)
/// up to normalization and global phase for one phi-independent lambda, checked
/// on a 50-point phi grid.
inline UsefulnessVerdict useful_entanglement_check(const ComplexMatrix &e, const Generator &h,
                                                   double tol = kPredicateTol) {
    if (e.rows() != 2 || e.cols() != 2) {
        throw std::invalid_argument("useful_entanglement_check: E must be 2x2");
    }
    detail::require_qubit(h, "useful_entanglement_check");
    const double smax = singular_values(e).front();
    if (!(smax > 0.0)) {
        return {};
    }
    const ComplexMatrix en = cplx{1.0 / smax, 0.0} * e;
    const std::size_t lo = h.min_index();
    const std::size_t hi = h.max_index();

    std::optional<double> lambda;
    constexpr std::size_t kGrid = 50;
    for (std::size_t g = 0; g < kGrid; ++g) {
        const double phi = 0.05 + 2.0 * std::numbers::pi * static_cast<double>(g) / kGrid;
        const ComplexMatrix uh = u_phi(h, phi);
        const ComplexMatrix undo = u_phi(h, -2.0 * phi);
        for (int sign : {+1, -1}) {
            // Strip the expected e^{2 i phi H} and read off the remaining probe state.
            const ComplexVector w = undo * (uh * en * uh * probe_state(h, sign));
            const double a0 = std::abs(w[lo]);
            const double a1 = std::abs(w[hi]);
            if (a0 < tol || std::abs(a0 - a1) > tol) {
                return {};
            }
            const double lam = std::arg(static_cast<double>(sign) * w[hi] / w[lo]);
            if (!lambda) {
                lambda = lam;
            } else if (std::abs(std::polar(1.0, lam) - std::polar(1.0, *lambda)) > tol) {
                return {};
            }
            if (fidelity_up_to_phase(w, probe_state(h, sign, *lambda)) < 1.0 - tol) {
                return {};
            }
        }
    }
    return {true, lambda};
}

// ---------------------------------------------------------------------------
// Generalized black box W e^{i phi H} V.

/// (W^dagger U' V^dagger)^{x n} on the n-probe GHZ state, probes 2..n measured
/// in +/-, compared with (W^dagger U' V^dagger)^n |+/->.
inline ConversionCertificate generalized_strategy_certificate(const ComplexMatrix &w, const ComplexMatrix &v,
                                                              const Generator &h, double phi, std::size_t n) {
    detail::require_qubit(h, "generalized_strategy_certificate");
    if (n == 0) {
        throw std::invalid_argument("generalized_strategy_certificate: n must be positive");
    }
    const ComplexMatrix box = generalized_box(w, v, h, phi);
    const ComplexVector state = apply_each(ghz_state(h, n), n, box);
    const ComplexMatrix sequential = matrix_power(box, n);
    return detail::measure_cascade(state, n, 2, probe_state(h, +1), probe_state(h, -1),
                                   [&](int sign) { return sequential * probe_state(h, sign); });
}

/// Fidelity between (W e^{i phi H} V)^n |+> and e^{i n phi H}|+>: how well naive
/// iteration of the uncorrected box reproduces the accumulated phase.
inline double naive_iteration_fidelity(const ComplexMatrix &w, const ComplexMatrix &v, const Generator &h, double phi,
                                       std::size_t n) {
    const ComplexMatrix box = w * u_phi(h, phi) * v;
    const ComplexVector plus = probe_state(h, +1);
    return fidelity_up_to_phase(matrix_power(box, n) * plus, u_phi(h, static_cast<double>(n) * phi) * plus);
}

}  // namespace metroq
