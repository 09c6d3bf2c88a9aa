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
 * Fisher information and Cramer-Rao bounds for the estimation strategies,
 * and the frequency-estimation bound under dephasing.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>

#include "metroq/linalg.hpp"
#include "metroq/states.hpp"

namespace metroq {

/// Quantum Fisher information of the pure-state family e^{i phi H} psi: 4 Var_psi(H).
inline double qfi_pure(const ComplexVector &psi, const Generator &h_total) {
    if (psi.dim() != h_total.dim()) {
        throw std::invalid_argument("qfi_pure: state and generator dimensions differ");
    }
    if (std::abs(psi.norm() - 1.0) > kPredicateTol) {
        throw std::invalid_argument("qfi_pure: state must be normalized");
    }
    double m1 = 0.0;
    double m2 = 0.0;
    const auto &ev = h_total.eigenvalues();
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        const double w = std::norm(psi[i]);
        m1 += w * ev[i];
        m2 += w * ev[i] * ev[i];
    }
    return 4.0 * std::max(0.0, m2 - m1 * m1);
}

/// Below this, p or 1-p of the binary measurement counts as degenerate.
inline constexpr double kDegenerateProbability = 1e-14;

/// Classical Fisher information of a two-outcome distribution (p, 1-p) given
/// p, 1-p and dp/dphi; q is passed separately so that 1-p keeps full relative
/// precision near p = 1.
inline double binary_fisher(double p, double q, double dp) {
    if (p < kDegenerateProbability || q < kDegenerateProbability) {
        throw std::domain_error("binary_fisher: outcome probability is 0 or 1");
    }
    return dp * dp / (p * q);
}

/// Fisher information of the coincidence measurement p(phi) = cos^2(n phi / 2).
inline double cfi_binary(std::size_t n, double phi) {
    if (n == 0) {
        throw std::invalid_argument("cfi_binary: n must be positive");
    }
    const double x = static_cast<double>(n) * phi;
    const double c = std::cos(x / 2.0);
    const double s = std::sin(x / 2.0);
    const double dp = -0.5 * static_cast<double>(n) * std::sin(x);
    return binary_fisher(c * c, s * s, dp);
}

/// Fisher information of a general discrete outcome distribution.
inline double classical_fisher(std::span<const double> probs, std::span<const double> dprobs) {
    if (probs.size() != dprobs.size()) {
        throw std::invalid_argument("classical_fisher: size mismatch");
    }
    double f = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > kZeroProbability) {
            f += dprobs[i] * dprobs[i] / probs[i];
        }
    }
    return f;
}

/// N unentangled probes, each read out independently: additive Fisher information.
inline double classical_parallel_fisher(std::size_t n, double phi) {
    return static_cast<double>(n) * cfi_binary(1, phi);
}

struct PrecisionBound {
    StrategyKind strategy;
    std::size_t n = 1;
    std::size_t nu = 1;
    /// Per-repetition Fisher information.
    double fisher_info = 0.0;
    /// 1 / sqrt(nu * fisher_info)
    double bound = 0.0;
};

/// Per-repetition quantum Fisher information of the optimal probe state for a strategy.
inline double strategy_fisher(const StrategySpec &s) {
    s.validate();
    const Generator &h = s.generator;
    switch (s.kind) {
        case StrategyKind::Sequential:
            // One probe, N applications: the family is generated by N*H.
            return qfi_pure(probe_state(h, +1, s.lambda), h.scaled(static_cast<double>(s.n_probes)));
        case StrategyKind::ClassicalParallel:
            return qfi_pure(product_state(probe_state(h, +1), s.n_probes), h.total(s.n_probes));
        case StrategyKind::EntangledParallel:
        case StrategyKind::GeneralizedEntangled:
            return qfi_pure(ghz_state(h, s.n_probes, s.lambda), h.total(s.n_probes));
    }
    throw std::logic_error("strategy_fisher: unknown strategy");
}

inline PrecisionBound crb(const StrategySpec &s, std::size_t nu) {
    if (nu == 0) {
        throw std::invalid_argument("crb: nu must be positive");
    }
    PrecisionBound b;
    b.strategy = s.kind;
    b.n = s.n_probes;
    b.nu = nu;
    b.fisher_info = strategy_fisher(s);
    if (!(b.fisher_info > 0.0)) {
        throw std::domain_error("crb: strategy carries no information");
    }
    b.bound = 1.0 / std::sqrt(static_cast<double>(nu) * b.fisher_info);
    return b;
}

// ---------------------------------------------------------------------------
// Dephasing: frequency versus phase estimation.

/// Frequency bound e^{n gamma t} / (n t sqrt(nu)) for n entangled probes
/// interrogated for time t under dephasing rate gamma. The same formula
/// describes one probe run sequentially for n t.
inline double frequency_bound_dephasing(std::size_t n, double gamma, double t, std::size_t nu) {
    if (n == 0 || nu == 0 || !(gamma > 0.0) || !(t > 0.0)) {
        throw std::invalid_argument("frequency_bound_dephasing: all arguments must be positive");
    }
    const double nd = static_cast<double>(n);
    return std::exp(nd * gamma * t) / (nd * t * std::sqrt(static_cast<double>(nu)));
}

/// Phase bound at fixed interrogation time. Entangled: e^{n gamma t}/(n sqrt(nu));
/// unentangled: e^{gamma t}/sqrt(n nu).
inline double phase_bound_dephasing(std::size_t n, double gamma, double t, std::size_t nu, bool entangled) {
    if (n == 0 || nu == 0 || gamma < 0.0 || t < 0.0) {
        throw std::invalid_argument("phase_bound_dephasing: invalid arguments");
    }
    const double nd = static_cast<double>(n);
    const double sqrt_nu = std::sqrt(static_cast<double>(nu));
    if (entangled) {
        return std::exp(nd * gamma * t) / (nd * sqrt_nu);
    }
    return std::exp(gamma * t) / std::sqrt(nd * static_cast<double>(nu));
}

struct FrequencyOptimum {
    double t_star = 0.0;
    double bound_star = 0.0;
    std::size_t iterations = 0;
};

/// Minimizes frequency_bound_dephasing over t in (0, 10/(n gamma)] by golden-section search.
inline FrequencyOptimum optimal_frequency_bound(std::size_t n, double gamma, std::size_t nu, double rel_tol = 1e-9,
                                                std::size_t max_iterations = 500) {
    if (n == 0 || nu == 0 || !(gamma > 0.0)) {
        throw std::invalid_argument("optimal_frequency_bound: all arguments must be positive");
    }
    const double inv_phi = 1.0 / std::numbers::phi;
    auto f = [&](double t) { return frequency_bound_dephasing(n, gamma, t, nu); };
    double a = 0.0;
    double b = 10.0 / (static_cast<double>(n) * gamma);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    FrequencyOptimum out;
    for (; out.iterations < max_iterations; ++out.iterations) {
        if (b - a <= rel_tol * 0.5 * (a + b)) {
            out.t_star = 0.5 * (a + b);
            out.bound_star = f(out.t_star);
            return out;
        }
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    throw std::runtime_error("optimal_frequency_bound: golden-section search did not converge");
}

/// Ratio of sequential to parallel sampling time at equal precision.
inline double time_advantage(std::size_t n) { return static_cast<double>(n); }

}  // namespace metroq
