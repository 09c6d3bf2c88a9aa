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
 * Bosonic probes in the occupation-number basis: single-mode N0 states and
 * two-mode NOON states, and their identification with qubit GHZ states.
 *
 * Single-mode vectors are indexed by photon number 0..N. Two-mode vectors
 * live in the fixed-total subspace n_a + n_b = N and are indexed by n_a, so
 * index k is |k, N-k>.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "metroq/linalg.hpp"
#include "metroq/states.hpp"
#include "metroq/strategy.hpp"

namespace metroq {

class FockVector {
   public:
    enum class Modes { Single = 1, Two = 2 };

    FockVector(Modes modes, std::size_t photons, std::vector<cplx> amplitudes)
        : modes_(modes), photons_(photons), amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.size() != photons_ + 1) {
            throw std::invalid_argument("FockVector: expected photons + 1 amplitudes");
        }
        if (std::abs(norm() - 1.0) > kIdentityTol) {
            throw std::invalid_argument("FockVector: state is not normalized");
        }
    }

    Modes modes() const { return modes_; }
    /// Cutoff (single mode) or total photon number (two modes).
    std::size_t photons() const { return photons_; }
    std::size_t dim() const { return amplitudes_.size(); }
    cplx &operator[](std::size_t k) { return amplitudes_[k]; }
    const cplx &operator[](std::size_t k) const { return amplitudes_[k]; }

    ComplexVector as_vector() const { return ComplexVector(amplitudes_); }

    double norm() const {
        double s = 0.0;
        for (const auto &a : amplitudes_) {
            s += std::norm(a);
        }
        return std::sqrt(s);
    }

   private:
    Modes modes_;
    std::size_t photons_;
    std::vector<cplx> amplitudes_;
};

/// (|0 photons> + |n photons>)/sqrt(2), cutoff n.
inline FockVector n0_state(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("n0_state: n must be positive");
    }
    std::vector<cplx> amp(n + 1);
    amp[0] = std::numbers::sqrt2 / 2.0;
    amp[n] = std::numbers::sqrt2 / 2.0;
    return FockVector(FockVector::Modes::Single, n, std::move(amp));
}

/// e^{i phi a^dagger a}
inline FockVector evolve_single_mode(const FockVector &state, double phi) {
    if (state.modes() != FockVector::Modes::Single) {
        throw std::invalid_argument("evolve_single_mode: single-mode state required");
    }
    FockVector out = state;
    for (std::size_t k = 0; k < out.dim(); ++k) {
        out[k] *= std::polar(1.0, static_cast<double>(k) * phi);
    }
    return out;
}

/// (|n, 0> + |0, n>)/sqrt(2)
inline FockVector noon_state(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("noon_state: n must be positive");
    }
    std::vector<cplx> amp(n + 1);
    amp[n] = std::numbers::sqrt2 / 2.0;  // |n, 0>
    amp[0] = std::numbers::sqrt2 / 2.0;  // |0, n>
    return FockVector(FockVector::Modes::Two, n, std::move(amp));
}

/// e^{i phi (a^dagger a - b^dagger b)}: |k, n-k> picks up e^{i (2k - n) phi}.
inline FockVector evolve_two_mode(const FockVector &state, double phi) {
    if (state.modes() != FockVector::Modes::Two) {
        throw std::invalid_argument("evolve_two_mode: two-mode state required");
    }
    FockVector out = state;
    const double n = static_cast<double>(state.photons());
    for (std::size_t k = 0; k < out.dim(); ++k) {
        out[k] *= std::polar(1.0, (2.0 * static_cast<double>(k) - n) * phi);
    }
    return out;
}

inline double fock_coincidence(const FockVector &initial, const FockVector &evolved) {
    return coincidence_probability(evolved.as_vector(), initial.as_vector());
}

/// <NOON| e^{i phi (a^dagger a - b^dagger b)} |NOON> = cos(n phi); real, so its
/// sign changes bracket the fringe zeros.
inline double noon_overlap_amplitude(std::size_t n, double phi) {
    const FockVector s = noon_state(n);
    return inner(s.as_vector(), evolve_two_mode(s, phi).as_vector()).real();
}

// ---------------------------------------------------------------------------
// Symmetrization.

/// Identification of the extremal qubit product states |0>^n, |1>^n with Fock
/// states: |0 photons>, |n photons> for one mode; |0, n>, |n, 0> for two modes
/// (the min and max eigenstates of a^dagger a - b^dagger b). Each mode is
/// symmetrized separately.
class SymmetrizationMap {
   public:
    SymmetrizationMap(std::size_t n, FockVector::Modes modes) : n_(n), modes_(modes) {
        if (n == 0) {
            throw std::invalid_argument("SymmetrizationMap: n must be positive");
        }
    }

    std::size_t probes() const { return n_; }
    FockVector::Modes modes() const { return modes_; }

    /// (qubit register index, Fock index) pairs; the qubit side has 2^n levels.
    std::vector<std::pair<std::size_t, std::size_t>> table() const {
        // Fock index 0 is |0 photons> (one mode) or |0, n> (two modes); index n
        // is |n photons> or |n, 0>.
        const std::size_t all_ones = (std::size_t{1} << n_) - 1;
        return {{0, 0}, {all_ones, n_}};
    }

    /// Maps the span{|0>^n, |1>^n} component of a qubit register into Fock space.
    /// Rejects states with weight outside that span.
    FockVector to_fock(const ComplexVector &qubits) const {
        if (qubits.dim() != (std::size_t{1} << n_)) {
            throw std::invalid_argument("SymmetrizationMap::to_fock: register dimension is not 2^n");
        }
        std::vector<cplx> amp(n_ + 1);
        double mapped = 0.0;
        for (const auto &[q, f] : table()) {
            amp[f] = qubits[q];
            mapped += std::norm(qubits[q]);
        }
        if (std::abs(mapped - 1.0) > kPredicateTol) {
            throw std::invalid_argument("SymmetrizationMap::to_fock: state is not a normalized state of the extremal subspace");
        }
        return FockVector(modes_, n_, std::move(amp));
    }

    ComplexVector to_qubits(const FockVector &fock) const {
        if (fock.modes() != modes_ || fock.photons() != n_) {
            throw std::invalid_argument("SymmetrizationMap::to_qubits: Fock space does not match the map");
        }
        ComplexVector out(std::size_t{1} << n_);
        double mapped = 0.0;
        for (const auto &[q, f] : table()) {
            out[q] = fock[f];
            mapped += std::norm(fock[f]);
        }
        if (std::abs(mapped - 1.0) > kPredicateTol) {
            throw std::invalid_argument("SymmetrizationMap::to_qubits: state has weight outside the mapped states");
        }
        return out;
    }

   private:
    std::size_t n_;
    FockVector::Modes modes_;
};

inline SymmetrizationMap symmetrization_map(std::size_t n, FockVector::Modes modes) {
    return SymmetrizationMap(n, modes);
}

// ---------------------------------------------------------------------------
// Fringe comparisons against the qubit model on phi_k = pi k / 99, k = 0..99.

inline constexpr std::size_t kFringeGrid = 100;

inline double fringe_grid_point(std::size_t k) {
    return std::numbers::pi * static_cast<double>(k) / static_cast<double>(kFringeGrid - 1);
}

/// max |N0 fringe(phi) - GHZ fringe(phi)|
inline double n0_equivalence_certificate(std::size_t n) {
    const FockVector s = n0_state(n);
    const ComplexVector ghz = ghz_state(n);
    const Generator h = Generator::qubit();
    double worst = 0.0;
    for (std::size_t k = 0; k < kFringeGrid; ++k) {
        const double phi = fringe_grid_point(k);
        const double fock = fock_coincidence(s, evolve_single_mode(s, phi));
        const double qubit = coincidence_probability(evolve_parallel_entangled(h, phi, n), ghz);
        worst = std::max(worst, std::abs(fock - qubit));
    }
    return worst;
}

/// max |NOON fringe(phi) - GHZ fringe(2 phi)|; the two-mode generator has
/// eigenvalue gap 2n on the NOON pair versus n for the qubit register.
inline double noon_equivalence_certificate(std::size_t n) {
    const FockVector s = noon_state(n);
    const ComplexVector ghz = ghz_state(n);
    const Generator h = Generator::qubit();
    double worst = 0.0;
    for (std::size_t k = 0; k < kFringeGrid; ++k) {
        const double phi = fringe_grid_point(k);
        const double fock = fock_coincidence(s, evolve_two_mode(s, phi));
        const double qubit = coincidence_probability(evolve_parallel_entangled(h, 2.0 * phi, n), ghz);
        worst = std::max(worst, std::abs(fock - qubit));
    }
    return worst;
}

/// max |NOON fringe(phi) - single-probe fringe after n passes at 2 phi|.
inline double noon_multipass_deviation(std::size_t n) {
    const FockVector s = noon_state(n);
    const Generator h = Generator::qubit();
    const ComplexVector plus = plus_state();
    double worst = 0.0;
    for (std::size_t k = 0; k < kFringeGrid; ++k) {
        const double phi = fringe_grid_point(k);
        const double fock = fock_coincidence(s, evolve_two_mode(s, phi));
        const double seq = coincidence_probability(evolve_sequential(h, 2.0 * phi, n, plus), plus);
        worst = std::max(worst, std::abs(fock - seq));
    }
    return worst;
}

/// Zeros of the NOON fringe in (0, pi), located by bisection on the overlap amplitude.
inline std::vector<double> noon_fringe_zeros(std::size_t n, double tol = 1e-12) {
    const std::size_t samples = 64 * n + 1;
    std::vector<double> zeros;
    auto f = [n](double phi) { return noon_overlap_amplitude(n, phi); };
    double a = 0.0;
    double fa = f(a);
    for (std::size_t i = 1; i < samples; ++i) {
        const double b = std::numbers::pi * static_cast<double>(i) / static_cast<double>(samples - 1);
        const double fb = f(b);
        if ((fa < 0.0) != (fb < 0.0)) {
            double lo = a, hi = b, flo = fa;
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            zeros.push_back(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    return zeros;
}

}  // namespace metroq
