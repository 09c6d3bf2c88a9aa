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

#include "metroq/fock.hpp"

#include <numbers>

#include "gtest/gtest.h"

#include "test_util.hpp"

using namespace metroq;
using Modes = FockVector::Modes;

namespace {
// arg(b / a) wrapped to (-pi, pi]
double relative_phase(cplx a, cplx b) { return std::arg(b / a); }
}  // namespace

TEST(fock, n0_examples) {
    const FockVector s = evolve_single_mode(n0_state(3), 0.5);
    ASSERT_EQ(s.dim(), 4u);
    ASSERT_NEAR(std::abs(s[0]), std::sqrt(0.5), 1e-15);
    ASSERT_NEAR(relative_phase(s[0], s[3]), 1.5, 1e-15);
    ASSERT_EQ(s[1], cplx(0.0));
    ASSERT_EQ(max_abs_diff(evolve_single_mode(n0_state(3), 0.0).as_vector(), n0_state(3).as_vector()), 0.0);

    const ComplexVector ghz = evolve_parallel_entangled(Generator::qubit(), 0.5, 3);
    ASSERT_NEAR(relative_phase(ghz[0], ghz[7]), relative_phase(s[0], s[3]), 1e-15);
    ASSERT_THROW(n0_state(0), std::invalid_argument);
}

TEST(fock, noon_examples) {
    const FockVector s = evolve_two_mode(noon_state(2), 0.3);
    ASSERT_NEAR(std::abs(s[2] - std::polar(std::sqrt(0.5), 0.6)), 0.0, 1e-15);
    ASSERT_NEAR(std::abs(s[0] - std::polar(std::sqrt(0.5), -0.6)), 0.0, 1e-15);
    ASSERT_NEAR(relative_phase(s[0], s[2]), 1.2, 1e-15);
    ASSERT_EQ(max_abs_diff(evolve_two_mode(noon_state(5), 0.0).as_vector(), noon_state(5).as_vector()), 0.0);
    ASSERT_THROW(evolve_two_mode(n0_state(2), 0.1), std::invalid_argument);
    ASSERT_THROW(evolve_single_mode(noon_state(2), 0.1), std::invalid_argument);
    ASSERT_THROW(FockVector(Modes::Two, 2, {1.0, 1.0, 0.0}), std::invalid_argument);
    ASSERT_THROW(FockVector(Modes::Two, 2, {1.0, 0.0}), std::invalid_argument);
}

TEST(fock, noon_fringe_period) {
    for (std::size_t n = 1; n <= 12; ++n) {
        const double nd = static_cast<double>(n);
        const FockVector s = noon_state(n);
        for (int k = 0; k < 50; ++k) {
            const double phi = 0.07 * k;
            const double p = fock_coincidence(s, evolve_two_mode(s, phi));
            ASSERT_NEAR(p, std::pow(std::cos(nd * phi), 2), 1e-12);
            ASSERT_NEAR(p, fock_coincidence(s, evolve_two_mode(s, phi + std::numbers::pi / nd)), 1e-12);
        }
    }
}

TEST(fock, evolution_preserves_norm) {
    auto &rng = testutil::shared_rng();
    for (std::size_t n = 1; n <= 12; ++n) {
        const ComplexVector r = testutil::random_state(rng, n + 1);
        for (Modes m : {Modes::Single, Modes::Two}) {
            const FockVector s(m, n, {r.entries().begin(), r.entries().end()});
            const double phi = testutil::uniform(rng, -10, 10);
            const FockVector out = m == Modes::Single ? evolve_single_mode(s, phi) : evolve_two_mode(s, phi);
            ASSERT_NEAR(out.norm(), 1.0, 1e-12);
        }
    }
}

TEST(fock, symmetrization_map_examples) {
    const SymmetrizationMap one = symmetrization_map(1, Modes::Single);
    const auto table = one.table();
    ASSERT_EQ(table.size(), 2u);
    ASSERT_EQ(table[0], std::make_pair(std::size_t{0}, std::size_t{0}));
    ASSERT_EQ(table[1], std::make_pair(std::size_t{1}, std::size_t{1}));

    for (std::size_t n = 1; n <= 10; ++n) {
        for (Modes m : {Modes::Single, Modes::Two}) {
            const FockVector f = symmetrization_map(n, m).to_fock(ghz_state(n, 0.9));
            ASSERT_NEAR(std::abs(f[0]), std::sqrt(0.5), 1e-15);
            ASSERT_NEAR(relative_phase(f[0], f[n]), 0.9, 1e-14);
            ASSERT_LT(max_abs_diff(symmetrization_map(n, m).to_qubits(f), ghz_state(n, 0.9)), 1e-15);
        }
    }
    ASSERT_THROW(symmetrization_map(3, Modes::Single).to_fock(product_state(plus_state(), 3)), std::invalid_argument);
    ASSERT_THROW(symmetrization_map(3, Modes::Single).to_qubits(noon_state(3)), std::invalid_argument);
    ASSERT_THROW(symmetrization_map(0, Modes::Two), std::invalid_argument);
}

TEST(fock, symmetrization_map_is_isometry) {
    auto &rng = testutil::shared_rng();
    for (std::size_t n = 1; n <= 8; ++n) {
        const SymmetrizationMap map(n, Modes::Two);
        std::vector<ComplexVector> qubits;
        for (int i = 0; i < 6; ++i) {
            const ComplexVector c = testutil::random_state(rng, 2);
            ComplexVector q(std::size_t{1} << n);
            q[0] = c[0];
            q[q.dim() - 1] = c[1];
            qubits.push_back(q);
        }
        for (const auto &a : qubits) {
            for (const auto &b : qubits) {
                const cplx gq = inner(a, b);
                const cplx gf = inner(map.to_fock(a).as_vector(), map.to_fock(b).as_vector());
                ASSERT_LT(std::abs(gq - gf), 1e-12);
            }
        }
    }
}

TEST(fock, fringe_equivalences) {
    ASSERT_LT(noon_equivalence_certificate(1), 1e-15);
    ASSERT_LT(noon_equivalence_certificate(4), 1e-12);
    for (std::size_t n = 1; n <= 12; ++n) {
        ASSERT_LT(n0_equivalence_certificate(n), 1e-12) << n;
        ASSERT_LT(noon_equivalence_certificate(n), 1e-12) << n;
        ASSERT_LT(noon_multipass_deviation(n), 1e-12) << n;
    }
}

TEST(fock, noon_fringe_zeros) {
    for (std::size_t n = 1; n <= 12; ++n) {
        const std::vector<double> zeros = noon_fringe_zeros(n);
        ASSERT_EQ(zeros.size(), n);
        for (std::size_t k = 0; k < n; ++k) {
            const double expected = std::numbers::pi * (2.0 * static_cast<double>(k) + 1.0) / (2.0 * static_cast<double>(n));
            ASSERT_NEAR(zeros[k], expected, 1e-9);
        }
    }
}
