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

// End-to-end acceptance run. One PASS/FAIL line per criterion; exit status is
// nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "metroq/equivalence.hpp"
#include "metroq/fock.hpp"
#include "metroq/information.hpp"
#include "metroq/strategy.hpp"
#include "test_util.hpp"

using namespace metroq;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            if (pass) detail << "failed: ";
            else detail << "; ";
            detail << what;
            pass = false;
        }
    }
};

struct Criterion {
    int id;
    const char *name;
    double time_limit_s;  // <= 0: no limit
    std::function<void(Outcome &)> run;
};

std::mt19937_64 rng_for(int id) { return std::mt19937_64(0x5eed0000u + static_cast<unsigned>(id)); }

void vectorization_identity(Outcome &out) {
    auto rng = rng_for(1);
    double worst = 0.0, worst_oracle = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 2 + static_cast<std::size_t>(trial % 7);
        const ComplexMatrix a = testutil::ginibre(rng, d, d);
        const ComplexMatrix b = testutil::ginibre(rng, d, d);
        const ComplexMatrix c = testutil::ginibre(rng, d, d);
        worst = std::max(worst, vec_identity_residual(a, b, c));
        worst_oracle = std::max(worst_oracle, max_abs_diff(kron(a, b) * vec(c), testutil::vec_identity_oracle(a, b, c)));
    }
    out.require(worst < 1e-12, "identity residual " + std::to_string(worst));
    out.require(worst_oracle < 1e-12, "oracle residual " + std::to_string(worst_oracle));
    out.detail << "200 triples, max residual " << worst;
}

void two_probe_conversion(Outcome &out) {
    auto rng = rng_for(2);
    const Generator h = Generator::qubit();
    double min_fid = 1.0, max_perr = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double a = testutil::uniform(rng, -std::numbers::pi, std::numbers::pi);
        const double b = testutil::uniform(rng, -std::numbers::pi, std::numbers::pi);
        const ConversionCertificate c = convert_n2(h, a, b);
        out.require(c.branches.size() == 2, "expected two branches");
        min_fid = std::min(min_fid, c.min_fidelity);
        for (const auto &br : c.branches) max_perr = std::max(max_perr, std::abs(br.probability - 0.5));
    }
    out.require(1.0 - min_fid < 1e-12, "fidelity");
    out.require(max_perr < 1e-12, "branch probability");
    out.detail << "100 pairs, 1-min_fidelity " << 1.0 - min_fid << ", max |p-1/2| " << max_perr;
}

void general_conversion(Outcome &out) {
    auto rng = rng_for(3);
    const Generator h = Generator::qubit();
    double min_fid = 1.0, max_perr = 0.0;
    std::size_t branches = 0;
    for (std::size_t n = 2; n <= 10; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> phis(n);
            for (auto &p : phis) p = testutil::uniform(rng, -std::numbers::pi, std::numbers::pi);
            const double lambda = testutil::uniform(rng, -std::numbers::pi, std::numbers::pi);
            const ConversionCertificate c = convert_general_n(h, phis, lambda);
            out.require(c.branches.size() == (std::size_t{1} << (n - 1)), "branch count");
            branches += c.branches.size();
            min_fid = std::min(min_fid, c.min_fidelity);
            max_perr = std::max({max_perr, c.max_prob_error, c.total_prob_error});
        }
    }
    out.require(1.0 - min_fid < 1e-12, "fidelity");
    out.require(max_perr < 1e-10, "branch probability");
    out.detail << branches << " branches, 1-min_fidelity " << 1.0 - min_fid << ", max prob error " << max_perr;
}

void counterexamples(Outcome &out) {
    double worst = 0.0;
    for (auto basis : {CorrelationBasis::Computational, CorrelationBasis::Hadamard}) {
        for (int k = 0; k < 50; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / 49.0;
            const CounterexampleResult r = counterexample(basis, phi);
            worst = std::max({worst, r.deviation_from_mixed, r.phi_dependence});
        }
    }
    out.require(worst < 1e-12, "averaged state differs from I/2");
    double fisher_gap = 0.0;
    for (int k = 1; k < 50; ++k) {
        const double phi = std::numbers::pi * k / 50.0;
        fisher_gap = std::max(fisher_gap, std::abs(unaveraged_counterexample_fisher(CorrelationBasis::Hadamard, phi) -
                                                   classical_parallel_fisher(2, phi)));
    }
    out.require(fisher_gap < 1e-9, "unaveraged Fisher information gap " + std::to_string(fisher_gap));
    out.detail << "max trace distance to I/2 " << worst << ", Fisher gap " << fisher_gap;
}

void noise_conversion(Outcome &out) {
    auto rng = rng_for(5);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const KrausChannel a = testutil::random_channel(rng, 2, 1 + trial % 4);
        const KrausChannel b = testutil::random_channel(rng, 2, 1 + (trial / 4) % 4);
        worst = std::max(worst, effective_sequential_channel(a, b).identity_residual);
    }
    out.require(worst < 1e-12, "identity residual");
    for (const auto &b : {dephasing(0.25), bit_phase_flip(0.3)}) {
        out.require(is_unital(b) && effective_sequential_channel(dephasing(0.1), b).trace_preserving,
                    "unital channel gave a non-trace-preserving effective channel");
    }
    const KrausChannel ad = amplitude_damping(0.3);
    out.require(!is_unital(ad) && !effective_sequential_channel(dephasing(0.1), ad).trace_preserving,
                "amplitude damping gave a trace-preserving effective channel");
    out.require(noisy_conversion_valid_beyond_n2(dephasing(0.2), dephasing(0.4)), "dephasing predicate");
    out.require(noisy_conversion_valid_beyond_n2(bit_phase_flip(0.2), bit_phase_flip(0.4)), "bit-phase-flip predicate");
    out.require(!noisy_conversion_valid_beyond_n2(dephasing(0.2), ad), "amplitude damping predicate");
    out.detail << "100 random pairs, max residual " << worst;
}

void fisher_bounds(Outcome &out) {
    const Generator h = Generator::qubit();
    double qfi_err = 0.0, cfi_err = 0.0, crb_err = 0.0;
    for (std::size_t n = 1; n <= 12; ++n) {
        const double nd = static_cast<double>(n);
        qfi_err = std::max(qfi_err, std::abs(qfi_pure(ghz_state(n, 0.7), h.total(n)) - nd * nd));
        qfi_err = std::max(qfi_err, std::abs(qfi_pure(product_state(plus_state(), n), h.total(n)) - nd));
        for (int k = 1; k < 100; ++k) {
            cfi_err = std::max(cfi_err, std::abs(cfi_binary(n, std::numbers::pi / nd * k / 100.0) - nd * nd));
        }
        for (std::size_t nu : {1u, 100u, 4000u}) {
            const double s = std::sqrt(static_cast<double>(nu));
            crb_err = std::max(crb_err, std::abs(crb(StrategySpec::make(StrategyKind::EntangledParallel, n), nu).bound -
                                                 1.0 / (nd * s)));
            crb_err = std::max(crb_err, std::abs(crb(StrategySpec::make(StrategyKind::Sequential, n), nu).bound -
                                                 1.0 / (nd * s)));
            crb_err = std::max(crb_err, std::abs(crb(StrategySpec::make(StrategyKind::ClassicalParallel, n), nu).bound -
                                                 1.0 / std::sqrt(nd * static_cast<double>(nu))));
        }
    }
    out.require(qfi_err < 1e-10, "QFI");
    out.require(cfi_err < 1e-9, "CFI");
    out.require(crb_err < 1e-12, "CRB");
    out.detail << "QFI err " << qfi_err << ", CFI err " << cfi_err << ", CRB err " << crb_err;
}

void scaling(Outcome &out) {
    ExperimentConfig cfg;
    cfg.seed = 42;
    cfg.nu = 4000;
    cfg.rounds = 200;
    cfg.n_values = {1, 2, 4, 8};
    auto run = [&](StrategyKind k) {
        cfg.strategy = StrategySpec::make(k, 1);
        return scaling_experiment(cfg);
    };
    const ScalingReport ent = run(StrategyKind::EntangledParallel);
    const ScalingReport seq = run(StrategyKind::Sequential);
    const ScalingReport cls = run(StrategyKind::ClassicalParallel);
    out.require(ent.fitted_slope >= -1.15 && ent.fitted_slope <= -0.85, "entangled slope");
    out.require(seq.fitted_slope >= -1.15 && seq.fitted_slope <= -0.85, "sequential slope");
    out.require(cls.fitted_slope >= -0.65 && cls.fitted_slope <= -0.35, "classical slope");
    double worst_z = 0.0;
    for (std::size_t i = 0; i < ent.rows.size(); ++i) {
        const auto &e = ent.rows[i];
        const auto &s = seq.rows[i];
        const double se = std::hypot(e.rmse_stderr, s.rmse_stderr);
        worst_z = std::max(worst_z, std::abs(e.empirical_rmse - s.empirical_rmse) / se);
    }
    out.require(worst_z < 3.0, "entangled vs sequential RMSE");
    out.detail << "slopes entangled " << ent.fitted_slope << ", sequential " << seq.fitted_slope << ", classical "
               << cls.fitted_slope << "; max RMSE z " << worst_z;
}

void dephasing_tradeoff(Outcome &out) {
    const double gamma = 1.0;
    const std::size_t nu = 1;
    double lo = 1e300, hi = 0.0, closed = 0.0;
    for (std::size_t n : {1u, 2u, 4u, 8u, 16u}) {
        const FrequencyOptimum o = optimal_frequency_bound(n, gamma, nu);
        lo = std::min(lo, o.bound_star);
        hi = std::max(hi, o.bound_star);
        closed = std::max(closed, std::abs(o.bound_star / std::numbers::e - 1.0));
    }
    const double spread = (hi - lo) / lo;
    out.require(spread < 1e-6, "frequency bound depends on N");
    out.require(closed < 1e-6, "frequency bound differs from e*gamma/sqrt(nu)");
    double adv_err = 0.0;
    const double t = 1e-6;
    for (std::size_t n : {2u, 4u, 8u, 16u}) {
        const double ratio =
            phase_bound_dephasing(n, gamma, t, nu, false) / phase_bound_dephasing(n, gamma, t, nu, true);
        adv_err = std::max(adv_err, std::abs(ratio / std::sqrt(static_cast<double>(n)) - 1.0));
    }
    out.require(adv_err < 1e-4, "phase advantage");
    out.detail << "bound* spread " << spread << ", phase advantage rel err " << adv_err;
}

void photonic_equivalence(Outcome &out) {
    double worst = 0.0, zero_err = 0.0;
    for (std::size_t n = 1; n <= 12; ++n) {
        worst = std::max({worst, n0_equivalence_certificate(n), noon_equivalence_certificate(n)});
        const std::vector<double> zeros = noon_fringe_zeros(n);
        out.require(zeros.size() == n, "zero count");
        for (std::size_t k = 0; k < zeros.size(); ++k) {
            const double expected = std::numbers::pi * (2.0 * static_cast<double>(k) + 1.0) / (2.0 * static_cast<double>(n));
            zero_err = std::max(zero_err, std::abs(zeros[k] - expected));
        }
    }
    out.require(worst < 1e-12, "fringe deviation");
    out.require(zero_err < 1e-9, "fringe zeros");
    out.detail << "max fringe deviation " << worst << ", max zero error " << zero_err;
}

void generalized(Outcome &out) {
    auto rng = rng_for(10);
    const Generator h = Generator::qubit();
    double min_fid = 1.0;
    for (std::size_t n = 1; n <= 6; ++n) {
        for (int trial = 0; trial < 10; ++trial) {
            const ConversionCertificate c = generalized_strategy_certificate(
                testutil::haar_unitary(rng, 2), testutil::haar_unitary(rng, 2), h, testutil::uniform(rng, -3, 3), n);
            out.require(c.passed(), "random W, V certificate");
            min_fid = std::min(min_fid, c.min_fidelity);
        }
    }
    const ComplexMatrix id = ComplexMatrix::identity(2);
    const double phi = 0.6;
    const ConversionCertificate flip = generalized_strategy_certificate(id, pauli_x(), h, phi, 2);
    out.require(flip.passed(), "V = sigma_x certificate");
    const ComplexMatrix raw = u_phi(h, phi) * pauli_x();
    const double raw_offset = max_abs_diff(raw * raw, std::polar(1.0, phi) * id);
    out.require(raw_offset < 1e-12, "raw box squared is not proportional to I");
    const double naive = naive_iteration_fidelity(id, pauli_x(), h, phi, 2);
    out.require(naive < 1.0 - 1e-3, "naive iteration unexpectedly accumulates phase");
    min_fid = std::min(min_fid, flip.min_fidelity);
    out.detail << "1-min_fidelity " << 1.0 - min_fid << ", naive iteration fidelity " << naive;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "vectorization identity", 1.0, vectorization_identity},
        {2, "two-probe conversion", 1.0, two_probe_conversion},
        {3, "N-probe conversion", 30.0, general_conversion},
        {4, "classical-correlation counterexamples", 0.0, counterexamples},
        {5, "noise conversion", 0.0, noise_conversion},
        {6, "Fisher information and Cramer-Rao bounds", 0.0, fisher_bounds},
        {7, "scaling experiment", 120.0, scaling},
        {8, "frequency versus phase under dephasing", 0.0, dephasing_tradeoff},
        {9, "N0 and NOON equivalence", 0.0, photonic_equivalence},
        {10, "generalized black box", 0.0, generalized},
    };
    int failures = 0;
    for (const auto &c : criteria) {
        Outcome out;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(out);
        } catch (const std::exception &e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0.0) {
            out.require(secs < c.time_limit_s, "runtime over " + std::to_string(c.time_limit_s) + " s");
        }
        std::printf("[%s] %2d %s: %s (%.3f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.str().c_str(),
                    secs);
        failures += out.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
