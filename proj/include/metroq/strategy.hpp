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
 * Simulation of the sequential, classical-parallel and entangled-parallel
 * estimation strategies, and seeded Monte Carlo phase-estimation experiments.
 *
 * Random numbers: every round of an experiment owns a std::mt19937_64 seeded
 * with splitmix64(seed ^ splitmix64(strategy, N, round)). A uniform double is
 * the top 53 bits of one draw; a trial succeeds when it is below p. Results
 * are therefore independent of the order in which rounds are evaluated.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "metroq/information.hpp"
#include "metroq/linalg.hpp"
#include "metroq/states.hpp"

namespace metroq {

/// u_phi(h, phi) applied n times to `initial`.
inline ComplexVector evolve_sequential(const Generator &h, double phi, std::size_t n, const ComplexVector &initial) {
    if (initial.dim() != h.dim()) {
        throw std::invalid_argument("evolve_sequential: state does not match generator dimension");
    }
    const ComplexMatrix u = u_phi(h, phi);
    ComplexVector state = initial;
    for (std::size_t j = 0; j < n; ++j) {
        state = u * state;
    }
    return state;
}

/// Applies `op` to every probe of an n-probe register, one factor at a time.
inline ComplexVector apply_each(const ComplexVector &state, std::size_t n, const ComplexMatrix &op) {
    const std::vector<std::size_t> dims(n, op.rows());
    ComplexVector out = state;
    for (std::size_t k = 0; k < n; ++k) {
        out = apply_local(out, dims, k, op);
    }
    return out;
}

/// u_phi(h, phi) tensored n times, applied to ghz_state(h, n, lambda).
inline ComplexVector evolve_parallel_entangled(const Generator &h, double phi, std::size_t n, double lambda = 0.0) {
    return apply_each(ghz_state(h, n, lambda), n, u_phi(h, phi));
}

/// The corrected black box W^dagger (W e^{i phi H} V) V^dagger.
inline ComplexMatrix generalized_box(const ComplexMatrix &w, const ComplexMatrix &v, const Generator &h, double phi) {
    if (!is_unitary(w) || !is_unitary(v) || w.rows() != h.dim() || v.rows() != h.dim()) {
        throw std::invalid_argument("generalized_box: W and V must be unitaries on the probe space");
    }
    const ComplexMatrix box = w * u_phi(h, phi) * v;
    return w.adjoint() * box * v.adjoint();
}

/// |<initial|final>|^2
inline double coincidence_probability(const ComplexVector &final_state, const ComplexVector &initial) {
    if (final_state.dim() != initial.dim()) {
        throw std::invalid_argument("coincidence_probability: dimension mismatch");
    }
    return std::clamp(std::norm(inner(initial, final_state)), 0.0, 1.0);
}

/// Probability that one repetition of the strategy's protocol returns the
/// probe(s) to the initial state. For ClassicalParallel this is the
/// single-probe Ramsey probability.
inline double strategy_probability(const StrategySpec &s, double phi) {
    s.validate();
    const Generator &h = s.generator;
    switch (s.kind) {
        case StrategyKind::Sequential: {
            const ComplexVector init = probe_state(h, +1, s.lambda);
            return coincidence_probability(evolve_sequential(h, phi, s.n_probes, init), init);
        }
        case StrategyKind::ClassicalParallel: {
            const ComplexVector init = probe_state(h, +1);
            return coincidence_probability(evolve_sequential(h, phi, 1, init), init);
        }
        case StrategyKind::EntangledParallel:
            return coincidence_probability(evolve_parallel_entangled(h, phi, s.n_probes, s.lambda),
                                           ghz_state(h, s.n_probes, s.lambda));
        case StrategyKind::GeneralizedEntangled: {
            const ComplexVector init = ghz_state(h, s.n_probes, s.lambda);
            const ComplexVector fin = apply_each(init, s.n_probes, generalized_box(*s.w, *s.v, h, phi));
            return coincidence_probability(fin, init);
        }
    }
    throw std::logic_error("strategy_probability: unknown strategy");
}

// ---------------------------------------------------------------------------
// Random source.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, StrategyKind kind, std::uint64_t n, std::uint64_t round) {
    const std::uint64_t h =
        splitmix64(splitmix64(splitmix64(static_cast<std::uint64_t>(kind)) ^ n) ^ (round * 0xD1B54A32D192ED03ULL));
    return splitmix64(seed ^ h);
}

inline double uniform01(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct TrialOutcome {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    /// Successes per probe; a single entry unless the strategy is ClassicalParallel.
    std::vector<std::uint64_t> per_probe;
};

namespace detail {
inline TrialOutcome draw_trials(const StrategySpec &s, double p, std::size_t nu, std::mt19937_64 &rng) {
    TrialOutcome out;
    const std::size_t probes = s.kind == StrategyKind::ClassicalParallel ? s.n_probes : 1;
    out.per_probe.assign(probes, 0);
    for (std::size_t rep = 0; rep < nu; ++rep) {
        for (std::size_t probe = 0; probe < probes; ++probe) {
            if (uniform01(rng) < p) {
                ++out.per_probe[probe];
            }
        }
    }
    for (auto k : out.per_probe) {
        out.successes += k;
    }
    out.trials = static_cast<std::uint64_t>(nu) * probes;
    return out;
}
}  // namespace detail

/// nu repetitions of the strategy at phi_true (N*nu single-probe trials for
/// ClassicalParallel). Deterministic for fixed arguments.
inline TrialOutcome run_trials(const StrategySpec &s, double phi_true, std::size_t nu, std::uint64_t seed) {
    if (nu == 0) {
        throw std::invalid_argument("run_trials: nu must be positive");
    }
    std::mt19937_64 rng(splitmix64(seed));
    return detail::draw_trials(s, strategy_probability(s, phi_true), nu, rng);
}

/// Inverts k/nu = cos^2(n phi / 2) on the branch [0, pi/n].
inline double estimate_phase(std::uint64_t k, std::uint64_t nu, std::size_t n) {
    if (nu == 0 || k > nu || n == 0) {
        throw std::invalid_argument("estimate_phase: need 0 <= k <= nu, nu > 0, n > 0");
    }
    const double freq = static_cast<double>(k) / static_cast<double>(nu);
    const double phi = 2.0 / static_cast<double>(n) * std::acos(std::sqrt(freq));
    return std::clamp(phi, 0.0, std::numbers::pi / static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Scaling experiment.

struct ExperimentConfig {
    /// Template strategy; n_probes is overridden by each entry of n_values.
    StrategySpec strategy = StrategySpec::make(StrategyKind::EntangledParallel, 1);
    /// Fixed true phase; when empty each N runs at pi/(2N), where N phi = pi/2.
    std::optional<double> phi_true;
    std::size_t nu = 4000;
    std::size_t rounds = 200;
    std::uint64_t seed = 0;
    std::vector<std::size_t> n_values{1, 2, 4, 8};
};

struct ScalingRow {
    StrategyKind strategy;
    std::size_t n = 0;
    std::size_t nu = 0;
    std::size_t rounds = 0;
    double phi_true = 0.0;
    double empirical_rmse = 0.0;
    /// Standard error of empirical_rmse (delta method on the mean squared error).
    double rmse_stderr = 0.0;
    double crb = 0.0;
    double time_advantage = 0.0;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    /// Least-squares slope of log(rmse) against log(N).
    double fitted_slope = 0.0;
    double slope_stderr = 0.0;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3) {
        throw std::invalid_argument("fit_line: need at least three points");
    }
    const double m = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw std::invalid_argument("fit_line: abscissae are all equal");
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ssr += r * r;
    }
    f.slope_stderr = std::sqrt(ssr / (m - 2.0) / sxx);
    return f;
}

inline ScalingReport scaling_experiment(const ExperimentConfig &cfg) {
    const std::set<std::size_t> distinct(cfg.n_values.begin(), cfg.n_values.end());
    if (distinct.size() < 3) {
        throw std::invalid_argument("scaling_experiment: need at least three distinct N values");
    }
    if (*distinct.begin() == 0) {
        throw std::invalid_argument("scaling_experiment: N values must be positive");
    }
    if (cfg.nu == 0 || cfg.rounds < 2) {
        throw std::invalid_argument("scaling_experiment: need nu >= 1 and at least two rounds");
    }
    if (std::abs(cfg.strategy.generator.spread() - 1.0) > kIdentityTol) {
        throw std::invalid_argument("scaling_experiment: estimator assumes a generator with unit spectral spread");
    }

    ScalingReport report;
    std::vector<double> log_n, log_rmse;
    for (std::size_t n : distinct) {
        StrategySpec s = cfg.strategy;
        s.n_probes = n;
        s.validate();
        const double nd = static_cast<double>(n);
        const double phi = cfg.phi_true.value_or(std::numbers::pi / (2.0 * nd));
        const std::size_t phase_multiplier = s.kind == StrategyKind::ClassicalParallel ? 1 : n;
        if (!(phi * static_cast<double>(phase_multiplier) > 0.0 &&
              phi * static_cast<double>(phase_multiplier) < std::numbers::pi)) {
            throw std::invalid_argument("scaling_experiment: operating point outside the principal branch");
        }
        const double p = strategy_probability(s, phi);

        std::vector<double> sq_err(cfg.rounds);
        for (std::size_t r = 0; r < cfg.rounds; ++r) {
            std::mt19937_64 rng(derive_seed(cfg.seed, s.kind, n, r));
            const TrialOutcome t = detail::draw_trials(s, p, cfg.nu, rng);
            const double err = estimate_phase(t.successes, t.trials, phase_multiplier) - phi;
            sq_err[r] = err * err;
        }
        double mse = 0.0;
        for (double e : sq_err) {
            mse += e;
        }
        mse /= static_cast<double>(cfg.rounds);
        double var = 0.0;
        for (double e : sq_err) {
            var += (e - mse) * (e - mse);
        }
        var /= static_cast<double>(cfg.rounds - 1);

        ScalingRow row;
        row.strategy = s.kind;
        row.n = n;
        row.nu = cfg.nu;
        row.rounds = cfg.rounds;
        row.phi_true = phi;
        row.empirical_rmse = std::sqrt(mse);
        row.rmse_stderr = row.empirical_rmse > 0.0
                              ? std::sqrt(var / static_cast<double>(cfg.rounds)) / (2.0 * row.empirical_rmse)
                              : 0.0;
        row.crb = crb(s, cfg.nu).bound;
        row.time_advantage = s.kind == StrategyKind::Sequential ? 1.0 : time_advantage(n);
        report.rows.push_back(row);
        if (row.empirical_rmse > 0.0) {
            log_n.push_back(std::log(nd));
            log_rmse.push_back(std::log(row.empirical_rmse));
        }
    }
    const LineFit fit = fit_line(log_n, log_rmse);
    report.fitted_slope = fit.slope;
    report.slope_stderr = fit.slope_stderr;
    return report;
}

}  // namespace metroq
