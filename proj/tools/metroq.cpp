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

// metroq: verification suites and experiments from the command line.
//
// Exit codes: 0 pass, 1 check failure, 2 usage error, 3 I/O error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "metroq/equivalence.hpp"
#include "metroq/fock.hpp"
#include "metroq/information.hpp"
#include "metroq/strategy.hpp"

using json = nlohmann::ordered_json;
using namespace metroq;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

constexpr std::size_t kMaxProbes = 12;
constexpr std::size_t kMaxNu = 100000;
constexpr std::size_t kMaxRounds = 1000;
// The frequency bound is closed form, so it gets a looser cap than commands
// that simulate registers.
constexpr std::size_t kMaxFrequencyProbes = 1024;
constexpr std::uint64_t kDefaultSeed = 42;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Report {
    std::string command;
    json config = json::object();
    json results = json::object();
    bool pass = true;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t> &flag) {
    if (flag) return *flag;
    const char *env = std::getenv("METROQ_SEED");
    if (env == nullptr || *env == '\0') return kDefaultSeed;
    try {
        std::size_t used = 0;
        const std::string s(env);
        if (s.front() == '-') throw std::invalid_argument("negative");
        const std::uint64_t v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception &) {
        throw UsageError(std::string("METROQ_SEED is not a non-negative integer: ") + env);
    }
}

void check_n_values(const std::vector<std::size_t> &ns, std::size_t cap) {
    if (ns.empty()) throw UsageError("--n-values must not be empty");
    for (auto n : ns) {
        if (n == 0 || n > cap) {
            throw UsageError("--n-values entries must lie in [1, " + std::to_string(cap) + "]");
        }
    }
}

std::mt19937_64 seeded(std::uint64_t seed) { return std::mt19937_64(seed); }

double uniform(std::mt19937_64 &rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

ComplexMatrix random_matrix(std::mt19937_64 &rng, std::size_t d) {
    std::normal_distribution<double> g;
    ComplexMatrix m(d, d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) m(r, c) = cplx{g(rng), g(rng)};
    return m;
}

// Haar-random 2x2 unitary from Euler angles.
ComplexMatrix random_unitary2(std::mt19937_64 &rng) {
    const double u = uniform(rng, 0.0, 1.0);
    const double theta = std::asin(std::sqrt(u));
    const double a = uniform(rng, 0.0, 2 * std::numbers::pi);
    const double b = uniform(rng, 0.0, 2 * std::numbers::pi);
    const double g = uniform(rng, 0.0, 2 * std::numbers::pi);
    const cplx c = std::cos(theta), s = std::sin(theta);
    return std::polar(1.0, g) * ComplexMatrix{{std::polar(1.0, a) * c, std::polar(1.0, b) * s},
                                              {-std::polar(1.0, -b) * s, std::polar(1.0, -a) * c}};
}

double certificate_residual(const ConversionCertificate &c) {
    return std::max({1.0 - c.min_fidelity, c.max_prob_error, c.total_prob_error});
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
    std::size_t n_max = 8;
    double tolerance = 1e-12;
    std::optional<std::uint64_t> seed;
};

Report cmd_verify(const VerifyOptions &o) {
    if (o.n_max < 2 || o.n_max > kMaxProbes) {
        throw UsageError("--n-max must lie in [2, " + std::to_string(kMaxProbes) + "]");
    }
    if (!(o.tolerance > 0.0)) throw UsageError("--tolerance must be positive");
    const std::uint64_t seed = resolve_seed(o.seed);
    Report rep{"verify"};
    rep.config = {{"n_max", o.n_max}, {"tolerance", o.tolerance}, {"seed", seed}};
    auto rng = seeded(seed);
    const Generator h = Generator::qubit();
    json checks = json::array();
    auto add = [&](const std::string &name, double residual, json extra = json::object()) {
        const bool ok = residual < o.tolerance;
        json rec = {{"name", name}, {"residual", residual}, {"pass", ok}};
        rec.update(extra);
        checks.push_back(std::move(rec));
        rep.pass = rep.pass && ok;
    };

    double vec_res = 0.0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t d = 2 + static_cast<std::size_t>(t % 7);
        vec_res = std::max(vec_res, vec_identity_residual(random_matrix(rng, d), random_matrix(rng, d),
                                                          random_matrix(rng, d)));
    }
    add("vectorization_identity", vec_res, {{"trials", 50}});

    double n2_res = 0.0, n2_fid = 1.0;
    for (int t = 0; t < 20; ++t) {
        const ConversionCertificate c =
            convert_n2(h, uniform(rng, -std::numbers::pi, std::numbers::pi), uniform(rng, -std::numbers::pi, std::numbers::pi));
        n2_res = std::max(n2_res, certificate_residual(c));
        n2_fid = std::min(n2_fid, c.min_fidelity);
    }
    add("convert_n2", n2_res, {{"trials", 20}, {"min_fidelity", n2_fid}});

    for (std::size_t n = 2; n <= o.n_max; ++n) {
        double res = 0.0, fid = 1.0;
        for (int t = 0; t < 5; ++t) {
            std::vector<double> phis(n);
            for (auto &p : phis) p = uniform(rng, -std::numbers::pi, std::numbers::pi);
            const ConversionCertificate c = convert_general_n(h, phis, uniform(rng, -std::numbers::pi, std::numbers::pi));
            res = std::max(res, certificate_residual(c));
            fid = std::min(fid, c.min_fidelity);
        }
        add("convert_general_n", res, {{"n", n}, {"trials", 5}, {"branches", std::size_t{1} << (n - 1)}, {"min_fidelity", fid}});
    }

    for (auto basis : {CorrelationBasis::Computational, CorrelationBasis::Hadamard}) {
        double res = 0.0;
        for (int k = 0; k < 50; ++k) {
            const CounterexampleResult r = counterexample(basis, 2.0 * std::numbers::pi * k / 49.0);
            res = std::max({res, r.deviation_from_mixed, r.phi_dependence});
        }
        add("counterexample", res, {{"basis", std::string(to_string(basis))}});
    }
    double fisher_gap = 0.0;
    for (int k = 1; k < 20; ++k) {
        const double phi = std::numbers::pi * k / 20.0;
        fisher_gap = std::max(fisher_gap, std::abs(unaveraged_counterexample_fisher(CorrelationBasis::Hadamard, phi) -
                                                   classical_parallel_fisher(2, phi)));
    }
    add("unaveraged_counterexample_fisher", fisher_gap);

    {
        const UsefulnessVerdict id = useful_entanglement_check(ComplexMatrix::identity(2), h);
        add("useful_entanglement_identity", id.is_useful ? std::abs(*id.lambda_hat) : 1.0);
        const std::vector<cplx> d{1.0, std::polar(1.0, 0.8)};
        const UsefulnessVerdict ph = useful_entanglement_check(ComplexMatrix::diagonal(d), h);
        add("useful_entanglement_phase", ph.is_useful ? std::abs(*ph.lambda_hat - 0.8) : 1.0);
        const UsefulnessVerdict fl = useful_entanglement_check(pauli_x(), h);
        add("useful_entanglement_rejects_flip", fl.is_useful ? 1.0 : 0.0);
    }

    for (std::size_t n = 1; n <= std::min<std::size_t>(o.n_max, 6); ++n) {
        const ConversionCertificate c =
            generalized_strategy_certificate(random_unitary2(rng), random_unitary2(rng), h, uniform(rng, -3, 3), n);
        add("generalized_random_box", certificate_residual(c), {{"n", n}, {"min_fidelity", c.min_fidelity}});
    }
    {
        const ComplexMatrix id = ComplexMatrix::identity(2);
        const ConversionCertificate c = generalized_strategy_certificate(id, pauli_x(), h, 0.6, 2);
        add("generalized_sigma_x", certificate_residual(c),
            {{"min_fidelity", c.min_fidelity}, {"naive_iteration_fidelity", naive_iteration_fidelity(id, pauli_x(), h, 0.6, 2)}});
    }
    rep.results = {{"checks", checks}};
    return rep;
}

// ---------------------------------------------------------------------------
// scaling

struct ScalingOptions {
    std::vector<std::string> strategies{"sequential", "classical", "entangled"};
    std::vector<std::size_t> n_values{1, 2, 4, 8};
    std::size_t nu = 4000;
    std::size_t rounds = 200;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Report cmd_scaling(const ScalingOptions &o) {
    check_n_values(o.n_values, kMaxProbes);
    if (std::set<std::size_t>(o.n_values.begin(), o.n_values.end()).size() < 3) {
        throw UsageError("--n-values needs at least 3 distinct entries");
    }
    if (o.nu == 0 || o.nu > kMaxNu) throw UsageError("--nu must lie in [1, 100000]");
    if (o.rounds < 2 || o.rounds > kMaxRounds) throw UsageError("--rounds must lie in [2, 1000]");
    std::vector<StrategyKind> kinds;
    for (const auto &s : o.strategies) {
        const auto k = parse_strategy_kind(s);
        if (!k) throw UsageError("unknown strategy: " + s);
        kinds.push_back(*k);
    }
    if (kinds.empty()) throw UsageError("--strategies must not be empty");
    const std::uint64_t seed = resolve_seed(o.seed);

    Report rep{"scaling"};
    rep.config = {{"strategies", o.strategies}, {"n_values", o.n_values}, {"nu", o.nu},
                  {"rounds", o.rounds},         {"seed", seed},           {"out", o.out ? json(*o.out) : json(nullptr)}};

    std::string csv = "strategy,N,nu,rounds,empirical_rmse,crb,seed\n";
    json per = json::array();
    for (StrategyKind k : kinds) {
        ExperimentConfig cfg;
        cfg.strategy = StrategySpec::make(k, 1);
        cfg.nu = o.nu;
        cfg.rounds = o.rounds;
        cfg.seed = seed;
        cfg.n_values = o.n_values;
        const ScalingReport r = scaling_experiment(cfg);
        const double expected = k == StrategyKind::ClassicalParallel ? -0.5 : -1.0;
        const bool ok = std::abs(r.fitted_slope - expected) <= 0.15;
        rep.pass = rep.pass && ok;
        json rows = json::array();
        for (const auto &row : r.rows) {
            csv += std::string(to_string(k)) + "," + std::to_string(row.n) + "," + std::to_string(row.nu) + "," +
                   std::to_string(row.rounds) + "," + format_double(row.empirical_rmse) + "," +
                   format_double(row.crb) + "," + std::to_string(seed) + "\n";
            rows.push_back({{"N", row.n},
                            {"phi_true", row.phi_true},
                            {"empirical_rmse", row.empirical_rmse},
                            {"rmse_stderr", row.rmse_stderr},
                            {"crb", row.crb},
                            {"time_advantage", row.time_advantage}});
        }
        per.push_back({{"strategy", std::string(to_string(k))},
                       {"fitted_slope", r.fitted_slope},
                       {"slope_stderr", r.slope_stderr},
                       {"expected_slope", expected},
                       {"pass", ok},
                       {"rows", rows}});
    }
    if (o.out) {
        std::ofstream f(*o.out, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + *o.out + " for writing");
        f << csv;
        f.close();
        if (!f) throw IoError("failed writing " + *o.out);
    }
    rep.results = {{"strategies", per}};
    return rep;
}

// ---------------------------------------------------------------------------
// noise, frequency, noon, fisher

Report cmd_noise(const std::string &channel, double p) {
    KrausChannel ch = channel == "dephasing"      ? dephasing(p)
                      : channel == "bitphaseflip" ? bit_phase_flip(p)
                                                  : amplitude_damping(p);
    const EffectiveChannel eff = effective_sequential_channel(ch, ch);
    const bool unital = is_unital(ch);
    Report rep{"noise"};
    rep.config = {{"channel", channel}, {"p", p}};
    rep.results = {{"unital", unital},
                   {"diag_or_antidiag", is_diag_or_antidiag(ch)},
                   {"valid_beyond_two_probes", noisy_conversion_valid_beyond_n2(ch, ch)},
                   {"eq6_residual", eff.identity_residual},
                   {"trace_preserving", eff.trace_preserving},
                   {"effective_kraus_count", eff.channel.ops().size()},
                   {"effective_completeness_residual", eff.channel.completeness_residual()}};
    rep.pass = eff.identity_residual < 1e-12 && eff.trace_preserving == unital;
    return rep;
}

Report cmd_frequency(double gamma, const std::vector<std::size_t> &ns, std::size_t nu) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw UsageError("--gamma must be positive");
    check_n_values(ns, kMaxFrequencyProbes);
    if (nu == 0 || nu > kMaxNu) throw UsageError("--nu must lie in [1, 100000]");
    Report rep{"frequency"};
    rep.config = {{"gamma", gamma}, {"n_values", ns}, {"nu", nu}};
    const double closed = std::numbers::e * gamma / std::sqrt(static_cast<double>(nu));
    double lo = 1e300, hi = 0.0;
    json rows = json::array();
    for (auto n : ns) {
        const FrequencyOptimum opt = optimal_frequency_bound(n, gamma, nu);
        lo = std::min(lo, opt.bound_star);
        hi = std::max(hi, opt.bound_star);
        const bool ok = std::abs(opt.bound_star / closed - 1.0) < 1e-6 &&
                        std::abs(opt.t_star * static_cast<double>(n) * gamma - 1.0) < 1e-6;
        rep.pass = rep.pass && ok;
        rows.push_back({{"N", n}, {"t_star", opt.t_star}, {"bound_star", opt.bound_star}, {"iterations", opt.iterations}});
    }
    const double spread = (hi - lo) / lo;
    rep.pass = rep.pass && spread < 1e-6;
    rep.results = {{"rows", rows}, {"closed_form_bound", closed}, {"relative_spread", spread}};
    return rep;
}

Report cmd_noon(std::size_t n) {
    if (n == 0 || n > kMaxProbes) throw UsageError("--n must lie in [1, 12]");
    Report rep{"noon"};
    rep.config = {{"n", n}};
    const double noon = noon_equivalence_certificate(n);
    const double n0 = n0_equivalence_certificate(n);
    const double multi = noon_multipass_deviation(n);
    const std::vector<double> zeros = noon_fringe_zeros(n);
    double zero_err = zeros.size() == n ? 0.0 : 1.0;
    for (std::size_t k = 0; k < zeros.size() && k < n; ++k) {
        zero_err = std::max(zero_err, std::abs(zeros[k] - std::numbers::pi * (2.0 * static_cast<double>(k) + 1.0) /
                                                              (2.0 * static_cast<double>(n))));
    }
    rep.results = {{"max_fringe_deviation", noon},
                   {"n0_fringe_deviation", n0},
                   {"multipass_deviation", multi},
                   {"fringe_zeros", zeros},
                   {"max_zero_error", zero_err}};
    rep.pass = noon < 1e-12 && n0 < 1e-12 && multi < 1e-12 && zero_err < 1e-9;
    return rep;
}

Report cmd_fisher(const std::vector<std::size_t> &ns, std::size_t nu) {
    check_n_values(ns, kMaxProbes);
    if (nu == 0 || nu > kMaxNu) throw UsageError("--nu must lie in [1, 100000]");
    Report rep{"fisher"};
    rep.config = {{"n_values", ns}, {"nu", nu}};
    const Generator h = Generator::qubit();
    json rows = json::array();
    for (auto n : ns) {
        const double nd = static_cast<double>(n);
        const double qg = qfi_pure(ghz_state(n), h.total(n));
        const double qp = qfi_pure(product_state(plus_state(), n), h.total(n));
        const double cf = cfi_binary(n, std::numbers::pi / (2.0 * nd));
        json bounds = json::object();
        for (auto k : {StrategyKind::Sequential, StrategyKind::ClassicalParallel, StrategyKind::EntangledParallel}) {
            bounds[std::string(to_string(k))] = crb(StrategySpec::make(k, n), nu).bound;
        }
        const bool ok = std::abs(qg - nd * nd) < 1e-10 && std::abs(qp - nd) < 1e-10 && std::abs(cf - nd * nd) < 1e-9;
        rep.pass = rep.pass && ok;
        rows.push_back({{"N", n}, {"qfi_ghz", qg}, {"qfi_product", qp}, {"cfi_binary", cf}, {"crb", bounds}});
    }
    rep.results = {{"rows", rows}};
    return rep;
}

// ---------------------------------------------------------------------------
// Output

void print_text(const json &j, const std::string &prefix) {
    if (j.is_object()) {
        for (const auto &[k, v] : j.items()) print_text(v, prefix.empty() ? k : prefix + "." + k);
    } else if (j.is_array() && !j.empty() && j.front().is_structured()) {
        for (std::size_t i = 0; i < j.size(); ++i) print_text(j[i], prefix + "[" + std::to_string(i) + "]");
    } else {
        std::cout << prefix << " = " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

int emit(const Report &rep, const std::string &format, long long wall_ms) {
    if (format == "json") {
        json out = {{"command", rep.command},
                    {"config", rep.config},
                    {"results", rep.results},
                    {"pass", rep.pass},
                    {"wall_time_ms", wall_ms}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << rep.command << ": " << (rep.pass ? "PASS" : "FAIL") << " (" << wall_ms << " ms)\n";
        print_text(rep.config, "config");
        print_text(rep.results, "");
    }
    std::cout.flush();
    if (!std::cout) return kExitIo;
    return rep.pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"metroq: parallel versus sequential quantum metrology checks"};
    app.require_subcommand(1);
    std::string format = "json";
    auto add_format = [&](CLI::App *sub) {
        sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
    };
    auto add_seed = [](CLI::App *sub, std::optional<std::uint64_t> &seed) {
        sub->add_option("--seed", seed, "Random seed (default: METROQ_SEED, else 42)");
    };

    VerifyOptions vo;
    auto *verify = app.add_subcommand("verify", "Run the equivalence certificate suite");
    verify->add_option("--n-max", vo.n_max, "Largest probe count")->capture_default_str();
    verify->add_option("--tolerance", vo.tolerance, "Residual tolerance for every check")->capture_default_str();
    add_seed(verify, vo.seed);
    add_format(verify);

    ScalingOptions so;
    auto *scaling = app.add_subcommand("scaling", "Monte Carlo RMSE scaling experiment");
    scaling->add_option("--strategies", so.strategies, "sequential, classical, entangled, generalized")
        ->delimiter(',')
        ->capture_default_str();
    scaling->add_option("--n-values", so.n_values, "Probe counts")->delimiter(',')->capture_default_str();
    scaling->add_option("--nu", so.nu, "Repetitions per round")->capture_default_str();
    scaling->add_option("--rounds", so.rounds, "Monte Carlo rounds")->capture_default_str();
    add_seed(scaling, so.seed);
    scaling->add_option("--out", so.out, "CSV output path");
    add_format(scaling);

    std::string channel;
    double p = 0.0;
    auto *noise = app.add_subcommand("noise", "Noise conversion checks for one channel");
    noise->add_option("--channel", channel, "Channel family")
        ->required()
        ->check(CLI::IsMember({"dephasing", "bitphaseflip", "amplitudedamping"}));
    noise->add_option("--p", p, "Channel parameter")->required()->check(CLI::Range(0.0, 1.0));
    add_format(noise);

    double gamma = 0.0;
    std::vector<std::size_t> freq_ns{1, 2, 4, 8};
    std::size_t freq_nu = 1;
    auto *frequency = app.add_subcommand("frequency", "Optimal frequency bound under dephasing");
    frequency->add_option("--gamma", gamma, "Dephasing rate")->required();
    frequency->add_option("--n-values", freq_ns, "Probe counts")->delimiter(',')->capture_default_str();
    frequency->add_option("--nu", freq_nu, "Repetitions")->capture_default_str();
    add_format(frequency);

    std::size_t noon_n = 4;
    auto *noon = app.add_subcommand("noon", "NOON and N0 fringe equivalence");
    noon->add_option("--n", noon_n, "Photon number")->capture_default_str();
    add_format(noon);

    std::vector<std::size_t> fisher_ns{1, 2, 4, 8};
    std::size_t fisher_nu = 4000;
    auto *fisher = app.add_subcommand("fisher", "Fisher information and Cramer-Rao table");
    fisher->add_option("--n-values", fisher_ns, "Probe counts")->delimiter(',')->capture_default_str();
    fisher->add_option("--nu", fisher_nu, "Repetitions")->capture_default_str();
    add_format(fisher);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        Report rep;
        if (verify->parsed()) rep = cmd_verify(vo);
        else if (scaling->parsed()) rep = cmd_scaling(so);
        else if (noise->parsed()) rep = cmd_noise(channel, p);
        else if (frequency->parsed()) rep = cmd_frequency(gamma, freq_ns, freq_nu);
        else if (noon->parsed()) rep = cmd_noon(noon_n);
        else rep = cmd_fisher(fisher_ns, fisher_nu);
        const auto ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        return emit(rep, format, static_cast<long long>(ms));
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
}
