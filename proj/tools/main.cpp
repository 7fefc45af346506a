// entroq: entropy-energy balance toolkit for noisy quantum registers.
//
// Subcommands:
//   verify-temporal   randomized gate for the contraction entropy-gain bound
//   verify-spatial    randomized gate for the commuting-mixture entropy bound
//   contraction       trace-norm contraction rate of a qubit channel
//   crash-time        certified step counts until the free energy goes negative
//   qubit-bound       block-count / qubit-count crash threshold
//   simulate          noisy-circuit run with a per-step entropy ledger
//   sweep             cross-product parameter sweeps of the analyses above
//
// Exit codes: 0 success, 1 verification failure, 2 argument/parse error,
// 3 validation error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "entroq/channels.hpp"
#include "entroq/errors.hpp"
#include "entroq/functionals.hpp"
#include "entroq/io.hpp"
#include "entroq/linalg.hpp"
#include "entroq/simulator.hpp"
#include "entroq/spatial.hpp"

namespace {

using entroq::io::fmt17;
using nlohmann::json;

std::uint64_t env_seed_or_zero() {
    const char* env = std::getenv("ENTROQ_SEED");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0')
        throw entroq::ParseError(std::string("ENTROQ_SEED: not a nonnegative integer: '") + env +
                                 "'");
    return v;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw entroq::Error("cannot open output file '" + out_path + "'");
    f << text;
}

std::string csv_text(const std::vector<std::pair<std::string, std::string>>& params,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream os;
    entroq::io::write_csv(os, params, columns, rows);
    return os.str();
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// verify-temporal

struct VerifyTemporalOpts {
    int n_max = 3;
    int m_max = 5;
    std::vector<double> lambdas{0.1, 0.3, 0.6};
    int cases = 100;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double tolerance = 1e-9;
    std::string out;
    std::string format = "csv";
};

int run_verify_temporal(const VerifyTemporalOpts& opt) {
    const std::uint64_t base = opt.seed_given ? opt.seed : env_seed_or_zero();
    std::vector<std::vector<std::string>> rows;
    json json_rows = json::array();
    double min_slack = std::numeric_limits<double>::infinity();
    std::uint64_t counter = 0;
    for (int n = 1; n <= opt.n_max; ++n) {
        const Eigen::Index dim = Eigen::Index{1} << n;
        for (double lambda : opt.lambdas) {
            const entroq::QuantumChannel local = entroq::QuantumChannel::depolarizing(lambda);
            const double c = 1.0 - lambda;
            for (int k = 0; k < opt.cases; ++k) {
                const std::uint64_t seed = base + counter++;
                const entroq::DensityMatrix rho =
                    entroq::random_density(static_cast<int>(dim), static_cast<int>(dim), seed);
                const double coeff = entroq::entropy_gain_coefficient(rho, n);
                const double s0 = entroq::von_neumann_entropy(rho);
                entroq::DensityMatrix state = rho;
                for (int m = 0; m <= opt.m_max; ++m) {
                    if (m > 0) state = entroq::apply_product_channel(local, n, state);
                    const double gain = entroq::von_neumann_entropy(state) - s0;
                    const double bound = entroq::contraction_gain_bound(coeff, c, m);
                    const double slack = gain - bound;
                    min_slack = std::min(min_slack, slack);
                    if (opt.format == "csv") {
                        rows.push_back({std::to_string(n), fmt17(lambda), std::to_string(m),
                                        std::to_string(seed), fmt17(gain), fmt17(bound),
                                        fmt17(slack)});
                    } else {
                        json_rows.push_back({{"num_qubits", n},
                                             {"lambda", lambda},
                                             {"m", m},
                                             {"seed", seed},
                                             {"gain", gain},
                                             {"bound", bound},
                                             {"slack", slack}});
                    }
                }
            }
        }
    }
    if (!std::isfinite(min_slack)) min_slack = 0.0;  // no rows emitted
    std::ostringstream lam;
    for (std::size_t i = 0; i < opt.lambdas.size(); ++i)
        lam << (i ? "," : "") << fmt17(opt.lambdas[i]);
    if (opt.format == "csv") {
        emit(csv_text({{"command", "verify-temporal"},
                       {"n_max", std::to_string(opt.n_max)},
                       {"m_max", std::to_string(opt.m_max)},
                       {"lambdas", lam.str()},
                       {"cases", std::to_string(opt.cases)},
                       {"seed", std::to_string(base)},
                       {"tolerance", fmt17(opt.tolerance)},
                       {"min_slack", fmt17(min_slack)}},
                      {"num_qubits", "lambda", "m", "seed", "gain", "bound", "slack"}, rows),
             opt.out);
    } else {
        emit(json_text({{"command", "verify-temporal"},
                        {"seed", base},
                        {"min_slack", min_slack},
                        {"rows", std::move(json_rows)}}),
             opt.out);
    }
    if (min_slack < -opt.tolerance) {
        std::cerr << "verification failed: min slack " << fmt17(min_slack) << " below -"
                  << fmt17(opt.tolerance) << "\n";
        return 1;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify-spatial

struct VerifySpatialOpts {
    std::vector<std::string> layouts{"2,1,1", "3,2,1", "3,1,2", "4,2,1"};
    std::vector<double> lambdas{0.25, 0.5, 1.0};
    int cases = 20;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double tolerance = 1e-9;
    std::string layout_json;  // single-layout mode
    std::string out;
    std::string format = "csv";
};

std::array<int, 3> parse_layout_triple(const std::string& text) {
    std::array<int, 3> out{};
    std::istringstream in(text);
    char c1 = 0;
    char c2 = 0;
    if (!(in >> out[0] >> c1 >> out[1] >> c2 >> out[2]) || c1 != ',' || c2 != ',' ||
        !(in >> std::ws).eof())
        throw CLI::ValidationError("--layouts", "expected 'n,k,d', got '" + text + "'");
    return out;
}

int run_verify_spatial(const VerifySpatialOpts& opt) {
    const std::uint64_t base = opt.seed_given ? opt.seed : env_seed_or_zero();
    struct Cell {
        int n, k, d;
        double lambda;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    if (!opt.layout_json.empty()) {
        const entroq::io::LayoutSpec spec = entroq::io::layout_from_json(
            entroq::io::load_json_arg(opt.layout_json, "layout"), "layout");
        cells.push_back({spec.n, spec.k, spec.d, spec.lambda, spec.seed});
    } else {
        for (const std::string& text : opt.layouts) {
            const auto [n, k, d] = parse_layout_triple(text);
            for (double lambda : opt.lambdas) cells.push_back({n, k, d, lambda, base});
        }
    }

    std::vector<std::vector<std::string>> rows;
    json json_rows = json::array();
    double min_slack = std::numeric_limits<double>::infinity();
    for (const Cell& cell : cells) {
        const entroq::ClusterLayout layout(cell.n, cell.k, cell.d);
        if (layout.qubits() > 12)
            throw CLI::ValidationError("--layouts", "layout " + std::to_string(cell.n) + "," +
                                                        std::to_string(cell.k) + "," +
                                                        std::to_string(cell.d) +
                                                        " exceeds the 12-qubit exact-check cap");
        std::uint64_t counter = 0;
        for (int kase = 0; kase < opt.cases; ++kase) {
            const std::uint64_t case_seed = cell.seed + counter;
            // Pure cluster states: the certified mixture bound targets families whose
            // members are distinguishable in proportion to their overlap budget, which
            // block-smoothed pure products always are. Low-purity clusters can defeat it.
            std::vector<entroq::DensityMatrix> clusters;
            clusters.reserve(layout.clusters());
            const int cluster_dim = 1 << layout.d;
            for (int l = 0; l < layout.clusters(); ++l)
                clusters.push_back(entroq::random_density(cluster_dim, 1, cell.seed + counter++));
            const entroq::ProductState state(layout, std::move(clusters));
            const entroq::CommutingFamily family = entroq::build_family(state, cell.lambda);
            entroq::MixtureEntropyReport report;
            try {
                report = entroq::mixture_entropy_bound(family);
            } catch (const entroq::InvariantViolation& e) {
                std::cerr << "verification failed (n=" << cell.n << " k=" << cell.k
                          << " d=" << cell.d << " lambda=" << fmt17(cell.lambda) << " seed="
                          << case_seed << "): " << e.what() << "\n";
                return 1;
            }
            min_slack = std::min(min_slack, report.slack);
            if (opt.format == "csv") {
                rows.push_back({std::to_string(cell.n), std::to_string(cell.k),
                                std::to_string(cell.d), fmt17(cell.lambda),
                                std::to_string(case_seed), fmt17(report.lhs), fmt17(report.rhs),
                                fmt17(report.slack), fmt17(family.kappa())});
            } else {
                json_rows.push_back({{"n", cell.n},
                                     {"k", cell.k},
                                     {"d", cell.d},
                                     {"lambda", cell.lambda},
                                     {"seed", case_seed},
                                     {"lhs", report.lhs},
                                     {"rhs", report.rhs},
                                     {"slack", report.slack},
                                     {"kappa", family.kappa()}});
            }
        }
    }
    if (!std::isfinite(min_slack)) min_slack = 0.0;  // no rows emitted
    if (opt.format == "csv") {
        emit(csv_text({{"command", "verify-spatial"},
                       {"cases", std::to_string(opt.cases)},
                       {"seed", std::to_string(base)},
                       {"tolerance", fmt17(opt.tolerance)},
                       {"min_slack", fmt17(min_slack)}},
                      {"n", "k", "d", "lambda", "seed", "lhs", "rhs", "slack", "kappa"}, rows),
             opt.out);
    } else {
        emit(json_text({{"command", "verify-spatial"},
                        {"seed", base},
                        {"min_slack", min_slack},
                        {"rows", std::move(json_rows)}}),
             opt.out);
    }
    if (min_slack < -opt.tolerance) {
        std::cerr << "verification failed: min slack " << fmt17(min_slack) << " below -"
                  << fmt17(opt.tolerance) << "\n";
        return 1;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// contraction

struct ContractionOpts {
    std::string channel;
    int resolution = 200;
    std::string out;
    std::string format = "json";
};

int run_contraction(const ContractionOpts& opt) {
    const entroq::QuantumChannel channel = entroq::io::channel_from_json(
        entroq::io::load_json_arg(opt.channel, "channel"), "channel");
    const entroq::ContractionEstimate est = entroq::contraction_rate(channel, opt.resolution);
    const bool bistochastic = entroq::is_bistochastic(channel, 1e-10);
    if (opt.format == "json") {
        emit(json_text({{"rate", est.rate},
                        {"grid_resolution", est.grid_resolution},
                        {"refined", est.refined},
                        {"strictly_contractive", est.strictly_contractive()},
                        {"bistochastic", bistochastic},
                        {"witness",
                         {{"rho", entroq::io::matrix_to_json(est.witness_rho.matrix())},
                          {"sigma", entroq::io::matrix_to_json(est.witness_sigma.matrix())}}}}),
             opt.out);
    } else {
        emit(csv_text({{"command", "contraction"},
                       {"resolution", std::to_string(opt.resolution)}},
                      {"rate", "grid_resolution", "refined", "strictly_contractive",
                       "bistochastic"},
                      {{fmt17(est.rate), std::to_string(est.grid_resolution),
                        est.refined ? "1" : "0", est.strictly_contractive() ? "1" : "0",
                        bistochastic ? "1" : "0"}}),
             opt.out);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// crash-time

struct CrashTimeOpts {
    double beta = 0.0;
    double energy = 0.0;
    double epsilon = 0.0;
    std::optional<double> coefficient;
    std::optional<int> num_qubits;
    std::uint64_t state_seed = 0;
    std::optional<int> rank;
    std::optional<double> c;
    std::optional<double> lambda;
    std::string out;
    std::string format = "json";
};

int run_crash_time(const CrashTimeOpts& opt) {
    if (opt.coefficient.has_value() == opt.num_qubits.has_value())
        throw CLI::ValidationError("crash-time",
                                   "give exactly one of --coefficient or --num-qubits");
    if (opt.c.has_value() == opt.lambda.has_value())
        throw CLI::ValidationError("crash-time",
                                   "give exactly one of --contraction-rate or --lambda");
    double coefficient = 0.0;
    if (opt.coefficient) {
        coefficient = *opt.coefficient;
    } else {
        const int n = *opt.num_qubits;
        if (n < 1 || n > 12)
            throw CLI::ValidationError("crash-time", "--num-qubits must lie in [1,12]");
        const int dim = 1 << n;
        const int rank = opt.rank.value_or(dim);
        coefficient = entroq::entropy_gain_coefficient(
            entroq::random_density(dim, rank, opt.state_seed), n);
    }
    const double c = opt.c ? *opt.c : 1.0 - *opt.lambda;
    const entroq::FreeEnergyParams params(opt.beta, opt.energy);
    const entroq::CrashTimeResult result = entroq::crash_time(params, coefficient, opt.epsilon, c);

    if (opt.format == "json") {
        json j{{"beta_energy", opt.beta * opt.energy},
               {"coefficient", coefficient},
               {"epsilon", opt.epsilon},
               {"c", c},
               {"never", result.never},
               {"bound_saturates", result.bound_saturates},
               {"m_linearized", nullptr},
               {"m_exact", nullptr}};
        if (!result.never) j["m_linearized"] = result.m_linearized;
        if (result.m_exact) j["m_exact"] = *result.m_exact;
        emit(json_text(j), opt.out);
    } else {
        emit(csv_text({{"command", "crash-time"},
                       {"beta_energy", fmt17(opt.beta * opt.energy)},
                       {"coefficient", fmt17(coefficient)},
                       {"epsilon", fmt17(opt.epsilon)},
                       {"c", fmt17(c)}},
                      {"never", "bound_saturates", "m_linearized", "m_exact"},
                      {{result.never ? "1" : "0", result.bound_saturates ? "1" : "0",
                        result.never ? "" : std::to_string(result.m_linearized),
                        result.m_exact ? std::to_string(*result.m_exact) : ""}}),
             opt.out);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// qubit-bound

struct QubitBoundOpts {
    double beta = 0.0;
    double energy = 0.0;
    double kappa = 0.0;
    int k = 1;
    int d = 1;
    std::string out;
    std::string format = "json";
};

int run_qubit_bound(const QubitBoundOpts& opt) {
    const entroq::FreeEnergyParams params(opt.beta, opt.energy);
    const entroq::QubitBudget budget = entroq::max_qubit_count(params, opt.kappa);
    const std::uint64_t qubits = budget.qubits(opt.k, opt.d);
    if (opt.format == "json") {
        emit(json_text({{"n_crash", budget.n_crash},
                        {"qubits", qubits},
                        {"kappa", opt.kappa},
                        {"k", opt.k},
                        {"d", opt.d},
                        {"estimator", "conservative"}}),
             opt.out);
    } else {
        emit(csv_text({{"command", "qubit-bound"},
                       {"kappa", fmt17(opt.kappa)},
                       {"estimator", "conservative"}},
                      {"n_crash", "k", "d", "qubits"},
                      {{std::to_string(budget.n_crash), std::to_string(opt.k),
                        std::to_string(opt.d), std::to_string(qubits)}}),
             opt.out);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
    std::string circuit;
    std::string noise;
    double beta = 0.0;
    double energy = 0.0;
    std::optional<double> c_used;
    std::string initial = "zero";
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool stop_on_crash = false;
    std::string out;
    std::string format = "csv";
};

int run_simulate(const SimulateOpts& opt) {
    const entroq::Circuit circuit =
        entroq::io::circuit_from_json(entroq::io::load_json_arg(opt.circuit, "circuit"));
    const entroq::io::NoiseSpec spec =
        entroq::io::noise_from_json(entroq::io::load_json_arg(opt.noise, "noise"), "noise");
    const entroq::LocalStochasticNoise noise(spec.epsilon, spec.channel, circuit.num_qubits());
    const entroq::FreeEnergyParams params(opt.beta, opt.energy);
    const double c_used =
        opt.c_used ? *opt.c_used : entroq::reporting_contraction_rate(spec.channel);

    const int n = circuit.num_qubits();
    const int dim = 1 << n;
    entroq::DensityMatrix rho0 = [&] {
        if (opt.initial == "zero") return entroq::pure_basis_state(dim);
        if (opt.initial == "mixed") return entroq::maximally_mixed(dim);
        const std::uint64_t seed = opt.seed_given ? opt.seed : env_seed_or_zero();
        return entroq::random_density(dim, dim, seed);
    }();

    const entroq::RunLedger ledger =
        entroq::run(circuit, noise, rho0, params, c_used, {opt.stop_on_crash});

    std::vector<std::pair<std::string, std::string>> header{
        {"command", "simulate"},
        {"num_qubits", std::to_string(ledger.num_qubits)},
        {"layers", std::to_string(circuit.layers().size())},
        {"epsilon", fmt17(ledger.epsilon)},
        {"beta", fmt17(ledger.beta)},
        {"energy", fmt17(ledger.energy_budget)},
        {"c_used", fmt17(ledger.c_used)},
        {"gain_coefficient", fmt17(ledger.gain_coefficient)},
        {"initial", opt.initial},
        {"stop_on_crash", opt.stop_on_crash ? "1" : "0"}};
    if (opt.format == "csv") {
        std::vector<std::vector<std::string>> rows;
        rows.reserve(ledger.rows.size());
        for (const entroq::RunRow& r : ledger.rows)
            rows.push_back({std::to_string(r.m), fmt17(r.entropy), fmt17(r.delta_s),
                            fmt17(r.gain_bound), fmt17(r.delta_f), r.crashed ? "1" : "0"});
        emit(csv_text(header, {"m", "entropy", "delta_s", "gain_bound", "delta_f", "crashed"},
                      rows),
             opt.out);
    } else {
        json rows = json::array();
        for (const entroq::RunRow& r : ledger.rows)
            rows.push_back({{"m", r.m},
                            {"entropy", r.entropy},
                            {"delta_s", r.delta_s},
                            {"gain_bound", r.gain_bound},
                            {"delta_f", r.delta_f},
                            {"crashed", r.crashed}});
        json j;
        for (const auto& [k, v] : header) j[k] = v;
        j["rows"] = std::move(rows);
        emit(json_text(j), opt.out);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOpts {
    std::string grid;
    std::string analysis;
    int parallel = 0;
    std::string out;
    std::string format = "csv";
};

const std::vector<std::string> kCanonicalAxes{"epsilon", "lambda", "m",
                                              "beta",    "energy", "n",
                                              "k",       "d"};

bool is_integer_param(const std::string& name) {
    return name == "m" || name == "n" || name == "k" || name == "d";
}

struct SweepPlan {
    std::vector<std::string> axis_names;            // canonical order
    std::vector<std::vector<double>> axis_values;   // aligned with axis_names
    std::map<std::string, double> fixed;
    std::uint64_t seed = 0;
    int replicates = 1;
};

SweepPlan parse_sweep_grid(const json& j) {
    SweepPlan plan;
    if (!j.is_object()) throw entroq::ParseError("grid: expected an object");
    const auto axes_it = j.find("axes");
    if (axes_it == j.end() || !axes_it->is_object() || axes_it->empty())
        throw entroq::ParseError("grid.axes: expected a nonempty object of axis lists");
    for (const std::string& name : kCanonicalAxes) {
        const auto it = axes_it->find(name);
        if (it == axes_it->end()) continue;
        if (!it->is_array() || it->empty())
            throw entroq::ParseError("grid.axes." + name + ": expected a nonempty list");
        std::vector<double> values;
        values.reserve(it->size());
        for (const auto& v : *it) {
            if (!v.is_number())
                throw entroq::ParseError("grid.axes." + name + ": expected numbers");
            if (is_integer_param(name) && !v.is_number_integer())
                throw entroq::ParseError("grid.axes." + name + ": expected integers");
            values.push_back(v.get<double>());
        }
        plan.axis_names.push_back(name);
        plan.axis_values.push_back(std::move(values));
    }
    for (const auto& [name, value] : axes_it->items()) {
        if (std::find(kCanonicalAxes.begin(), kCanonicalAxes.end(), name) == kCanonicalAxes.end())
            throw entroq::ParseError("grid.axes." + name + ": unknown axis");
    }
    if (j.contains("fixed")) {
        const json& fixed = j["fixed"];
        if (!fixed.is_object()) throw entroq::ParseError("grid.fixed: expected an object");
        for (const auto& [name, value] : fixed.items()) {
            if (!value.is_number())
                throw entroq::ParseError("grid.fixed." + name + ": expected a number");
            if (is_integer_param(name) && !value.is_number_integer())
                throw entroq::ParseError("grid.fixed." + name + ": expected an integer");
            plan.fixed[name] = value.get<double>();
        }
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<std::int64_t>() < 0)
            throw entroq::ParseError("grid.seed: expected a nonnegative integer");
        plan.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("replicates")) {
        if (!j["replicates"].is_number_integer() || j["replicates"].get<int>() < 1)
            throw entroq::ParseError("grid.replicates: expected a positive integer");
        plan.replicates = j["replicates"].get<int>();
    }
    return plan;
}

struct SweepAnalysis {
    std::vector<std::string> scalar_needs;  // besides the rate choice below
    bool needs_rate = false;                // lambda or c, exactly one
    std::vector<std::string> outputs;
    std::function<std::vector<std::string>(const std::map<std::string, double>&)> eval;
};

int integer_param(const std::map<std::string, double>& p, const std::string& name) {
    return static_cast<int>(std::llround(p.at(name)));
}

double rate_param(const std::map<std::string, double>& p) {
    const auto it = p.find("c");
    return it != p.end() ? it->second : 1.0 - p.at("lambda");
}

SweepAnalysis make_analysis(const std::string& name) {
    if (name == "crash-time") {
        return SweepAnalysis{
            {"beta", "energy", "coefficient", "epsilon"},
            true,
            {"never", "bound_saturates", "m_linearized", "m_exact"},
            [](const std::map<std::string, double>& p) {
                const entroq::CrashTimeResult r =
                    entroq::crash_time(entroq::FreeEnergyParams(p.at("beta"), p.at("energy")),
                                       p.at("coefficient"), p.at("epsilon"), rate_param(p));
                return std::vector<std::string>{
                    r.never ? "1" : "0", r.bound_saturates ? "1" : "0",
                    r.never ? "" : std::to_string(r.m_linearized),
                    r.m_exact ? std::to_string(*r.m_exact) : ""};
            }};
    }
    if (name == "gain-bound") {
        return SweepAnalysis{
            {"coefficient", "epsilon", "m"},
            true,
            {"binomial_bound", "closed_form_bound", "linearized_bound", "contraction_bound"},
            [](const std::map<std::string, double>& p) {
                const double coeff = p.at("coefficient");
                const double eps = p.at("epsilon");
                const double c = rate_param(p);
                const int m = integer_param(p, "m");
                return std::vector<std::string>{
                    fmt17(entroq::binomial_gain_bound(coeff, eps, c, m)),
                    fmt17(entroq::closed_form_gain_bound(coeff, eps, c, m)),
                    fmt17(entroq::linearized_gain_bound(coeff, eps, c, m)),
                    fmt17(entroq::contraction_gain_bound(coeff, c, m))};
            }};
    }
    if (name == "overlap-bound") {
        return SweepAnalysis{{"n", "k", "d", "lambda"},
                             false,
                             {"bound"},
                             [](const std::map<std::string, double>& p) {
                                 return std::vector<std::string>{fmt17(entroq::overlap_bound(
                                     integer_param(p, "n"), integer_param(p, "k"),
                                     integer_param(p, "d"), p.at("lambda")))};
                             }};
    }
    if (name == "min-block-size") {
        return SweepAnalysis{{"n", "d", "lambda"},
                             false,
                             {"k_min"},
                             [](const std::map<std::string, double>& p) {
                                 return std::vector<std::string>{
                                     std::to_string(entroq::min_block_size(
                                         integer_param(p, "n"), integer_param(p, "d"),
                                         p.at("lambda")))};
                             }};
    }
    if (name == "qubit-bound") {
        return SweepAnalysis{
            {"beta", "energy", "kappa", "k", "d"},
            false,
            {"n_crash", "qubits"},
            [](const std::map<std::string, double>& p) {
                const entroq::QubitBudget budget = entroq::max_qubit_count(
                    entroq::FreeEnergyParams(p.at("beta"), p.at("energy")), p.at("kappa"));
                return std::vector<std::string>{
                    std::to_string(budget.n_crash),
                    std::to_string(budget.qubits(integer_param(p, "k"), integer_param(p, "d")))};
            }};
    }
    throw CLI::ValidationError("--analysis", "unknown analysis '" + name +
                                                 "' (choose from crash-time, gain-bound, "
                                                 "overlap-bound, min-block-size, qubit-bound)");
}

int run_sweep(const SweepOpts& opt) {
    const SweepPlan plan = parse_sweep_grid(entroq::io::load_json_arg(opt.grid, "grid"));
    const SweepAnalysis analysis = make_analysis(opt.analysis);

    // Every needed parameter must come from exactly one of axes/fixed; every
    // supplied axis and fixed entry must be consumed.
    auto has_axis = [&](const std::string& name) {
        return std::find(plan.axis_names.begin(), plan.axis_names.end(), name) !=
               plan.axis_names.end();
    };
    std::vector<std::string> needed = analysis.scalar_needs;
    if (analysis.needs_rate) {
        const bool lam = has_axis("lambda") || plan.fixed.count("lambda");
        const bool c = plan.fixed.count("c") != 0;
        if (lam == c)
            throw entroq::ParseError("analysis '" + opt.analysis +
                                     "' needs exactly one of 'lambda' (axis or fixed) or fixed "
                                     "'c'");
        needed.push_back(lam ? "lambda" : "c");
    }
    for (const std::string& name : needed) {
        const bool axis = has_axis(name);
        const bool fixed = plan.fixed.count(name) != 0;
        if (axis && fixed)
            throw entroq::ParseError("'" + name + "' appears as both an axis and a fixed value");
        if (!axis && !fixed)
            throw entroq::ParseError("analysis '" + opt.analysis + "' needs '" + name +
                                     "' as an axis or a fixed value");
    }
    for (const std::string& name : plan.axis_names)
        if (std::find(needed.begin(), needed.end(), name) == needed.end())
            throw entroq::ParseError("axis '" + name + "' is not used by analysis '" +
                                     opt.analysis + "'");
    for (const auto& [name, value] : plan.fixed)
        if (std::find(needed.begin(), needed.end(), name) == needed.end())
            throw entroq::ParseError("fixed value '" + name + "' is not used by analysis '" +
                                     opt.analysis + "'");

    std::uint64_t cells = plan.replicates;
    for (const auto& values : plan.axis_values) {
        cells *= values.size();
        if (cells > 1000000)
            throw entroq::ParseError("grid exceeds the 10^6 cell budget");
    }

    const auto eval_cell = [&](std::uint64_t index) {
        std::uint64_t rest = index;
        const int replicate = static_cast<int>(rest % plan.replicates);
        rest /= plan.replicates;
        std::map<std::string, double> params = plan.fixed;
        std::vector<std::string> axis_cols(plan.axis_names.size());
        for (std::size_t a = plan.axis_names.size(); a-- > 0;) {
            const auto& values = plan.axis_values[a];
            const double v = values[rest % values.size()];
            rest /= values.size();
            params[plan.axis_names[a]] = v;
            axis_cols[a] = is_integer_param(plan.axis_names[a])
                               ? std::to_string(static_cast<long long>(std::llround(v)))
                               : fmt17(v);
        }
        std::vector<std::string> row = std::move(axis_cols);
        row.push_back(std::to_string(replicate));
        for (std::string& out : analysis.eval(params)) row.push_back(std::move(out));
        std::ostringstream os;
        for (std::size_t i = 0; i < row.size(); ++i) os << row[i] << (i + 1 < row.size() ? "," : "");
        return os.str();
    };

    std::vector<std::string> lines(cells);
    const int workers = std::max(0, std::min<int>(opt.parallel, static_cast<int>(cells)));
    if (workers > 1) {
        std::atomic<std::uint64_t> next{0};
        std::mutex err_mu;
        std::exception_ptr err;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const std::uint64_t i = next.fetch_add(1);
                    if (i >= cells) break;
                    try {
                        lines[i] = eval_cell(i);
                    } catch (...) {
                        const std::lock_guard<std::mutex> lock(err_mu);
                        if (!err) err = std::current_exception();
                        break;
                    }
                }
            });
        }
        for (std::thread& t : pool) t.join();
        if (err) std::rethrow_exception(err);
    } else {
        for (std::uint64_t i = 0; i < cells; ++i) lines[i] = eval_cell(i);
    }

    std::vector<std::string> columns = plan.axis_names;
    columns.push_back("replicate");
    for (const std::string& out : analysis.outputs) columns.push_back(out);

    std::vector<std::pair<std::string, std::string>> header{{"command", "sweep"},
                                                            {"analysis", opt.analysis},
                                                            {"seed", std::to_string(plan.seed)},
                                                            {"replicates",
                                                             std::to_string(plan.replicates)}};
    for (const auto& [name, value] : plan.fixed)
        header.emplace_back("fixed." + name,
                            is_integer_param(name)
                                ? std::to_string(static_cast<long long>(std::llround(value)))
                                : fmt17(value));

    std::ostringstream os;
    for (const auto& [key, value] : header) os << "# " << key << " = " << value << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        os << columns[i] << (i + 1 < columns.size() ? "," : "");
    os << "\n";
    for (const std::string& line : lines) os << line << "\n";
    emit(os.str(), opt.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropy-energy balance toolkit for noisy quantum registers"};
    app.require_subcommand(1);
    int rc = 0;

    VerifyTemporalOpts vt;
    CLI::App* verify_temporal = app.add_subcommand(
        "verify-temporal", "randomized slack check of the contraction entropy-gain bound");
    verify_temporal->add_option("--n-max", vt.n_max, "largest register size")
        ->check(CLI::Range(1, 8))
        ->capture_default_str();
    verify_temporal->add_option("--m-max", vt.m_max, "largest step count")
        ->check(CLI::Range(0, 64))
        ->capture_default_str();
    verify_temporal->add_option("--lambdas", vt.lambdas, "depolarizing strengths")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
    verify_temporal->add_option("--cases", vt.cases, "random states per grid cell")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    CLI::Option* vt_seed = verify_temporal->add_option("--seed", vt.seed, "base RNG seed");
    verify_temporal->add_option("--tolerance", vt.tolerance, "slack tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    verify_temporal->add_option("--out", vt.out, "output path (default stdout)");
    verify_temporal->add_option("--format", vt.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    verify_temporal->callback([&] {
        vt.seed_given = vt_seed->count() > 0;
        rc = run_verify_temporal(vt);
    });

    VerifySpatialOpts vs;
    CLI::App* verify_spatial = app.add_subcommand(
        "verify-spatial", "randomized slack check of the commuting-mixture entropy bound");
    verify_spatial->add_option("--layouts", vs.layouts, "layout triples n,k,d")
        ->delimiter(';');
    verify_spatial->add_option("--lambdas", vs.lambdas, "block depolarizing strengths")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
    verify_spatial->add_option("--cases", vs.cases, "random states per layout/lambda cell")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    CLI::Option* vs_seed = verify_spatial->add_option("--seed", vs.seed, "base RNG seed");
    verify_spatial->add_option("--tolerance", vs.tolerance, "slack tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    verify_spatial->add_option("--layout", vs.layout_json,
                               "single layout JSON (inline or a file path)");
    verify_spatial->add_option("--out", vs.out, "output path (default stdout)");
    verify_spatial->add_option("--format", vs.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    verify_spatial->callback([&] {
        vs.seed_given = vs_seed->count() > 0;
        rc = run_verify_spatial(vs);
    });

    ContractionOpts co;
    CLI::App* contraction =
        app.add_subcommand("contraction", "trace-norm contraction rate of a qubit channel");
    contraction->add_option("--channel", co.channel, "channel JSON (inline or a file path)")
        ->required();
    contraction->add_option("--resolution", co.resolution, "angular grid resolution")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    contraction->add_option("--out", co.out, "output path (default stdout)");
    contraction->add_option("--format", co.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    contraction->callback([&] { rc = run_contraction(co); });

    CrashTimeOpts ct;
    CLI::App* crash_time =
        app.add_subcommand("crash-time", "certified step counts until the free energy turns negative");
    crash_time->add_option("--beta", ct.beta, "inverse temperature")
        ->check(CLI::PositiveNumber)
        ->required();
    crash_time->add_option("--energy", ct.energy, "energy budget")
        ->check(CLI::PositiveNumber)
        ->required();
    crash_time->add_option("--epsilon", ct.epsilon, "noise strength")
        ->check(CLI::Range(0.0, 1.0))
        ->required();
    crash_time->add_option("--coefficient", ct.coefficient,
                           "entropy-gain coefficient of the state")
        ->check(CLI::NonNegativeNumber);
    crash_time->add_option("--num-qubits", ct.num_qubits,
                           "draw a random state on this many qubits instead");
    crash_time->add_option("--state-seed", ct.state_seed, "seed for the random state");
    crash_time->add_option("--rank", ct.rank, "rank of the random state");
    crash_time->add_option("--contraction-rate", ct.c, "local channel contraction rate")
        ->check(CLI::Range(0.0, 1.0));
    crash_time->add_option("--lambda", ct.lambda, "depolarizing strength (rate = 1 - lambda)")
        ->check(CLI::Range(0.0, 1.0));
    crash_time->add_option("--out", ct.out, "output path (default stdout)");
    crash_time->add_option("--format", ct.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    crash_time->callback([&] { rc = run_crash_time(ct); });

    QubitBoundOpts qb;
    CLI::App* qubit_bound =
        app.add_subcommand("qubit-bound", "conservative crash threshold for the block count");
    qubit_bound->add_option("--beta", qb.beta, "inverse temperature")
        ->check(CLI::PositiveNumber)
        ->required();
    qubit_bound->add_option("--energy", qb.energy, "energy budget")
        ->check(CLI::PositiveNumber)
        ->required();
    qubit_bound->add_option("--kappa", qb.kappa, "overlap budget")
        ->check(CLI::NonNegativeNumber)
        ->required();
    qubit_bound->add_option("--k", qb.k, "clusters per block")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    qubit_bound->add_option("--d", qb.d, "qubits per cluster")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    qubit_bound->add_option("--out", qb.out, "output path (default stdout)");
    qubit_bound->add_option("--format", qb.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    qubit_bound->callback([&] { rc = run_qubit_bound(qb); });

    SimulateOpts sim;
    CLI::App* simulate =
        app.add_subcommand("simulate", "noisy-circuit run with a per-step entropy ledger");
    simulate->add_option("--circuit", sim.circuit, "circuit JSON (inline or a file path)")
        ->required();
    simulate->add_option("--noise", sim.noise, "noise JSON (inline or a file path)")->required();
    simulate->add_option("--beta", sim.beta, "inverse temperature")
        ->check(CLI::PositiveNumber)
        ->required();
    simulate->add_option("--energy", sim.energy, "energy budget")
        ->check(CLI::PositiveNumber)
        ->required();
    simulate->add_option("--c-used", sim.c_used,
                         "contraction rate for the bound column (default: the channel's)")
        ->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--initial", sim.initial, "initial state")
        ->check(CLI::IsMember({"zero", "mixed", "random"}))
        ->capture_default_str();
    CLI::Option* sim_seed = simulate->add_option("--seed", sim.seed, "seed for --initial random");
    simulate->add_flag("--stop-on-crash", sim.stop_on_crash,
                       "stop at the first negative free-energy row");
    simulate->add_option("--out", sim.out, "output path (default stdout)");
    simulate->add_option("--format", sim.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    simulate->callback([&] {
        sim.seed_given = sim_seed->count() > 0;
        rc = run_simulate(sim);
    });

    SweepOpts sw;
    CLI::App* sweep = app.add_subcommand("sweep", "cross-product parameter sweep of an analysis");
    sweep->add_option("--grid", sw.grid, "sweep grid JSON (inline or a file path)")->required();
    sweep->add_option("--analysis", sw.analysis,
                      "crash-time, gain-bound, overlap-bound, min-block-size, or qubit-bound")
        ->required();
    sweep->add_option("--parallel", sw.parallel, "worker threads (default serial)")
        ->check(CLI::NonNegativeNumber);
    sweep->add_option("--out", sw.out, "output path (default stdout)");
    sweep->add_option("--format", sw.format, "output format")
        ->check(CLI::IsMember({"csv"}))
        ->capture_default_str();
    sweep->callback([&] { rc = run_sweep(sw); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const entroq::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const entroq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return rc;
}
