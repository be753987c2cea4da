// Command-line front end: enumeration, verification, simulation, path
// construction, and statistics as reproducible subcommands. Machine-readable
// output goes to --out only; stdout stays human-readable.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wr/config.hpp"
#include "wr/dynamics.hpp"
#include "wr/landscape.hpp"
#include "wr/lattice.hpp"
#include "wr/paths.hpp"
#include "wr/stats.hpp"
#include "wr/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCapacity = 3;

struct Options {
    int K = 0;
    int L = 0;
    std::string bc = "periodic";
    int M = 2;
    double beta = 1.0;
    std::string beta_grid = "2.0:4.0:0.5";
    std::uint64_t n = 1000;
    std::uint64_t seed = 0;
    int threads = 0; // 0 = logical cores
    std::string out;
    std::string format = "json";
    std::vector<std::string> from_state;
    bool raw = false;
    bool witness = false;
    bool keep_voids = false;
    int from_type = 1;
    int to_type = 2;
    int target_type = 1;
    int start_type = 1;
    std::vector<std::string> sample_files;
};

wr::BoundaryCondition parse_bc(const std::string& name) {
    if (name == "periodic") return wr::BoundaryCondition::periodic;
    if (name == "open") return wr::BoundaryCondition::open;
    if (name == "semi") return wr::BoundaryCondition::semi_periodic;
    throw std::invalid_argument("unknown boundary condition: " + name);
}

std::vector<double> parse_beta_grid(const std::string& text) {
    double a = 0.0, b = 0.0, step = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':')
        throw std::invalid_argument("beta grid must be a:b:step, got '" + text + "'");
    if (!(step > 0.0) || b < a)
        throw std::invalid_argument("beta grid needs step > 0 and b >= a");
    std::vector<double> grid;
    for (double x = a; x <= b + 1e-9; x += step) grid.push_back(x);
    return grid;
}

std::string instance_name(const Options& o) {
    return o.bc + " " + std::to_string(o.K) + "x" + std::to_string(o.L) +
           " M=" + std::to_string(o.M);
}

json run_spec_json(const std::string& subcommand, const Options& o, bool uses_grid) {
    json spec{{"subcommand", subcommand}, {"K", o.K},           {"L", o.L},
              {"bc", o.bc},               {"M", o.M},           {"seed", o.seed},
              {"n_samples", o.n},         {"format", o.format}, {"out", o.out}};
    if (uses_grid)
        spec["beta_grid"] = o.beta_grid;
    else
        spec["beta"] = o.beta;
    return spec;
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::invalid_argument("cannot open output file: " + path);
    return f;
}

/// Generic machine output: JSON document, or a flat key,value CSV with the
/// provenance tucked into comment lines.
void write_machine(const Options& o, const json& doc) {
    if (o.out.empty()) return;
    auto f = open_output(o.out);
    if (o.format == "json") {
        f << doc.dump(2) << '\n';
        return;
    }
    f << "# wr_cli " << wr::kVersion << '\n';
    f << "# run_spec: " << doc.at("run_spec").dump() << '\n';
    f << "key,value\n";
    for (const auto& [key, value] : doc.items()) {
        if (key == "run_spec" || key == "version") continue;
        const std::string text = value.is_string() ? value.get<std::string>() : value.dump();
        f << key << ',' << csv_field(text) << '\n';
    }
}

std::vector<std::string> config_rows(const wr::Lattice& lat, const wr::Configuration& sigma) {
    std::vector<std::string> rows;
    rows.reserve(static_cast<std::size_t>(lat.rows()));
    for (int i = 0; i < lat.rows(); ++i) {
        std::string row;
        for (int j = 0; j < lat.cols(); ++j) {
            if (j) row += ' ';
            row += std::to_string(
                static_cast<int>(sigma.labels[static_cast<std::size_t>(lat.site(j, i))]));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

wr::Configuration load_configuration(const std::string& path, const wr::Lattice& lat, int M,
                                     bool raw) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open state file: " + path);
    return wr::read_configuration(in, lat, M, raw);
}

int effective_threads(const Options& o) {
    if (o.threads > 0) return o.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// ---------------------------------------------------------------------------

int run_gamma(const Options& o) {
    const wr::Lattice lat(o.K, o.L, parse_bc(o.bc));
    const int gamma = wr::gamma_formula(lat);
    std::cout << gamma << '\n';
    json doc{{"run_spec", run_spec_json("gamma", o, false)},
             {"version", wr::kVersion},
             {"instance", instance_name(o)},
             {"gamma_formula", gamma}};
    write_machine(o, doc);
    return kExitOk;
}

int run_verify(const Options& o) {
    const wr::Lattice lat(o.K, o.L, parse_bc(o.bc));
    const auto rep = wr::verify_structural_properties(lat, o.M);
    const bool pass =
        rep.stable_pairs_uniform && rep.nonstable_strictly_below &&
        rep.gamma_formula == rep.gamma_bruteforce;

    std::cout << "instance:                " << instance_name(o) << '\n'
              << "states:                  " << rep.state_count << '\n'
              << "gamma (formula):         " << rep.gamma_formula << '\n'
              << "gamma (brute force):     " << rep.gamma_bruteforce << '\n'
              << "stable pair barriers:    " << (rep.stable_pairs_uniform ? "uniform" : "NOT uniform")
              << '\n'
              << "non-stable barriers:     "
              << (rep.nonstable_strictly_below ? "strictly below gamma" : "NOT strictly below gamma")
              << '\n'
              << "max non-stable barrier:  " << rep.max_nonstable_barrier << '\n'
              << "runtime:                 " << rep.runtime_ms << " ms\n"
              << "result:                  " << (pass ? "PASS" : "FAIL") << '\n';
    if (!rep.counterexample.empty())
        std::cout << "counterexample:          " << rep.counterexample << '\n';

    json doc{{"run_spec", run_spec_json("verify", o, false)},
             {"version", wr::kVersion}};
    doc["instance"] = instance_name(o);
    doc["states"] = rep.state_count;
    doc["gamma_formula"] = rep.gamma_formula;
    doc["gamma_bruteforce"] = rep.gamma_bruteforce;
    doc["thm31_i"] = rep.stable_pairs_uniform;
    doc["thm31_ii"] = rep.nonstable_strictly_below;
    doc["max_nonstable_barrier"] = rep.max_nonstable_barrier;
    doc["runtime_ms"] = rep.runtime_ms;
    if (!rep.counterexample.empty()) doc["counterexample"] = rep.counterexample;
    write_machine(o, doc);
    return pass ? kExitOk : kExitCheckFailed;
}

int run_phi(const Options& o) {
    const wr::Lattice lat(o.K, o.L, parse_bc(o.bc));
    wr::LandscapeGraph g(lat, o.M);

    wr::Configuration source;
    std::vector<wr::Configuration> targets;
    if (o.from_state.empty()) {
        source = wr::stable_config(lat, o.M, 1);
        for (int m = 2; m <= o.M; ++m) targets.push_back(wr::stable_config(lat, o.M, m));
    } else {
        source = load_configuration(o.from_state.front(), lat, o.M, o.raw);
        for (std::size_t i = 1; i < o.from_state.size(); ++i)
            targets.push_back(load_configuration(o.from_state[i], lat, o.M, o.raw));
        if (targets.empty()) {
            for (int m = 1; m <= o.M; ++m) {
                auto s = wr::stable_config(lat, o.M, m);
                if (!(s == source)) targets.push_back(std::move(s));
            }
        }
    }

    std::vector<wr::PackedState> target_codes;
    target_codes.reserve(targets.size());
    for (const auto& t : targets) target_codes.push_back(wr::encode(t));
    const auto res = wr::communication_height(g, wr::encode(source), target_codes, o.witness);

    std::cout << "instance:  " << instance_name(o) << '\n'
              << "states:    " << g.state_count() << '\n'
              << "targets:   " << targets.size() << '\n'
              << "phi:       " << res.phi << '\n'
              << "barrier:   " << res.barrier << '\n';
    if (res.witness) std::cout << "witness:   " << res.witness->size() << " states\n";

    json doc{{"run_spec", run_spec_json("phi", o, false)},
             {"version", wr::kVersion},
             {"instance", instance_name(o)},
             {"states", g.state_count()},
             {"phi", res.phi},
             {"barrier", res.barrier}};
    if (res.witness) {
        json path = json::array();
        for (wr::PackedState code : *res.witness)
            path.push_back(config_rows(lat, wr::decode(code, lat, o.M)));
        doc["witness"] = std::move(path);
    }
    write_machine(o, doc);
    return kExitOk;
}

int run_simulate(const Options& o) {
    const wr::Lattice lat(o.K, o.L, parse_bc(o.bc));
    const wr::ChainParams params{lat, o.M, o.beta, o.seed};

    wr::Configuration start = o.from_state.empty()
                                  ? wr::stable_config(lat, o.M, 1)
                                  : load_configuration(o.from_state.front(), lat, o.M, o.raw);
    std::vector<wr::Configuration> targets;
    for (int m = 1; m <= o.M; ++m) {
        auto s = wr::stable_config(lat, o.M, m);
        if (!(s == start)) targets.push_back(std::move(s));
    }

    const auto samples = wr::sample_hitting_times(start, targets, params,
                                                  static_cast<std::size_t>(o.n),
                                                  effective_threads(o));

    double mean = 0.0;
    std::map<int, std::uint64_t> exits;
    for (const auto& s : samples) {
        mean += static_cast<double>(s.steps) / static_cast<double>(samples.size());
        ++exits[static_cast<int>(s.exit.labels.at(0))];
    }
    std::cout << "instance:    " << instance_name(o) << '\n'
              << "beta:        " << o.beta << '\n'
              << "samples:     " << samples.size() << '\n'
              << "mean steps:  " << mean << '\n';
    std::cout << "exit counts:";
    for (const auto& [label, count] : exits) std::cout << ' ' << label << ':' << count;
    std::cout << '\n';

    if (o.out.empty()) return kExitOk;
    auto f = open_output(o.out);
    const json spec = run_spec_json("simulate", o, false);
    if (o.format == "csv") {
        f << "# wr_cli " << wr::kVersion << '\n';
        f << "# run_spec: " << spec.dump() << '\n';
        f << "beta,seed,steps,exit_label\n";
        for (const auto& s : samples)
            f << s.beta << ',' << s.seed << ',' << s.steps << ','
              << static_cast<int>(s.exit.labels.at(0)) << '\n';
    } else {
        json rows = json::array();
        for (const auto& s : samples)
            rows.push_back({{"beta", s.beta},
                            {"seed", s.seed},
                            {"steps", s.steps},
                            {"exit_label", static_cast<int>(s.exit.labels.at(0))}});
        json doc{{"run_spec", spec},
                 {"version", wr::kVersion},
                 {"instance", instance_name(o)},
                 {"mean_steps", mean},
                 {"samples", std::move(rows)}};
        f << doc.dump(2) << '\n';
    }
    return kExitOk;
}

/// Shared tail for refpath and reduce: summarizes a path, dumps it on
/// request, and turns validation into the exit code.
int finish_path_command(const Options& o, const char* subcommand, const wr::Lattice& lat,
                        const wr::Path& path, int expected_barrier) {
    const int height = wr::path_height(path);
    const int barrier = height - wr::energy(path.front());
    const auto validation = wr::validate_path(lat, path);
    const bool pass = validation.ok && barrier == expected_barrier;

    std::cout << "instance:  " << instance_name(o) << '\n'
              << "length:    " << path.size() << '\n'
              << "height:    " << height << '\n'
              << "barrier:   " << barrier << " (expected " << expected_barrier << ")\n"
              << "valid:     " << (validation.ok ? "yes" : "no") << '\n'
              << "result:    " << (pass ? "PASS" : "FAIL") << '\n';
    if (!validation.ok)
        std::cout << "violation at index " << validation.index << ": " << validation.reason << '\n';

    if (!o.out.empty()) {
        const json spec = run_spec_json(subcommand, o, false);
        if (o.format == "json") {
            json blocks = json::array();
            for (const auto& sigma : path) blocks.push_back(config_rows(lat, sigma));
            json doc{{"run_spec", spec},
                     {"version", wr::kVersion},
                     {"instance", instance_name(o)},
                     {"length", path.size()},
                     {"height", height},
                     {"barrier", barrier},
                     {"valid", validation.ok},
                     {"path", std::move(blocks)}};
            auto f = open_output(o.out);
            f << doc.dump(2) << '\n';
        } else {
            // Newline-delimited configuration blocks, readable back one by
            // one with the configuration parser.
            auto f = open_output(o.out);
            f << "# wr_cli " << wr::kVersion << '\n';
            f << "# run_spec: " << spec.dump() << '\n';
            f << "# length=" << path.size() << " height=" << height << " barrier=" << barrier
              << '\n';
            for (const auto& sigma : path) {
                wr::write_configuration(f, lat, sigma);
                f << '\n';
            }
        }
    }
    return pass ? kExitOk : kExitCheckFailed;
}

int run_refpath(const Options& o) {
    const wr::Lattice lat(o.K, o.L, parse_bc(o.bc));
    if (o.from_type < 1 || o.from_type > o.M || o.to_type < 1 || o.to_type > o.M)
        throw std::invalid_argument("--from-type/--to-type must lie in 1..M");
    const auto from = wr::stable_config(lat, o.M, o.from_type);
    const auto to = wr::stable_config(lat, o.M, o.to_type);
    const auto path = wr::reference_path(lat, from, to);
    return finish_path_command(o, "refpath", lat, path, wr::gamma_formula(lat));
}

int run_reduce(const Options& o) {
    const wr::Lattice lat(o.K, o.L, parse_bc(o.bc));
    wr::Configuration seed;
    if (o.from_state.empty()) {
        seed.M = o.M;
        seed.labels.assign(static_cast<std::size_t>(lat.size()), 0);
    } else {
        seed = load_configuration(o.from_state.front(), lat, o.M, o.raw);
    }
    wr::Path path;
    if (lat.bc() == wr::BoundaryCondition::periodic)
        path = wr::reduction_path_periodic(lat, seed, o.target_type, o.keep_voids);
    else if (lat.bc() == wr::BoundaryCondition::open)
        path = wr::reduction_path_open(lat, seed, o.target_type, o.keep_voids);
    else
        throw std::invalid_argument("reduce: no construction for semi-periodic boundaries");
    // The reduction premise bounds the height by H(seed)+1.
    const int expected = std::min(wr::path_height(path) - wr::energy(seed), 1);
    return finish_path_command(o, "reduce", lat, path, expected);
}

int run_mix(const Options& o) {
    const wr::Lattice lat(o.K, o.L, parse_bc(o.bc));
    const auto grid = parse_beta_grid(o.beta_grid);
    const auto fit = wr::spectral_mixing_exponent(lat, o.M, grid);

    std::cout << "instance:  " << instance_name(o) << '\n';
    std::cout << "beta grid: ";
    for (std::size_t i = 0; i < grid.size(); ++i) std::cout << (i ? " " : "") << grid[i];
    std::cout << '\n';
    std::cout << "log relaxation times:";
    for (double y : fit.log_means) std::cout << ' ' << y;
    std::cout << '\n';
    std::cout << "slope:     " << fit.slope << '\n'
              << "stderr:    " << fit.slope_stderr << '\n';

    json doc{{"run_spec", run_spec_json("mix", o, true)},
             {"version", wr::kVersion},
             {"instance", instance_name(o)},
             {"beta_grid", fit.betas},
             {"log_relaxation", fit.log_means},
             {"slope", fit.slope},
             {"stderr", fit.slope_stderr},
             {"gamma_formula", wr::gamma_formula(lat)}};
    write_machine(o, doc);
    return kExitOk;
}

struct SampleRow {
    double beta = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t steps = 0;
    int exit_label = 0;
};

std::vector<SampleRow> read_sample_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open sample file: " + path);
    std::vector<SampleRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("beta,", 0) == 0) continue; // column header
        std::istringstream cells(line);
        SampleRow row;
        char c1 = 0, c2 = 0, c3 = 0;
        if (!(cells >> row.beta >> c1 >> row.seed >> c2 >> row.steps >> c3 >> row.exit_label) ||
            c1 != ',' || c2 != ',' || c3 != ',')
            throw std::invalid_argument("malformed sample row in " + path + ": " + line);
        rows.push_back(row);
    }
    if (rows.empty()) throw std::invalid_argument("no samples found in " + path);
    return rows;
}

int run_stats(const Options& o) {
    const wr::Lattice lat(o.K, o.L, parse_bc(o.bc));
    std::vector<SampleRow> rows;
    for (const auto& path : o.sample_files) {
        auto part = read_sample_csv(path);
        rows.insert(rows.end(), part.begin(), part.end());
    }

    std::map<double, std::vector<double>> by_beta;
    std::map<int, std::uint64_t> exit_counts;
    for (const auto& r : rows) {
        by_beta[r.beta].push_back(static_cast<double>(r.steps));
        ++exit_counts[r.exit_label];
    }
    std::vector<double> betas;
    std::vector<std::vector<double>> groups;
    for (auto& [beta, steps] : by_beta) {
        betas.push_back(beta);
        groups.push_back(std::move(steps));
    }

    json tests = json::array();
    bool any_reject = false;

    // Growth rate of the mean over the grid, when the grid supports a fit.
    json slope = nullptr, slope_stderr = nullptr;
    if (betas.size() >= 3) {
        const auto fit = wr::fit_log_slope(betas, groups);
        slope = fit.slope;
        slope_stderr = fit.slope_stderr;
    }

    // Exponentiality of the scaled hitting time, per grid point.
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (groups[i].size() < 200) continue;
        const double mean = std::accumulate(groups[i].begin(), groups[i].end(), 0.0) /
                            static_cast<double>(groups[i].size());
        std::vector<double> scaled;
        scaled.reserve(groups[i].size());
        for (double x : groups[i]) scaled.push_back(x / mean);
        const auto rep = wr::ks_unit_exponential(scaled);
        any_reject = any_reject || rep.reject;
        tests.push_back({{"name", "ks_unit_exponential"},
                         {"beta", betas[i]},
                         {"statistic", rep.statistic},
                         {"p_value", rep.p_value},
                         {"n", rep.n},
                         {"significance", rep.significance},
                         {"reject", rep.reject}});
    }

    // Exit uniformity over the non-start stable states, when testable.
    if (o.M >= 3) {
        std::vector<std::uint64_t> counts;
        for (int m = 1; m <= o.M; ++m) {
            if (m == o.start_type) continue;
            const auto it = exit_counts.find(m);
            counts.push_back(it == exit_counts.end() ? 0 : it->second);
        }
        const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
        if (total >= 50 * counts.size()) {
            const auto rep = wr::chi_square_uniform_exit(counts);
            any_reject = any_reject || rep.reject;
            tests.push_back({{"name", "chi_square_uniform_exit"},
                             {"statistic", rep.statistic},
                             {"p_value", rep.p_value},
                             {"n", rep.n},
                             {"significance", rep.significance},
                             {"reject", rep.reject}});
        }
    }

    std::cout << "instance:  " << instance_name(o) << '\n'
              << "samples:   " << rows.size() << '\n'
              << "betas:     " << betas.size() << '\n';
    if (!slope.is_null())
        std::cout << "slope:     " << slope.get<double>() << " (stderr "
                  << slope_stderr.get<double>() << ")\n";
    for (const auto& t : tests)
        std::cout << "test:      " << t.at("name").get<std::string>()
                  << (t.contains("beta") ? " beta=" + t.at("beta").dump() : std::string{})
                  << " p=" << t.at("p_value").get<double>()
                  << (t.at("reject").get<bool>() ? " REJECT" : " ok") << '\n';
    std::cout << "result:    " << (any_reject ? "FAIL" : "PASS") << '\n';

    json doc{{"run_spec", run_spec_json("stats", o, true)},
             {"version", wr::kVersion},
             {"instance", std::to_string(o.K) + "x" + std::to_string(o.L)},
             {"bc", o.bc},
             {"M", o.M},
             {"beta_grid", betas},
             {"slope", slope},
             {"stderr", slope_stderr},
             {"gamma_formula", wr::gamma_formula(lat)},
             {"tests", std::move(tests)}};
    write_machine(o, doc);
    return any_reject ? kExitCheckFailed : kExitOk;
}

void add_lattice_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--K", o.K, "number of rows (>= 2)")
        ->required()
        ->check(CLI::Range(2, 1'000'000));
    cmd->add_option("--L", o.L, "number of columns (>= 2)")
        ->required()
        ->check(CLI::Range(2, 1'000'000));
    cmd->add_option("--bc", o.bc, "boundary condition")
        ->required()
        ->check(CLI::IsMember({"periodic", "open", "semi"}));
}

void add_model_option(CLI::App* cmd, Options& o) {
    cmd->add_option("--M", o.M, "number of particle types (>= 2)")->check(CLI::Range(2, 120));
}

void add_output_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--out", o.out, "write machine-readable output to this file");
    cmd->add_option("--format", o.format, "machine output format")
        ->check(CLI::IsMember({"json", "csv"}));
}

} // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Widom-Rowlinson lattice model: exact landscape computations, "
                 "Metropolis dynamics, and statistics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("wr_cli ") + wr::kVersion);

    auto* gamma = app.add_subcommand("gamma", "print the closed-form barrier of an instance");
    add_lattice_options(gamma, o);
    add_model_option(gamma, o);
    add_output_options(gamma, o);

    auto* verify = app.add_subcommand(
        "verify", "brute-force the landscape and compare against the closed form");
    add_lattice_options(verify, o);
    add_model_option(verify, o);
    add_output_options(verify, o);

    auto* phi = app.add_subcommand("phi", "communication height between states");
    add_lattice_options(phi, o);
    add_model_option(phi, o);
    add_output_options(phi, o);
    phi->add_option("--from-state", o.from_state,
                    "state file(s): first is the source, the rest are targets "
                    "(default: stable state 1 vs the other stable states)");
    phi->add_flag("--raw", o.raw, "accept inadmissible state files");
    phi->add_flag("--witness", o.witness, "reconstruct a minimax-optimal path");

    auto* simulate = app.add_subcommand("simulate", "sample tunneling times of the chain");
    add_lattice_options(simulate, o);
    add_model_option(simulate, o);
    add_output_options(simulate, o);
    simulate->add_option("--beta", o.beta, "inverse temperature")->check(CLI::NonNegativeNumber);
    simulate->add_option("--n", o.n, "number of samples")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100'000'000}));
    simulate->add_option("--seed", o.seed, "base seed; replica i uses a derived child seed");
    simulate->add_option("--threads", o.threads, "worker threads (0 = logical cores)")
        ->check(CLI::Range(0, 4096));
    simulate->add_option("--from-state", o.from_state, "start state file (default: stable state 1)");
    simulate->add_flag("--raw", o.raw, "accept an inadmissible start state");

    auto* refpath = app.add_subcommand("refpath",
                                       "explicit stable-to-stable path meeting the exact barrier");
    add_lattice_options(refpath, o);
    add_model_option(refpath, o);
    add_output_options(refpath, o);
    refpath->add_option("--from-type", o.from_type, "source stable type (default 1)");
    refpath->add_option("--to-type", o.to_type, "target stable type (default 2)");

    auto* reduce = app.add_subcommand("reduce", "run the seed-to-stable reduction path");
    add_lattice_options(reduce, o);
    add_model_option(reduce, o);
    add_output_options(reduce, o);
    reduce->add_option("--target", o.target_type, "stable type to reduce to (default 1)");
    reduce->add_option("--from-state", o.from_state, "seed state file (default: empty board)");
    reduce->add_flag("--raw", o.raw, "accept an inadmissible seed file");
    reduce->add_flag("--keep-voids", o.keep_voids, "keep void moves in the dump");

    auto* mix = app.add_subcommand("mix", "exact mixing exponent from relaxation times");
    add_lattice_options(mix, o);
    add_model_option(mix, o);
    add_output_options(mix, o);
    mix->add_option("--beta-grid", o.beta_grid, "grid a:b:step (default 2.0:4.0:0.5)");

    auto* stats = app.add_subcommand("stats", "slope, KS, and chi-square tests over sample CSVs");
    add_lattice_options(stats, o);
    add_model_option(stats, o);
    add_output_options(stats, o);
    stats->add_option("samples", o.sample_files, "sample CSV file(s) from the simulate subcommand")
        ->required();
    stats->add_option("--start-type", o.start_type,
                      "stable type the samples started from (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (gamma->parsed()) return run_gamma(o);
        if (verify->parsed()) return run_verify(o);
        if (phi->parsed()) return run_phi(o);
        if (simulate->parsed()) return run_simulate(o);
        if (refpath->parsed()) return run_refpath(o);
        if (reduce->parsed()) return run_reduce(o);
        if (mix->parsed()) return run_mix(o);
        if (stats->parsed()) return run_stats(o);
    } catch (const wr::capacity_error& e) {
        std::cerr << "error: " << e.what() << '\n'
                  << "hint: reduce K, L, or M so the state space fits the budget.\n";
        return kExitCapacity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
