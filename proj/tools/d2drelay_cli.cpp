// d2drelay: command-line front end. Every command reads an optional config,
// writes CSV outputs plus resolved.ini and manifest.json into --out.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "d2drelay/csv.hpp"
#include "d2drelay/errors.hpp"
#include "d2drelay/parallel.hpp"
#include "d2drelay/scenario_config.hpp"
#include "d2drelay/seeding.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace d2drelay;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_numerical = 3;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out_dir = ".";
    bool dump_network = false;
    double occupation_p = 0.75;
};

class RunContext {
public:
    RunContext(std::string command, ScenarioConfig config, fs::path dir)
        : command_(std::move(command)), config_(std::move(config)), dir_(std::move(dir)),
          start_(std::chrono::steady_clock::now()) {
        fs::create_directories(dir_);
    }

    const ScenarioConfig& config() const { return config_; }

    std::ofstream open(const std::string& name) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
        outputs_.emplace_back(name);
        return out;
    }

    // Summary lines go both to stdout and summary.txt.
    void summary(const std::string& line) { summary_ += line + '\n'; }

    void finish(std::vector<std::pair<std::string, std::string>> options = {}) {
        if (!summary_.empty()) {
            open("summary.txt") << summary_;
            std::cout << summary_;
        }
        cli::RunManifest m;
        m.command = command_;
        m.resolved_config = config_.to_ini();
        m.options = std::move(options);
        m.seed = config_.percolation.seed;
        m.version = D2DRELAY_VERSION;
        m.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        m.outputs = outputs_;
        cli::write_manifest(dir_, m);
    }

private:
    std::string command_;
    ScenarioConfig config_;
    fs::path dir_;
    std::chrono::steady_clock::time_point start_;
    std::vector<fs::path> outputs_;
    std::string summary_;
};

std::optional<unsigned> env_threads() {
    const char* raw = std::getenv("D2DRELAY_THREADS");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    char* end = nullptr;
    unsigned long v = std::strtoul(raw, &end, 10);
    if (*end != '\0') throw std::invalid_argument("D2DRELAY_THREADS must be a non-negative integer");
    return static_cast<unsigned>(v);
}

ScenarioConfig resolve(const Options& opt) {
    ScenarioConfig config = opt.config_path.empty() ? ScenarioConfig{} : load_config(opt.config_path);
    if (opt.seed) config.percolation.seed = *opt.seed;
    if (auto t = env_threads()) config.percolation.threads = *t;
    if (opt.threads) config.percolation.threads = *opt.threads;
    config.validate();
    return config;
}

std::string fmt(double v) { return csv::number(v); }

void cmd_occupation(RunContext& run) {
    const ScenarioConfig& c = run.config();
    const auto lambdas = parse_grid(c.crossroad.lambda_grid);
    const auto ps = parse_grid(c.crossroad.p_grid);
    std::vector<csv::OccupationRow> rows;
    rows.reserve(lambdas.size() * ps.size());
    for (double lambda : lambdas) {
        const double vacancy = mean_vacancy(lambda, c.geometry());
        for (double p : ps) rows.push_back({lambda, p, occupation_from_vacancy(p, vacancy)});
    }
    auto out = run.open("occupation.csv");
    csv::write_occupation(out, rows);
}

std::string pstar_line(const PercolationEstimate& est) {
    std::string line = "p_star=" + fmt(est.p_star_hat) + " se=" + fmt(est.std_error);
    if (est.never_percolates) line += " never_percolates";
    if (est.always_percolates) line += " always_percolates";
    return line;
}

void cmd_pstar(RunContext& run) {
    const ScenarioConfig& c = run.config();
    PercolationEstimate est = estimate_p_star(c.percolation_setup(), c.percolation.replicates,
                                              c.percolation.seed, c.estimate_options());
    {
        auto out = run.open("crossing_curve.csv");
        csv::write_crossing_curve(out, est.crossing_curve);
    }
    run.summary(pstar_line(est));
}

void cmd_relay_curve(RunContext& run) {
    const ScenarioConfig& c = run.config();
    RelayCurveSetup setup;
    setup.percolation = c.percolation_setup();
    setup.street_width_m = c.crossroad.street_width_m;
    setup.replicates = c.percolation.replicates;
    setup.seed = c.percolation.seed;
    setup.estimate = c.estimate_options();
    const auto grid = parse_grid(c.percolation.lambda_grid);
    auto rows = relay_curve(grid, setup);
    auto out = run.open("relay_curve.csv");
    csv::write_relay_curve(out, rows);
}

void cmd_econ(RunContext& run) {
    const ScenarioConfig& c = run.config();
    CashFlowSeries series = cumulated_revenue(c.economics);
    {
        auto out = run.open("cash_flow.csv");
        csv::write_cash_flow(out, series);
    }
    for (const auto& w : series.warnings) std::cerr << "warning: " << w << '\n';
    run.summary("roi_month=" + (series.roi_month ? std::to_string(*series.roi_month) : "never"));

    if (c.economics_tuning_check) {
        PercolationSetup setup = c.percolation_setup();
        setup.lambda_per_km = user_density(c.economics.t_critical, c.economics);
        PercolationEstimate est = estimate_p_star(setup, c.percolation.replicates,
                                                  c.percolation.seed, c.estimate_options());
        RelayPlan plan = minimal_relay_proportion(est, c.geometry());
        TuningReport rep = tuning_check(c.economics, plan);
        run.summary("tuning lambda=" + fmt(rep.lambda_at_critical) + " p_c=" + fmt(rep.p_c) +
                    " p_max=" + fmt(rep.p_max) + " deviation=" + fmt(rep.deviation) +
                    (rep.flagged ? " flagged" : " ok"));
    }
}

void cmd_dump_streets(RunContext& run, const Options& opt) {
    const ScenarioConfig& c = run.config();
    const std::uint64_t seed = c.percolation.seed;
    StreetSystem streets = generate_pvt(c.street.gamma, c.window(),
                                        derive_seed(seed, SeedStream::street));
    {
        auto out = run.open("vertices.csv");
        csv::write_vertices(out, streets);
    }
    {
        auto out = run.open("edges.csv");
        csv::write_edges(out, streets);
    }
    StreetStats stats = street_stats(streets);
    run.summary("vertices=" + std::to_string(stats.vertex_count) + " edges=" +
                std::to_string(stats.edge_count) + " length_intensity=" +
                fmt(stats.length_intensity_hat) + " vertex_intensity=" + fmt(stats.vertex_intensity_hat));
    if (!opt.dump_network) return;
    NetworkParams params{c.network.lambda_per_km, opt.occupation_p, c.network.range_km};
    NetworkRealization net = realize_network(streets, params, seed);
    ConnectivityGraph g = build_graph(net);
    {
        auto out = run.open("network_nodes.csv");
        csv::write_graph_nodes(out, g);
    }
    {
        auto out = run.open("network_links.csv");
        csv::write_graph_links(out, g);
    }
    run.summary("users=" + std::to_string(net.users.size()) + " relays=" +
                std::to_string(net.occupied_vertices.size()) + " links=" + std::to_string(g.link_count()));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relay planning for D2D street networks", "d2drelay"};
    app.set_version_flag("--version", std::string(D2DRELAY_VERSION));
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "Scenario file (ini sections)")
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "Master seed (overrides percolation.seed)");
        sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--threads", opt.threads, "Worker threads, 0 = all cores");
    };

    auto* occ = app.add_subcommand("occupation", "Crossroad occupation grid F(lambda, p)");
    auto* pstar = app.add_subcommand("pstar", "Percolation threshold and crossing curve");
    auto* relay = app.add_subcommand("relay-curve", "p* and minimal relay proportions over lambda");
    auto* econ = app.add_subcommand("econ", "Deployment schedule, cash flow and ROI");
    auto* dump = app.add_subcommand("dump-streets", "One street system as vertex/edge CSV");
    for (auto* sub : {occ, pstar, relay, econ, dump}) add_common(sub);
    dump->add_flag("--dump-network", opt.dump_network, "Also write users, relays and links");
    dump->add_option("--occupation", opt.occupation_p, "Relay probability for --dump-network")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        ScenarioConfig config = resolve(opt);
        CLI::App* sub = app.get_subcommands().front();
        RunContext run(sub->get_name(), config, opt.out_dir);
        std::vector<std::pair<std::string, std::string>> extra;
        if (sub == occ) {
            cmd_occupation(run);
        } else if (sub == pstar) {
            cmd_pstar(run);
        } else if (sub == relay) {
            cmd_relay_curve(run);
        } else if (sub == econ) {
            cmd_econ(run);
        } else {
            cmd_dump_streets(run, opt);
            extra = {{"dump_network", opt.dump_network ? "true" : "false"},
                     {"occupation", fmt(opt.occupation_p)}};
        }
        run.finish(extra);
    } catch (const FiniteSizeError& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return exit_numerical;
    } catch (const DegenerateInputError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const ValidationError& e) {
        std::cerr << "invalid configuration:\n";
        for (const auto& v : e.violations()) std::cerr << "  violated: " << v << '\n';
        return exit_usage;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_ok;
}
