// sparsekf command line: truth trajectories, single verbose runs, replicate
// benchmarks and the standard comparison table.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sparsekf/sparsekf.hpp"

using namespace sparsekf;

namespace {

struct Options {
    ExperimentConfig config;
    std::string filter = "sukf";
    std::string output;
    std::string summary;
    std::size_t replicate = 0;
    std::size_t workers = 0;
    std::string table = "all";
};

void add_config_options(CLI::App& app, Options& o) {
    auto& c = o.config;
    app.add_option("--n", c.n, "state dimension")->capture_default_str();
    app.add_option("--forcing", c.forcing, "Lorenz-96 forcing F")->capture_default_str();
    app.add_option("--dt", c.dt, "model time step")->capture_default_str();
    app.add_option("--steps", c.steps, "assimilation cycles per replicate")->capture_default_str();
    app.add_option("--replicates", c.replicates, "independent replicates")->capture_default_str();
    app.add_option("--obs_stride", c.obs_stride, "observe every k-th state entry")->capture_default_str();
    app.add_option("--obs_interval", c.obs_interval, "observe every k-th cycle")->capture_default_str();
    app.add_option("--obs_variance", c.obs_variance, "observation noise variance")->capture_default_str();
    app.add_option("--init_range", c.init_range, "truth x(0) uniform on [-r, r]")->capture_default_str();
    app.add_option("--init_variance", c.init_variance, "initial covariance scale")->capture_default_str();
    app.add_option("--filter", o.filter, "sukf, pekf, enkf or ukf")
        ->check(CLI::IsMember({"sukf", "pekf", "enkf", "ukf"}))
        ->capture_default_str();
    app.add_option("--nsp", c.nsp, "nonzeros per covariance column (odd)")->capture_default_str();
    app.add_option("--np", c.np, "progressive EKF sub-steps")->capture_default_str();
    app.add_option("--delta", c.delta, "progressive EKF finite-difference step")->capture_default_str();
    app.add_option("--kappa", c.kappa, "UKF kappa")->capture_default_str();
    app.add_option("--q", c.q, "model error variance")->capture_default_str();
    app.add_option("--ensemble", c.ensemble, "EnKF members")->capture_default_str();
    app.add_option("--radius", c.radius, "EnKF localization radius")->capture_default_str();
    app.add_option("--inflation", c.inflation, "EnKF variance inflation")->capture_default_str();
    app.add_option("--seed", c.seed, "master seed")->capture_default_str();
}

// Opens `path` for writing, or returns stdout for an empty path / "-".
std::ostream& open_output(const std::string& path, std::unique_ptr<std::ofstream>& holder) {
    if (path.empty() || path == "-") return std::cout;
    holder = std::make_unique<std::ofstream>(path);
    if (!*holder) throw std::runtime_error("cannot open " + path + " for writing");
    return *holder;
}

void cmd_truth(const Options& o) {
    const auto traj = generate_truth(o.config, o.replicate);
    std::unique_ptr<std::ofstream> file;
    std::ostream& os = open_output(o.output, file);
    os << "k";
    for (std::size_t i = 1; i <= o.config.n; ++i) os << ",x" << i;
    os << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << k;
        for (Eigen::Index i = 0; i < traj[k].size(); ++i) os << ',' << format_number(traj[k][i]);
        os << '\n';
    }
}

int cmd_run(const Options& o) {
    std::unique_ptr<std::ofstream> file;
    std::ostream& os = open_output(o.output, file);
    os << "k,error,gamma,min_eigenvalue,jitter,evaluations,innovation_norm\n";
    const auto r = run_replicate(o.config, o.replicate, [&](std::size_t k, const Eigen::VectorXd& xa,
                                                            const Eigen::VectorXd& truth, const CycleDiagnostics& d) {
        const double err = (xa - truth).norm() / std::sqrt(static_cast<double>(xa.size()));
        os << k << ',' << format_number(err) << ',' << format_number(d.gamma) << ',' << format_number(d.min_eigenvalue)
           << ',' << format_number(d.jitter) << ',' << d.evaluations << ',' << format_number(d.innovation_norm) << '\n';
    });
    if (r.failed) {
        std::cerr << "replicate " << r.replicate << " failed: " << r.error << '\n';
        return 2;
    }
    std::cerr << filter_name(o.config.filter) << ' ' << o.config.param_label() << " replicate " << r.replicate
              << " rmse " << format_number(r.rmse) << " eval_per_cycle " << format_number(r.eval_per_cycle)
              << " gamma_activations " << r.gamma_activations << '\n';
    return 0;
}

void emit(const Options& o, const std::vector<RunSummary>& runs) {
    if (!o.output.empty()) {
        std::unique_ptr<std::ofstream> file;
        write_replicates_csv(open_output(o.output, file), runs);
    }
    std::unique_ptr<std::ofstream> file;
    write_summary_csv(open_output(o.summary, file), runs);
}

RunSummary bench_one(const ExperimentConfig& c, std::size_t workers) {
    RunSummary s = run_experiment(c, workers);
    std::cerr << filter_name(c.filter) << ' ' << c.param_label() << ": median " << format_number(s.rmse.median)
              << ", failed " << s.failed << '/' << c.replicates << '\n';
    return s;
}

void cmd_bench(const Options& o) { emit(o, {bench_one(o.config, o.workers)}); }

// The comparison rows: sparse UKF and EnKF, then the progressive EKF sweep.
std::vector<ExperimentConfig> table_rows(const ExperimentConfig& base, const std::string& which) {
    std::vector<ExperimentConfig> rows;
    auto add = [&](FilterKind kind, std::size_t nsp, int np) {
        ExperimentConfig c = base;
        c.filter = kind;
        c.nsp = nsp;
        c.np = np;
        rows.push_back(c);
    };
    if (which == "1" || which == "all") {
        add(FilterKind::sparse_ukf, 7, 1);
        add(FilterKind::sparse_ukf, 11, 1);
        add(FilterKind::enkf, base.nsp, 1);
    }
    if (which == "2" || which == "all") {
        add(FilterKind::progressive_ekf, 7, 1);
        add(FilterKind::progressive_ekf, 11, 1);
        add(FilterKind::progressive_ekf, 11, 2);
        add(FilterKind::progressive_ekf, 17, 2);
    }
    return rows;
}

void cmd_table(const Options& o) {
    std::vector<RunSummary> runs;
    for (const auto& c : table_rows(o.config, o.table)) runs.push_back(bench_one(c, o.workers));
    emit(o, runs);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse UKF and progressive EKF twin experiments on Lorenz-96"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key = value file; keys are the option names");

    Options o;
    add_config_options(app, o);
    app.add_option("--replicate", o.replicate, "replicate index for truth/run")->capture_default_str();
    app.add_option("--workers", o.workers, "worker threads (0: SPARSEKF_THREADS or all cores)");
    app.add_option("-o,--output", o.output, "per-cycle / per-replicate CSV path");
    app.add_option("--summary", o.summary, "summary CSV path (default stdout)");

    auto* truth = app.add_subcommand("truth", "write a truth trajectory as CSV")->fallthrough();
    auto* run = app.add_subcommand("run", "one replicate with per-cycle diagnostics")->fallthrough();
    auto* bench = app.add_subcommand("bench", "all replicates of one configuration")->fallthrough();
    auto* table = app.add_subcommand("table", "the standard comparison rows")->fallthrough();
    table->add_option("--rows", o.table, "1 (sparse UKF, EnKF), 2 (progressive EKF) or all")
        ->check(CLI::IsMember({"1", "2", "all"}))
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        o.config.filter = parse_filter(o.filter);
        o.config.validate();
        if (*truth) cmd_truth(o);
        if (*run) return cmd_run(o);
        if (*bench) cmd_bench(o);
        if (*table) cmd_table(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
