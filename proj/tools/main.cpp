#include "topoconverge/convergence.hpp"
#include "topoconverge/errors.hpp"
#include "topoconverge/flag_complex.hpp"
#include "topoconverge/graph.hpp"
#include "topoconverge/persistence.hpp"
#include "topoconverge/trainer.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct analyze_options {
    std::string snapshots;
    std::string metrics;
    std::string out_dir = ".";
    std::string distance = "heat";
    topo::pipeline_config cfg;
};

struct ph_options {
    std::string snapshot;
    std::string out_prefix;
    std::string dump_complex_path;
    int max_dim = 3;
    double zeta = 1e-6;
    std::size_t cell_budget = topo::default_cell_budget;
};

struct train_options {
    std::string out_dir;
    std::string dataset = "blobs";
    topo::train_config cfg;
};

int run_analyze(const analyze_options& opt) {
    topo::pipeline_config cfg = opt.cfg;
    cfg.kind = topo::distance_kind_from_string(opt.distance);

    const topo::metric_series metrics = topo::read_metrics(opt.metrics);
    const topo::convergence_report report = topo::analyze_run(opt.snapshots, metrics, cfg);

    std::filesystem::create_directories(opt.out_dir);
    topo::write_file_atomic(std::filesystem::path(opt.out_dir) / "report.csv",
                            topo::report_csv(report));
    topo::write_file_atomic(std::filesystem::path(opt.out_dir) / "summary.csv",
                            topo::summary_csv(report));
    topo::write_file_atomic(std::filesystem::path(opt.out_dir) / "normalized.csv",
                            topo::normalized_csv(report));

    std::printf("pearson_r=%.6f distance=%s pairs=%zu points=%zu\n", report.pearson_r,
                topo::to_string(report.kind), report.distances.size(),
                report.resampled_distance.size());
    return 0;
}

int run_ph(const ph_options& opt) {
    const topo::network_state state = topo::read_snapshot(opt.snapshot);
    const topo::filtered_digraph g = topo::build_graph(state, {opt.zeta});
    const topo::filtered_complex complex =
        topo::build_flag_complex(g, opt.max_dim + 1, opt.cell_budget);

    if (!opt.dump_complex_path.empty()) {
        std::ostringstream dump;
        topo::dump_complex(complex, dump);
        topo::write_file_atomic(opt.dump_complex_path, dump.str());
    }

    const auto diagrams = topo::compute_persistence(complex, opt.max_dim, opt.cell_budget);

    const std::string prefix =
        opt.out_prefix.empty() ? std::filesystem::path(opt.snapshot).stem().string()
                               : opt.out_prefix;
    for (const auto& dgm : diagrams) {
        std::ostringstream csv;
        topo::dump_diagrams({dgm}, csv);
        topo::write_file_atomic(prefix + "_dim" + std::to_string(dgm.dim) + ".csv", csv.str());
    }
    std::printf("wrote %zu diagram files with prefix %s\n", diagrams.size(), prefix.c_str());
    return 0;
}

int run_train(const train_options& opt) {
    topo::train_config cfg = opt.cfg;
    cfg.dataset = topo::dataset_kind_from_string(opt.dataset);
    if (cfg.lr == 0.0)
        std::fprintf(stderr, "warning: lr=0, weights will not change and all snapshots will be identical\n");

    const topo::metric_series metrics = topo::train(cfg, opt.out_dir);
    std::printf("trained %d epochs on %s; final val_accuracy=%.4f; %zu metric points in %s\n",
                cfg.epochs, topo::to_string(cfg.dataset),
                metrics.points.empty() ? 0.0 : metrics.points.back().val_accuracy,
                metrics.points.size(), opt.out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"topoconverge: persistent-homology convergence monitoring for MLP training runs"};
    app.require_subcommand(1);

    analyze_options a;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "compute consecutive-diagram distances for a snapshot directory");
    analyze->add_option("--snapshots", a.snapshots, "directory of step_*.nnph snapshots")
        ->required();
    analyze->add_option("--metrics", a.metrics, "metrics CSV (step,val_accuracy)")->required();
    analyze->add_option("--out-dir", a.out_dir, "output directory for report CSVs")
        ->capture_default_str();
    analyze
        ->add_option("--distance", a.distance, "heat | silhouette | bottleneck | wasserstein")
        ->capture_default_str();
    analyze->add_option("--max-dim", a.cfg.max_dim, "highest homology dimension")
        ->capture_default_str();
    analyze->add_option("--eta", a.cfg.eta, "minimum interval lifespan")->capture_default_str();
    analyze->add_option("--inf-replacement", a.cfg.inf_replacement, "death value for infinite intervals")
        ->capture_default_str();
    analyze->add_option("--n-bins", a.cfg.n_bins, "vectorization grid resolution")
        ->capture_default_str();
    analyze->add_option("--sigma", a.cfg.sigma, "heat kernel bandwidth")->capture_default_str();
    analyze->add_option("--power", a.cfg.power, "silhouette weight power")->capture_default_str();
    analyze->add_option("--wasserstein-p", a.cfg.wasserstein_p, "wasserstein order")
        ->capture_default_str();
    analyze
        ->add_option("--correlation-points", a.cfg.correlation_points,
                     "resampled points for the correlation")
        ->capture_default_str();
    analyze->add_option("--zeta", a.cfg.zeta, "normalization smoothing constant")
        ->capture_default_str();
    analyze->add_option("--cell-budget", a.cfg.cell_budget, "flag complex cell budget")
        ->envname("TOPOCONVERGE_CELL_BUDGET")
        ->capture_default_str();
    analyze->add_option("--jobs", a.cfg.jobs, "parallel snapshot workers (0 = auto)")
        ->capture_default_str();

    ph_options p;
    CLI::App* ph = app.add_subcommand("ph", "persistence diagrams of a single snapshot");
    ph->add_option("--snapshot", p.snapshot, "NNPH snapshot file")->required();
    ph->add_option("--out-prefix", p.out_prefix, "output prefix (default: snapshot stem)");
    ph->add_option("--max-dim", p.max_dim, "highest homology dimension")->capture_default_str();
    ph->add_option("--zeta", p.zeta, "normalization smoothing constant")->capture_default_str();
    ph->add_option("--cell-budget", p.cell_budget, "flag complex cell budget")
        ->envname("TOPOCONVERGE_CELL_BUDGET")
        ->capture_default_str();
    ph->add_option("--dump-complex", p.dump_complex_path,
                   "also dump the filtered complex (one cell per line)");

    train_options t;
    CLI::App* train = app.add_subcommand("train-demo", "train a toy MLP, writing snapshots per batch");
    train->add_option("--out-dir", t.out_dir, "output directory")->required();
    train->add_option("--hidden", t.cfg.hidden_sizes, "hidden layer sizes")
        ->delimiter(',')
        ->capture_default_str();
    train->add_option("--dropout", t.cfg.dropout, "dropout rate in [0,1)")->capture_default_str();
    train->add_option("--lr", t.cfg.lr, "RMSProp learning rate")->capture_default_str();
    train->add_option("--batch-size", t.cfg.batch_size, "batch size")->capture_default_str();
    train->add_option("--epochs", t.cfg.epochs, "training epochs")->capture_default_str();
    train->add_option("--seed", t.cfg.seed, "master seed")->capture_default_str();
    train->add_option("--dataset", t.dataset, "blobs | xor | rings")->capture_default_str();
    train->add_option("--snapshot-every", t.cfg.snapshot_every, "batches between snapshots")
        ->capture_default_str();
    train->add_option("--n-samples", t.cfg.n_samples, "dataset size")->capture_default_str();
    train->add_option("--shuffle-seed", t.cfg.shuffle_seed,
                      "override the input-order stream (-1: derive from --seed)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) return run_analyze(a);
        if (ph->parsed()) return run_ph(p);
        if (train->parsed()) return run_train(t);
    } catch (const topo::capacity_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
