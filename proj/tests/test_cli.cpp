// End-to-end checks of the command-line binary: exit codes, produced files,
// determinism. The binary path is injected by the build.

#include "topoconverge/rng.hpp"
#include "topoconverge/snapshot.hpp"

#include "test_helpers.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::cerr << "FAILED: " << what << "\n";
    }
}

int run_cli(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd =
        env_prefix + std::string(TOPOCONVERGE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// snapshot with enough parameters that cleaned diagrams blow the exact
// distance cap
void write_wide_snapshot(const std::filesystem::path& path, std::uint64_t seed) {
    topo::splitmix64 rng(seed);
    topo::network_state s;
    topo::layer_weights l{30, 30, {}, {}};
    l.weights.resize(900);
    for (auto& w : l.weights) w = static_cast<float>(rng.uniform(-1.0, 1.0));
    s.layers.push_back(std::move(l));
    topo::write_snapshot(s, path);
}

} // namespace

int main() {
    check(run_cli("--help") == 0, "--help exits 0");
    check(run_cli("analyze") == 2, "missing required flags exit 2");
    check(run_cli("nonsense") == 2, "unknown subcommand exits 2");

    topotest::temp_dir work("cli");
    const auto run_dir = work.path / "run";
    const auto out_dir = work.path / "out";

    // train-demo: tiny but real
    const std::string train_args = "train-demo --out-dir " + run_dir.string() +
                                   " --hidden 4 --epochs 2 --batch-size 16 --n-samples 40";
    check(run_cli(train_args) == 0, "train-demo exits 0");
    check(std::filesystem::exists(run_dir / "metrics.csv"), "train-demo writes metrics.csv");
    check(topo::list_snapshots(run_dir).size() == 5, "train-demo writes 1 + batches snapshots");

    // determinism of the demo trainer through the CLI
    const auto run_dir2 = work.path / "run2";
    const std::string train_args2 = "train-demo --out-dir " + run_dir2.string() +
                                    " --hidden 4 --epochs 2 --batch-size 16 --n-samples 40";
    check(run_cli(train_args2) == 0, "second train-demo exits 0");
    check(slurp(run_dir / "step_00000004.nnph") == slurp(run_dir2 / "step_00000004.nnph"),
          "same seed gives byte-identical snapshots");

    // analyze: happy path
    const std::string analyze_args = "analyze --snapshots " + run_dir.string() + " --metrics " +
                                     (run_dir / "metrics.csv").string() + " --out-dir " +
                                     out_dir.string() + " --n-bins 32";
    check(run_cli(analyze_args) == 0, "analyze exits 0");
    for (const char* name : {"report.csv", "summary.csv", "normalized.csv"})
        check(std::filesystem::exists(out_dir / name), std::string("analyze writes ") + name);

    // byte-identical reports on a second run
    const std::string report_before = slurp(out_dir / "report.csv");
    check(run_cli(analyze_args) == 0, "repeated analyze exits 0");
    check(slurp(out_dir / "report.csv") == report_before, "repeated analyze is byte-identical");

    // analyze: missing metrics file -> exit 2, nothing written
    const auto empty_out = work.path / "never";
    check(run_cli("analyze --snapshots " + run_dir.string() + " --metrics " +
                  (work.path / "nope.csv").string() + " --out-dir " + empty_out.string()) == 2,
          "missing metrics exits 2");
    check(!std::filesystem::exists(empty_out / "report.csv"), "no partial outputs on failure");

    // ph: per-dimension diagram files
    const auto snap = topo::list_snapshots(run_dir).front();
    const auto prefix = (work.path / "dgm").string();
    check(run_cli("ph --snapshot " + snap.string() + " --out-prefix " + prefix) == 0,
          "ph exits 0");
    for (int k = 0; k <= 3; ++k)
        check(std::filesystem::exists(prefix + "_dim" + std::to_string(k) + ".csv"),
              "ph writes dim " + std::to_string(k));
    check(slurp(prefix + "_dim0.csv").rfind("dim,birth,death\n", 0) == 0, "diagram CSV header");
    // dims without intervals still get a header-only file (an MLP digraph has
    // no 3-cliques, so dim 2 is empty)
    check(slurp(prefix + "_dim2.csv") == "dim,birth,death\n", "empty dim is header-only");

    // ph with --max-dim 0 writes only the dim-0 file
    const auto prefix0 = (work.path / "dgm0").string();
    check(run_cli("ph --snapshot " + snap.string() + " --out-prefix " + prefix0 +
                  " --max-dim 0") == 0,
          "ph --max-dim 0 exits 0");
    check(std::filesystem::exists(prefix0 + "_dim0.csv"), "dim-0 file exists");
    check(!std::filesystem::exists(prefix0 + "_dim1.csv"), "no dim-1 file for --max-dim 0");

    // ph on a corrupt file -> exit 2
    const auto bad = work.path / "step_00000000.nnph";
    {
        std::ofstream f(bad, std::ios::binary);
        f << "not a snapshot";
    }
    check(run_cli("ph --snapshot " + bad.string()) == 2, "corrupt snapshot exits 2");

    // exact distances over the cap -> exit 3
    const auto wide_dir = work.path / "wide";
    std::filesystem::create_directories(wide_dir);
    write_wide_snapshot(wide_dir / topo::snapshot_filename(0), 1);
    write_wide_snapshot(wide_dir / topo::snapshot_filename(1), 2);
    {
        topo::metric_series m;
        m.points = {{0, 0.5}, {1, 0.6}};
        topo::write_metrics(m, wide_dir / "metrics.csv");
    }
    check(run_cli("analyze --snapshots " + wide_dir.string() + " --metrics " +
                  (wide_dir / "metrics.csv").string() + " --out-dir " +
                  (work.path / "wide_out").string() + " --distance wasserstein") == 3,
          "oversized exact distance exits 3");

    // tiny cell budget through the environment variable -> exit 3
    check(run_cli("ph --snapshot " + snap.string() + " --out-prefix " +
                      (work.path / "tiny").string(),
                  "TOPOCONVERGE_CELL_BUDGET=3 ") == 3,
          "cell budget env var is honored");

    if (failures == 0) std::puts("cli tests passed");
    return failures == 0 ? 0 : 1;
}
