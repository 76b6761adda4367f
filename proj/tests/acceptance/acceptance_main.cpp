// Acceptance suite: one binary, one printed pass/fail line per criterion.
// Returns the number of failed criteria.

#include "topoconverge/convergence.hpp"
#include "topoconverge/diagram.hpp"
#include "topoconverge/errors.hpp"
#include "topoconverge/flag_complex.hpp"
#include "topoconverge/graph.hpp"
#include "topoconverge/persistence.hpp"
#include "topoconverge/trainer.hpp"

#include "../test_helpers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("%s  criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

topo::filtered_digraph triangle(double f, bool transitive) {
    topo::filtered_digraph g;
    g.vertex_count = 3;
    if (transitive)
        g.edges = {{0, 1, f}, {0, 2, f}, {1, 2, f}};
    else
        g.edges = {{0, 1, f}, {1, 2, f}, {2, 0, f}};
    return g;
}

// ---------------------------------------------------------------------------

void criterion_1_homology_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    topo::splitmix64 rng(20240901);
    std::size_t graphs_checked = 0, levels_checked = 0;
    bool ok = true;
    std::string why;

    for (int trial = 0; trial < 200 && ok; ++trial) {
        const std::uint32_t n = 4 + static_cast<std::uint32_t>(rng.below(7)); // 4..10
        const double density = trial % 2 ? 0.2 : 0.4;
        const auto g = topotest::random_digraph(n, density, rng);
        const auto complex = topo::build_flag_complex(g, 4);
        const auto diagrams = topo::compute_persistence(complex, 3);

        std::set<double> levels{1.0};
        for (const auto& per_dim : complex.cells)
            for (const auto& cell : per_dim) levels.insert(cell.filtration);

        for (double eps : levels) {
            const auto fast = topo::betti_at(diagrams, eps);
            const auto slow = topo::brute_force_betti(complex, eps);
            for (int k = 0; k <= 3; ++k) {
                if (fast.betti[k] != slow.betti[k]) {
                    ok = false;
                    why = "mismatch at trial " + std::to_string(trial) + " dim " +
                          std::to_string(k) + " eps " + std::to_string(eps);
                }
            }
            ++levels_checked;
        }
        ++graphs_checked;
    }

    const double dt = seconds_since(t0);
    if (ok && dt >= 60.0) {
        ok = false;
        why = "runtime over budget";
    }
    if (ok)
        why = std::to_string(graphs_checked) + " graphs, " + std::to_string(levels_checked) +
              " filtration levels, " + std::to_string(dt).substr(0, 5) + "s";
    report(1, "homology equals the rank oracle on random digraphs", ok, why);
}

void criterion_2_directed_flag_semantics() {
    const auto cycle =
        topo::compute_persistence(topo::build_flag_complex(triangle(0.4, false), 4), 3);
    const auto tournament =
        topo::compute_persistence(topo::build_flag_complex(triangle(0.5, true), 4), 3);

    topo::filtered_digraph pair;
    pair.vertex_count = 2;
    pair.edges = {{0, 1, 0.2}, {1, 0, 0.2}};
    const auto reciprocal = topo::compute_persistence(topo::build_flag_complex(pair, 4), 3);

    const bool ok = topo::betti_at(cycle, 1.0).betti[1] == 1 &&
                    topo::betti_at(tournament, 1.0).betti[1] == 0 &&
                    topo::betti_at(reciprocal, 1.0).betti[1] == 1;
    report(2, "directed 3-cycle, transitive tournament, reciprocal pair", ok,
           ok ? "beta1 = 1 / 0 / 1" : "wrong beta1");
}

void criterion_3_matching_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    topo::splitmix64 rng(20240903);
    bool ok = true;
    std::string why;
    double worst = 0.0;

    for (int trial = 0; trial < 200 && ok; ++trial) {
        const auto d1 = topotest::random_diagram(static_cast<int>(rng.below(7)), rng);
        const auto d2 = topotest::random_diagram(static_cast<int>(rng.below(7)), rng);
        const auto oracle = topotest::enumerate_matchings(d1, d2);
        const double db = topo::bottleneck(d1, d2);
        const double w1 = topo::wasserstein(d1, d2, 1.0);
        const double w2 = topo::wasserstein(d1, d2, 2.0);
        const double err = std::max({std::abs(db - oracle.bottleneck),
                                     std::abs(w1 - oracle.wasserstein_p1),
                                     std::abs(w2 - oracle.wasserstein_p2)});
        worst = std::max(worst, err);
        if (err > 1e-9) {
            ok = false;
            why = "error " + std::to_string(err) + " at trial " + std::to_string(trial);
        }
    }

    const double dt = seconds_since(t0);
    if (ok && dt >= 30.0) {
        ok = false;
        why = "runtime over budget";
    }
    if (ok)
        why = "200 pairs, max deviation " + std::to_string(worst) + ", " +
              std::to_string(dt).substr(0, 5) + "s";
    report(3, "bottleneck/wasserstein match exhaustive enumeration", ok, why);
}

void criterion_4_vectorization_closed_forms() {
    bool ok = true;
    std::string why = "silhouette==tent, heat closed form, zero diagonal";

    const topo::clean_diagram single{0, {{0.15, 0.85}}};
    const auto curve = topo::silhouette(single, 1.0, 100);
    for (int i = 0; i < 100 && ok; ++i) {
        const double t = topo::grid_point(i, 100);
        if (std::abs(curve.values[i] - topo::tent(single.intervals[0], t)) > 1e-12) {
            ok = false;
            why = "silhouette deviates from tent";
        }
    }

    const double sigma = 0.1, tau = sigma * sigma / 2.0;
    const topo::clean_diagram point{0, {{0.2, 0.8}}};
    const double gap2 = 2.0 * 0.36;
    const double closed = (1.0 - std::exp(-gap2 / (4.0 * tau))) / (4.0 * 3.14159265358979323846 * tau);
    if (ok && std::abs(topo::heat_value(point, sigma, 0.2, 0.8) - closed) > 1e-9) {
        ok = false;
        why = "heat value deviates from the closed form";
    }

    if (ok) {
        topo::splitmix64 rng(20240904);
        const auto d = topotest::random_diagram(7, rng);
        const auto img = topo::heat(d, sigma, 64);
        for (int i = 0; i < 64; ++i)
            if (std::abs(img.at(i, i)) > 1e-12) {
                ok = false;
                why = "heat image diagonal is not zero";
            }
    }
    report(4, "vectorization closed forms", ok, why);
}

void criterion_5_stability() {
    const double delta = 0.01;
    topo::splitmix64 rng(20240905);
    bool ok = true;
    std::string why;
    double worst = 0.0;

    auto cleaned_for_bottleneck = [](const std::vector<topo::persistence_diagram>& diagrams) {
        std::vector<topo::clean_diagram> out;
        for (const auto& dgm : diagrams) {
            topo::clean_diagram cd = topo::clean(dgm, 0.0, 1.0);
            // zero-persistence points sit on the diagonal and cannot move any
            // bottleneck distance; dropping them keeps diagrams small
            std::erase_if(cd.intervals,
                          [](const topo::persistence_interval& iv) { return iv.birth == iv.death; });
            out.push_back(std::move(cd));
        }
        return out;
    };

    for (int trial = 0; trial < 50 && ok; ++trial) {
        const auto g = topotest::random_digraph(8, 0.3, rng);
        topo::filtered_digraph perturbed = g;
        for (auto& e : perturbed.edges)
            e.filtration = std::clamp(e.filtration + rng.uniform(-delta, delta), 1e-6, 1.0);

        const auto base =
            cleaned_for_bottleneck(topo::compute_persistence(topo::build_flag_complex(g, 4), 3));
        const auto moved = cleaned_for_bottleneck(
            topo::compute_persistence(topo::build_flag_complex(perturbed, 4), 3));

        for (int k = 0; k <= 3 && ok; ++k) {
            const double d = topo::bottleneck(base[k], moved[k]);
            worst = std::max(worst, d);
            if (d > delta + 1e-9) {
                ok = false;
                why = "dim " + std::to_string(k) + " moved " + std::to_string(d) + " at trial " +
                      std::to_string(trial);
            }
        }
    }
    if (ok) why = "50 trials, worst movement " + std::to_string(worst);
    report(5, "bottleneck stability under filtration noise", ok, why);
}

void criterion_6_gradient_check() {
    topo::splitmix64 rng(20240906);
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        topo::train_config cfg;
        cfg.dropout = 0.0;
        cfg.seed = rng.next_u64();
        switch (rng.below(3)) {
        case 0: cfg.hidden_sizes = {2}; break;
        case 1: cfg.hidden_sizes = {4}; break;
        default: cfg.hidden_sizes = {3, 3}; break;
        }
        worst = std::max(worst, topo::gradient_check(cfg));
    }
    ok = worst <= 1e-4;
    report(6, "analytic gradients match finite differences", ok,
           "max relative error " + std::to_string(worst));
}

struct demo_runs {
    topotest::temp_dir dir{"acceptance"};
    std::vector<std::filesystem::path> seed_runs; // seeds 0..4
    std::filesystem::path shuffled_run;           // seed 0, different input order
};

topo::train_config demo_cfg(std::uint64_t seed) {
    topo::train_config cfg;
    cfg.hidden_sizes = {16, 16};
    cfg.lr = 0.01;
    cfg.epochs = 10;
    cfg.snapshot_every = 1;
    cfg.seed = seed;
    cfg.dataset = topo::dataset_kind::blobs;
    return cfg;
}

void run_demos(demo_runs& runs) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto out = runs.dir.path / ("seed" + std::to_string(seed));
        topo::train(demo_cfg(seed), out);
        runs.seed_runs.push_back(out);
    }
    topo::train_config shuffled = demo_cfg(0);
    shuffled.shuffle_seed = 12345;
    runs.shuffled_run = runs.dir.path / "shuffled";
    topo::train(shuffled, runs.shuffled_run);
}

void criterion_7_end_to_end(const demo_runs& runs, std::vector<topo::convergence_report>& reports) {
    const auto t0 = std::chrono::steady_clock::now();
    topo::pipeline_config cfg; // defaults: heat distance, 20 points
    int good = 0;
    std::string rs;
    for (const auto& run : runs.seed_runs) {
        const auto metrics = topo::read_metrics(run / "metrics.csv");
        const auto report = topo::analyze_run(run, metrics, cfg);
        if (report.pearson_r >= 0.6) ++good;
        rs += (rs.empty() ? "r=" : ",") + std::to_string(report.pearson_r).substr(0, 5);
        reports.push_back(report);
    }
    const double dt = seconds_since(t0);
    bool ok = good >= 4;
    if (ok && dt >= 600.0) {
        ok = false;
        rs = "runtime over budget";
    }
    report(7, "cumulative heat distance correlates with validation accuracy", ok,
           rs + "; " + std::to_string(good) + "/5 seeds >= 0.6, " +
               std::to_string(dt).substr(0, 5) + "s");
}

void criterion_8_input_order_control(const demo_runs& runs,
                                     const std::vector<topo::convergence_report>& reports) {
    const auto t0 = std::chrono::steady_clock::now();
    topo::pipeline_config cfg;
    const auto metrics = topo::read_metrics(runs.shuffled_run / "metrics.csv");
    const auto shuffled = topo::analyze_run(runs.shuffled_run, metrics, cfg);

    // compare the resampled cumulative curves of the two input orders
    const double r = topo::pearson(reports[0].resampled_distance, shuffled.resampled_distance);
    const double dt = seconds_since(t0);
    bool ok = r >= 0.9;
    if (ok && dt >= 600.0) ok = false;
    report(8, "input order does not disturb the cumulative curve", ok,
           "pearson " + std::to_string(r) + ", " + std::to_string(dt).substr(0, 5) + "s");
}

void criterion_9_determinism(const demo_runs& runs) {
    topo::pipeline_config cfg;
    cfg.jobs = 2;
    const auto metrics = topo::read_metrics(runs.seed_runs[0] / "metrics.csv");
    const auto r1 = topo::analyze_run(runs.seed_runs[0], metrics, cfg);
    cfg.jobs = 1;
    const auto r2 = topo::analyze_run(runs.seed_runs[0], metrics, cfg);
    const bool ok = topo::report_csv(r1) == topo::report_csv(r2) &&
                    topo::summary_csv(r1) == topo::summary_csv(r2) &&
                    topo::normalized_csv(r1) == topo::normalized_csv(r2);
    report(9, "repeated analyze is byte-identical", ok, ok ? "3 CSVs compared" : "CSVs differ");
}

void criterion_10_normalization_battery() {
    bool ok = topo::normalize_weight(0.0, 5.0) == 1.0 &&
              topo::normalize_weight(5.0, 5.0, {1e-6}) == 1e-6 &&
              std::abs(topo::normalize_weight(-2.5, 5.0) - 0.5) < 1e-15;
    std::string why = ok ? "unit values exact" : "unit value wrong";

    if (ok) {
        topo::splitmix64 rng(20240910);
        topo::network_state s;
        s.layers.push_back({3, 2, {}, {}});
        s.layers[0].weights.resize(6);
        for (auto& w : s.layers[0].weights) w = static_cast<float>(rng.uniform(-2, 2));
        s.layers[0].bias = {0.5f, -1.0f, 0.25f};
        const auto base = topo::build_graph(s);
        for (const double lambda : {2.0, 0.5, 8.0}) {
            topo::network_state scaled = s;
            for (auto& w : scaled.layers[0].weights) w = static_cast<float>(w * lambda);
            for (auto& b : scaled.layers[0].bias) b = static_cast<float>(b * lambda);
            const auto g = topo::build_graph(scaled);
            if (g.edges.size() != base.edges.size()) ok = false;
            for (std::size_t i = 0; ok && i < g.edges.size(); ++i)
                ok = g.edges[i].src == base.edges[i].src && g.edges[i].dst == base.edges[i].dst &&
                     g.edges[i].filtration == base.edges[i].filtration;
            if (!ok) why = "scale invariance violated";
        }
        if (ok) why = "unit values exact, scale invariance exact";
    }
    report(10, "normalization unit battery and scale invariance", ok, why);
}

} // namespace

int main() {
    std::puts("topoconverge acceptance suite");

    criterion_1_homology_oracle();
    criterion_2_directed_flag_semantics();
    criterion_3_matching_oracle();
    criterion_4_vectorization_closed_forms();
    criterion_5_stability();
    criterion_6_gradient_check();

    demo_runs runs;
    run_demos(runs);
    std::vector<topo::convergence_report> reports;
    criterion_7_end_to_end(runs, reports);
    criterion_8_input_order_control(runs, reports);
    criterion_9_determinism(runs);
    criterion_10_normalization_battery();

    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures;
}
