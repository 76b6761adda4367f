#include "topoconverge/convergence.hpp"

#include "topoconverge/errors.hpp"
#include "topoconverge/graph.hpp"
#include "topoconverge/persistence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace topo {

const char* to_string(distance_kind kind) {
    switch (kind) {
    case distance_kind::heat: return "heat";
    case distance_kind::silhouette: return "silhouette";
    case distance_kind::bottleneck: return "bottleneck";
    case distance_kind::wasserstein: return "wasserstein";
    }
    return "?";
}

distance_kind distance_kind_from_string(const std::string& name) {
    if (name == "heat") return distance_kind::heat;
    if (name == "silhouette") return distance_kind::silhouette;
    if (name == "bottleneck") return distance_kind::bottleneck;
    if (name == "wasserstein") return distance_kind::wasserstein;
    throw parse_error("unknown distance kind: " + name);
}

std::vector<double> resample_to(std::span<const double> x, std::span<const double> y,
                                int n_points) {
    if (x.size() != y.size()) throw std::invalid_argument("x and y must have equal length");
    if (x.size() < 2) throw degenerate_domain("resampling needs at least two points");
    if (n_points < 2) throw std::invalid_argument("n_points must be >= 2");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw degenerate_domain("x must be strictly increasing");

    const double lo = x.front(), hi = x.back();
    std::vector<double> out(n_points);
    std::size_t seg = 0;
    for (int k = 0; k < n_points; ++k) {
        const double pos = lo + (hi - lo) * k / (n_points - 1);
        while (seg + 2 < x.size() && x[seg + 1] < pos) ++seg;
        const double t = (pos - x[seg]) / (x[seg + 1] - x[seg]);
        out[k] = y[seg] + t * (y[seg + 1] - y[seg]);
    }
    return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("pearson needs two equal-length series of >= 2 points");
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a, db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0)
        throw undefined_correlation("zero variance in correlation input");
    return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

std::vector<double> minmax_normalize(std::span<const double> series) {
    if (series.empty()) throw std::invalid_argument("cannot normalize an empty series");
    const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> out(series.size(), 0.0);
    if (hi > lo)
        for (std::size_t i = 0; i < series.size(); ++i) out[i] = (series[i] - lo) / (hi - lo);
    return out;
}

namespace {

// per-snapshot artifact: cleaned diagrams plus the vectorization the
// configured distance needs
struct snapshot_features {
    std::vector<clean_diagram> cleaned;
    std::vector<silhouette_curve> silhouettes;
    std::vector<heat_image> heats;
};

snapshot_features featurize(const std::filesystem::path& path, const pipeline_config& cfg) {
    const network_state state = read_snapshot(path);
    const filtered_digraph g = build_graph(state, {cfg.zeta});
    const filtered_complex complex = build_flag_complex(g, cfg.max_dim + 1, cfg.cell_budget);
    const auto diagrams = compute_persistence(complex, cfg.max_dim, cfg.cell_budget);

    snapshot_features f;
    for (const auto& dgm : diagrams) {
        clean_diagram cd = clean(dgm, cfg.eta, cfg.inf_replacement);
        switch (cfg.kind) {
        case distance_kind::silhouette:
            // an empty diagram vectorizes to the zero curve
            if (cd.intervals.empty())
                f.silhouettes.push_back({cfg.n_bins, cfg.power, std::vector<double>(cfg.n_bins, 0.0)});
            else
                f.silhouettes.push_back(silhouette(cd, cfg.power, cfg.n_bins));
            break;
        case distance_kind::heat:
            f.heats.push_back(heat(cd, cfg.sigma, cfg.n_bins));
            break;
        default:
            break;
        }
        f.cleaned.push_back(std::move(cd));
    }
    return f;
}

double pair_distance(const snapshot_features& a, const snapshot_features& b,
                     const pipeline_config& cfg) {
    double total = 0.0;
    for (int k = 0; k <= cfg.max_dim; ++k) {
        switch (cfg.kind) {
        case distance_kind::heat: total += vector_distance(a.heats[k], b.heats[k]); break;
        case distance_kind::silhouette:
            total += vector_distance(a.silhouettes[k], b.silhouettes[k]);
            break;
        case distance_kind::bottleneck: total += bottleneck(a.cleaned[k], b.cleaned[k]); break;
        case distance_kind::wasserstein:
            total += wasserstein(a.cleaned[k], b.cleaned[k], cfg.wasserstein_p);
            break;
        }
    }
    return total;
}

} // namespace

convergence_report analyze_run(const std::filesystem::path& snapshot_dir,
                               const metric_series& metrics, const pipeline_config& cfg) {
    const auto paths = list_snapshots(snapshot_dir);
    if (paths.size() < 2)
        throw insufficient_snapshots(snapshot_dir.string() + ": need at least 2 snapshots, found " +
                                     std::to_string(paths.size()));
    if (metrics.points.empty()) throw parse_error("empty metric series");

    // snapshots are independent units of work; results land by index, so the
    // report does not depend on scheduling
    std::vector<snapshot_features> features(paths.size());
    {
        unsigned jobs = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                                     : std::max(1u, std::thread::hardware_concurrency());
        jobs = std::min<unsigned>(jobs, static_cast<unsigned>(paths.size()));
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= paths.size()) return;
                try {
                    features[i] = featurize(paths[i], cfg);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    convergence_report report;
    report.kind = cfg.kind;
    report.steps.reserve(paths.size());
    for (const auto& p : paths) report.steps.push_back(parse_snapshot_step(p));

    report.distances.resize(paths.size() - 1);
    for (std::size_t i = 0; i + 1 < paths.size(); ++i)
        report.distances[i] = pair_distance(features[i], features[i + 1], cfg);

    report.cumulative.resize(report.distances.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < report.distances.size(); ++i) {
        acc += report.distances[i];
        report.cumulative[i] = acc;
    }

    // both curves resampled over their own step ranges: comparable positions
    // in normalized training progress; the cumulative curve is anchored at 0
    // on the first snapshot
    std::vector<double> curve_x(paths.size()), curve_y(paths.size());
    curve_x[0] = static_cast<double>(report.steps[0]);
    curve_y[0] = 0.0;
    for (std::size_t i = 0; i < report.cumulative.size(); ++i) {
        curve_x[i + 1] = static_cast<double>(report.steps[i + 1]);
        curve_y[i + 1] = report.cumulative[i];
    }
    std::vector<double> metric_steps, metric_values;
    for (const auto& p : metrics.points) {
        metric_steps.push_back(static_cast<double>(p.step));
        metric_values.push_back(p.val_accuracy);
    }

    report.resampled_distance = resample_to(curve_x, curve_y, cfg.correlation_points);
    report.resampled_accuracy = resample_to(metric_steps, metric_values, cfg.correlation_points);
    report.pearson_r = pearson(report.resampled_distance, report.resampled_accuracy);
    return report;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string report_csv(const convergence_report& report) {
    std::ostringstream out;
    out << "step,distance,cumulative\n";
    for (std::size_t i = 0; i < report.distances.size(); ++i)
        out << report.steps[i + 1] << ',' << fmt(report.distances[i]) << ','
            << fmt(report.cumulative[i]) << '\n';
    return out.str();
}

std::string summary_csv(const convergence_report& report) {
    std::ostringstream out;
    out << "pearson_r,n_points,distance_kind\n";
    out << fmt(report.pearson_r) << ',' << report.resampled_distance.size() << ','
        << to_string(report.kind) << '\n';
    return out.str();
}

std::string normalized_csv(const convergence_report& report) {
    const auto dist_norm = minmax_normalize(report.resampled_distance);
    const auto acc_norm = minmax_normalize(report.resampled_accuracy);
    std::ostringstream out;
    out << "progress,cum_distance_norm,val_accuracy_norm\n";
    const int n = static_cast<int>(dist_norm.size());
    for (int k = 0; k < n; ++k) {
        const double progress = n > 1 ? static_cast<double>(k) / (n - 1) : 0.0;
        out << fmt(progress) << ',' << fmt(dist_norm[k]) << ',' << fmt(acc_norm[k]) << '\n';
    }
    return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw io_failure("cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) throw io_failure("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw io_failure("rename failed: " + path.string() + ": " + ec.message());
    }
}

} // namespace topo
