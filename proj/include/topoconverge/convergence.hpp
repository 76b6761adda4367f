#pragma once

#include "topoconverge/diagram.hpp"
#include "topoconverge/snapshot.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace topo {

enum class distance_kind { heat, silhouette, bottleneck, wasserstein };

const char* to_string(distance_kind kind);
distance_kind distance_kind_from_string(const std::string& name);

// Every pipeline tunable in one place; defaults are the documented ones.
struct pipeline_config {
    distance_kind kind = distance_kind::heat;
    int max_dim = 3;
    double eta = 0.01;
    double inf_replacement = 1.0;
    int n_bins = 100;
    double sigma = 0.1;
    double power = 1.0;
    double wasserstein_p = 2.0;
    int correlation_points = 20;
    double zeta = 1e-6;
    std::size_t cell_budget = default_cell_budget;
    int jobs = 0; // 0 = hardware concurrency
};

struct convergence_report {
    distance_kind kind = distance_kind::heat;
    std::vector<std::int64_t> steps;          // snapshot step indices
    std::vector<double> distances;            // one per consecutive pair
    std::vector<double> cumulative;           // running sum of distances
    std::vector<double> resampled_distance;   // cumulative curve at n points
    std::vector<double> resampled_accuracy;   // accuracy curve at n points
    double pearson_r = 0.0;
};

// Linear interpolation of y at n_points evenly spaced positions spanning
// [min x, max x]; x must be strictly increasing.
std::vector<double> resample_to(std::span<const double> x, std::span<const double> y,
                                int n_points);

// Sample Pearson correlation; throws undefined_correlation on zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

// (v - min) / (max - min); a constant series maps to all zeros.
std::vector<double> minmax_normalize(std::span<const double> series);

// Full per-pair pipeline over a snapshot directory: graph, flag complex,
// persistence, cleaning, vectorization, distance (summed over dimensions
// 0..max_dim), cumulative curve, resampling of both curves onto
// correlation_points positions, and Pearson r of cumulative distance vs
// validation accuracy. Snapshots are processed with bounded parallelism.
convergence_report analyze_run(const std::filesystem::path& snapshot_dir,
                               const metric_series& metrics, const pipeline_config& cfg);

// CSV renderings of a report.
std::string report_csv(const convergence_report& report);                     // step,distance,cumulative
std::string summary_csv(const convergence_report& report);                    // pearson_r,n_points,distance_kind
std::string normalized_csv(const convergence_report& report);                 // progress,cum_distance_norm,val_accuracy_norm

// Writes via a temp file + rename so failures never leave partial output.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace topo
