#pragma once

#include "topoconverge/persistence.hpp"

#include <vector>

namespace topo {

// Post-processed diagram: deaths finite, every lifespan >= the eta used to
// produce it, values in [0,1].
struct clean_diagram {
    int dim = 0;
    std::vector<persistence_interval> intervals;
};

// Infinite deaths become inf_replacement first, then intervals with
// death - birth < eta are dropped (strict comparison).
clean_diagram clean(const persistence_diagram& d, double eta, double inf_replacement);

// max(0, min(t - birth, death - t))
double tent(const persistence_interval& iv, double t);

// Sample grids span [0,1] with n_bins points, t_i = i / (n_bins - 1); the
// cell measure used by vector_distance is 1/n_bins per axis.
double grid_point(int i, int n_bins);

struct silhouette_curve {
    int n_bins = 0;
    double power = 1.0;
    std::vector<double> values;
};

struct heat_image {
    int n_bins = 0;
    double sigma = 0.1;
    std::vector<double> values; // n_bins * n_bins, x1-major

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n_bins + j]; }
};

struct landscape_layers {
    int n_bins = 0;
    std::vector<std::vector<double>> layers; // layers[k-1] = lambda_k samples
};

// Weight-averaged tent function, weights |death-birth|^power. Throws
// empty_diagram when the total weight is zero.
silhouette_curve silhouette(const clean_diagram& d, double power, int n_bins);

// Diagonally antisymmetrized Gaussian sum (method of images), t = sigma^2/2.
heat_image heat(const clean_diagram& d, double sigma, int n_bins);
// Exact field value at an arbitrary point (x1, x2).
double heat_value(const clean_diagram& d, double sigma, double x1, double x2);

// k-th largest tent value per grid point, k = 1..k_max.
landscape_layers landscape(const clean_diagram& d, int k_max, int n_bins);

// Discrete L2 distance sqrt(sum (a_i - b_i)^2 * delta); requires matching
// grid and vectorization parameters.
double vector_distance(const silhouette_curve& a, const silhouette_curve& b);
double vector_distance(const heat_image& a, const heat_image& b);

// Exact matching distances over diagonally-augmented diagrams. Oracles for
// small inputs; both refuse combined point counts above the cap.
inline constexpr std::size_t exact_distance_cap = 64;
double bottleneck(const clean_diagram& d1, const clean_diagram& d2);
double wasserstein(const clean_diagram& d1, const clean_diagram& d2, double p);

} // namespace topo
