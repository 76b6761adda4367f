#include "topoconverge/diagram.hpp"

#include "topoconverge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace topo {

namespace {
constexpr double pi = 3.14159265358979323846;
}

clean_diagram clean(const persistence_diagram& d, double eta, double inf_replacement) {
    if (eta < 0.0) throw std::invalid_argument("eta must be >= 0");
    clean_diagram out;
    out.dim = d.dim;
    for (persistence_interval iv : d.intervals) {
        if (!iv.finite()) iv.death = inf_replacement; // replacement happens before the eta filter
        if (iv.death - iv.birth < eta) continue;
        out.intervals.push_back(iv);
    }
    return out;
}

double tent(const persistence_interval& iv, double t) {
    return std::max(0.0, std::min(t - iv.birth, iv.death - t));
}

double grid_point(int i, int n_bins) {
    if (n_bins < 2) throw std::invalid_argument("n_bins must be >= 2");
    return static_cast<double>(i) / (n_bins - 1);
}

silhouette_curve silhouette(const clean_diagram& d, double power, int n_bins) {
    if (power <= 0.0) throw std::invalid_argument("power must be > 0");
    if (n_bins < 2) throw std::invalid_argument("n_bins must be >= 2");

    double total_weight = 0.0;
    std::vector<double> weights;
    weights.reserve(d.intervals.size());
    for (const auto& iv : d.intervals) {
        const double w = std::pow(std::abs(iv.death - iv.birth), power);
        weights.push_back(w);
        total_weight += w;
    }
    if (total_weight == 0.0) throw empty_diagram("silhouette of a diagram with zero total weight");

    silhouette_curve curve{n_bins, power, std::vector<double>(n_bins, 0.0)};
    for (int i = 0; i < n_bins; ++i) {
        const double t = grid_point(i, n_bins);
        double acc = 0.0;
        for (std::size_t k = 0; k < d.intervals.size(); ++k)
            acc += weights[k] * tent(d.intervals[k], t);
        curve.values[i] = acc / total_weight;
    }
    return curve;
}

double heat_value(const clean_diagram& d, double sigma, double x1, double x2) {
    if (sigma <= 0.0) throw std::invalid_argument("sigma must be > 0");
    const double tau = sigma * sigma / 2.0;
    double acc = 0.0;
    for (const auto& iv : d.intervals) {
        const double direct =
            (x1 - iv.birth) * (x1 - iv.birth) + (x2 - iv.death) * (x2 - iv.death);
        const double mirrored =
            (x1 - iv.death) * (x1 - iv.death) + (x2 - iv.birth) * (x2 - iv.birth);
        acc += std::exp(-direct / (4.0 * tau)) - std::exp(-mirrored / (4.0 * tau));
    }
    return acc / (4.0 * pi * tau);
}

heat_image heat(const clean_diagram& d, double sigma, int n_bins) {
    if (sigma <= 0.0) throw std::invalid_argument("sigma must be > 0");
    if (n_bins < 2) throw std::invalid_argument("n_bins must be >= 2");

    heat_image img{n_bins, sigma, std::vector<double>(static_cast<std::size_t>(n_bins) * n_bins, 0.0)};
    const double tau = sigma * sigma / 2.0;
    const double axis_norm = 1.0 / std::sqrt(4.0 * pi * tau);

    // separable Gaussian: per point evaluate both axis profiles once, then
    // accumulate the antisymmetrized outer product
    std::vector<double> gb(n_bins), gd(n_bins);
    for (const auto& iv : d.intervals) {
        for (int i = 0; i < n_bins; ++i) {
            const double t = grid_point(i, n_bins);
            gb[i] = axis_norm * std::exp(-(t - iv.birth) * (t - iv.birth) / (4.0 * tau));
            gd[i] = axis_norm * std::exp(-(t - iv.death) * (t - iv.death) / (4.0 * tau));
        }
        for (int i = 0; i < n_bins; ++i) {
            double* row = img.values.data() + static_cast<std::size_t>(i) * n_bins;
            for (int j = 0; j < n_bins; ++j) row[j] += gb[i] * gd[j] - gd[i] * gb[j];
        }
    }
    return img;
}

landscape_layers landscape(const clean_diagram& d, int k_max, int n_bins) {
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    if (n_bins < 2) throw std::invalid_argument("n_bins must be >= 2");

    landscape_layers out{n_bins, std::vector<std::vector<double>>(
                                     k_max, std::vector<double>(n_bins, 0.0))};
    std::vector<double> tents;
    for (int i = 0; i < n_bins; ++i) {
        const double t = grid_point(i, n_bins);
        tents.clear();
        for (const auto& iv : d.intervals) tents.push_back(tent(iv, t));
        const int k_avail = std::min<int>(k_max, static_cast<int>(tents.size()));
        std::partial_sort(tents.begin(), tents.begin() + k_avail, tents.end(),
                          std::greater<double>());
        for (int k = 0; k < k_avail; ++k) out.layers[k][i] = tents[k];
    }
    return out;
}

namespace {

double l2_grid_distance(const std::vector<double>& a, const std::vector<double>& b, double delta) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return std::sqrt(acc * delta);
}

} // namespace

double vector_distance(const silhouette_curve& a, const silhouette_curve& b) {
    if (a.n_bins != b.n_bins || a.power != b.power)
        throw grid_mismatch("silhouette grids or powers differ");
    return l2_grid_distance(a.values, b.values, 1.0 / a.n_bins);
}

double vector_distance(const heat_image& a, const heat_image& b) {
    if (a.n_bins != b.n_bins || a.sigma != b.sigma)
        throw grid_mismatch("heat grids or bandwidths differ");
    return l2_grid_distance(a.values, b.values, 1.0 / (static_cast<double>(a.n_bins) * a.n_bins));
}

namespace {

double linf(const persistence_interval& a, const persistence_interval& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

double diagonal_gap(const persistence_interval& iv) { return (iv.death - iv.birth) / 2.0; }

void check_cap(const clean_diagram& d1, const clean_diagram& d2) {
    if (d1.intervals.size() + d2.intervals.size() > exact_distance_cap)
        throw capacity_exceeded("exact diagram distance limited to " +
                                std::to_string(exact_distance_cap) + " combined points");
}

// Perfect matching over the diagonally-augmented bipartite graph: left side is
// D1 plus one diagonal slot per D2 point (and symmetrically on the right);
// diagonal slots act as wildcards among themselves.
bool matchable_within(const std::vector<persistence_interval>& a,
                      const std::vector<persistence_interval>& b, double thr) {
    const int n1 = static_cast<int>(a.size()), n2 = static_cast<int>(b.size());
    const int n = n1 + n2;
    auto adjacent = [&](int u, int v) {
        if (u < n1 && v < n2) return linf(a[u], b[v]) <= thr;
        if (u < n1) return diagonal_gap(a[u]) <= thr;
        if (v < n2) return diagonal_gap(b[v]) <= thr;
        return true;
    };
    std::vector<int> match_of(n, -1);
    std::vector<char> visited(n);
    std::function<bool(int)> augment = [&](int u) {
        for (int v = 0; v < n; ++v) {
            if (visited[v] || !adjacent(u, v)) continue;
            visited[v] = 1;
            if (match_of[v] < 0 || augment(match_of[v])) {
                match_of[v] = u;
                return true;
            }
        }
        return false;
    };
    for (int u = 0; u < n; ++u) {
        std::fill(visited.begin(), visited.end(), 0);
        if (!augment(u)) return false;
    }
    return true;
}

// Jonker-Volgenant style shortest augmenting path assignment; returns the
// minimum total cost of a perfect matching on a square cost matrix.
double assignment_cost(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    if (n == 0) return 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j) total += cost[p[j] - 1][j - 1];
    return total;
}

} // namespace

double bottleneck(const clean_diagram& d1, const clean_diagram& d2) {
    check_cap(d1, d2);
    const auto& a = d1.intervals;
    const auto& b = d2.intervals;
    if (a.empty() && b.empty()) return 0.0;

    std::vector<double> candidates{0.0};
    for (const auto& x : a) candidates.push_back(diagonal_gap(x));
    for (const auto& y : b) candidates.push_back(diagonal_gap(y));
    for (const auto& x : a)
        for (const auto& y : b) candidates.push_back(linf(x, y));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // feasibility is monotone in the threshold
    std::size_t lo = 0, hi = candidates.size() - 1;
    if (!matchable_within(a, b, candidates[hi]))
        throw std::logic_error("bottleneck: largest candidate must be feasible");
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (matchable_within(a, b, candidates[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return candidates[lo];
}

double wasserstein(const clean_diagram& d1, const clean_diagram& d2, double p) {
    if (p < 1.0) throw std::invalid_argument("wasserstein order must be >= 1");
    check_cap(d1, d2);
    const auto& a = d1.intervals;
    const auto& b = d2.intervals;
    const int n1 = static_cast<int>(a.size()), n2 = static_cast<int>(b.size());
    const int n = n1 + n2;
    if (n == 0) return 0.0;

    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i < n1 && j < n2)
                cost[i][j] = std::pow(linf(a[i], b[j]), p);
            else if (i < n1)
                cost[i][j] = std::pow(diagonal_gap(a[i]), p);
            else if (j < n2)
                cost[i][j] = std::pow(diagonal_gap(b[j]), p);
        }
    }
    return std::pow(assignment_cost(cost), 1.0 / p);
}

} // namespace topo
