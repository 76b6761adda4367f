#pragma once

#include "topoconverge/flag_complex.hpp"

#include <iosfwd>
#include <limits>
#include <vector>

namespace topo {

struct persistence_interval {
    double birth = 0.0;
    double death = std::numeric_limits<double>::infinity();

    bool finite() const { return death != std::numeric_limits<double>::infinity(); }
};

struct persistence_diagram {
    int dim = 0;
    std::vector<persistence_interval> intervals;
};

struct betti_profile {
    std::vector<std::size_t> betti; // indexed by dimension
};

// The dim+1 facets of a cell, one vertex omitted, order preserved (Z2
// coefficients implicit). Returned cells carry only vertex tuples.
std::vector<filtered_cell> boundary(const filtered_cell& cell);

// Column reduction of the Z2 boundary matrix under the canonical cell order,
// processing dimensions top-down with clearing. Zero-persistence pairs are
// retained. Requires max_dim <= complex.top_dim - 1.
std::vector<persistence_diagram> compute_persistence(const filtered_complex& complex, int max_dim,
                                                     std::size_t budget = default_cell_budget);

// Intervals alive at eps (birth <= eps < death) per dimension.
betti_profile betti_at(const std::vector<persistence_diagram>& diagrams, double eps);

// Test oracle: Betti numbers of the eps-sublevel complex by dense Gaussian
// elimination over Z2, beta_i = nullity(d_i) - rank(d_{i+1}), dimensions
// 0..top_dim-1. Refuses sublevel complexes above the cell budget.
betti_profile brute_force_betti(const filtered_complex& complex, double eps,
                                std::size_t budget = 2000);

// CSV "dim,birth,death", literal "inf" for infinite deaths.
void dump_diagrams(const std::vector<persistence_diagram>& diagrams, std::ostream& out);

} // namespace topo
