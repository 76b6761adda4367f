#pragma once

#include "topoconverge/graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace topo {

inline constexpr std::size_t default_cell_budget = 50'000'000;

// Ordered simplex (v_0,...,v_k): (v_i, v_j) is a graph edge for all i < j.
// Filtration is the max over those edges; vertices sit at 0.
struct filtered_cell {
    std::vector<std::uint32_t> vertices;
    double filtration = 0.0;

    int dim() const { return static_cast<int>(vertices.size()) - 1; }
};

// Canonical reduction order: (filtration, dim, lexicographic vertex tuple).
bool cell_order_less(const filtered_cell& a, const filtered_cell& b);

struct filtered_complex {
    std::vector<std::vector<filtered_cell>> cells; // indexed by dimension
    int top_dim = 0;

    std::size_t cell_count() const {
        std::size_t n = 0;
        for (const auto& d : cells) n += d.size();
        return n;
    }
};

// Enumerates every ordered clique of size <= top_dim + 1 by depth-first
// extension over out-neighbor intersections. Throws capacity_exceeded when
// the cell count passes the budget.
filtered_complex build_flag_complex(const filtered_digraph& g, int top_dim,
                                    std::size_t budget = default_cell_budget);

// Cells with filtration <= eps, sorted in reduction order (face-closed).
std::vector<filtered_cell> cells_at(const filtered_complex& complex, double eps);

// Debug dump, one cell per line: "dim filtration v0 v1 ... vk".
void dump_complex(const filtered_complex& complex, std::ostream& out);

} // namespace topo
