#include "topoconverge/flag_complex.hpp"

#include "topoconverge/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace topo {

bool cell_order_less(const filtered_cell& a, const filtered_cell& b) {
    if (a.filtration != b.filtration) return a.filtration < b.filtration;
    if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
    return a.vertices < b.vertices;
}

namespace {

struct neighbor {
    std::uint32_t vertex;
    double filtration;
};

// candidate vertex reachable from every prefix vertex, carrying the max
// filtration of those connecting edges
struct candidate {
    std::uint32_t vertex;
    double acc_filtration;
};

class enumerator {
  public:
    enumerator(const filtered_digraph& g, int top_dim, std::size_t budget)
        : top_dim_(top_dim), budget_(budget), adjacency_(g.vertex_count) {
        for (const auto& e : g.edges) {
            if (e.src == e.dst) throw std::invalid_argument("self-loop in digraph");
            if (e.src >= g.vertex_count || e.dst >= g.vertex_count)
                throw std::invalid_argument("edge endpoint out of range");
            adjacency_[e.src].push_back({e.dst, e.filtration});
        }
        for (auto& nbrs : adjacency_)
            std::sort(nbrs.begin(), nbrs.end(),
                      [](const neighbor& a, const neighbor& b) { return a.vertex < b.vertex; });

        complex_.top_dim = top_dim;
        complex_.cells.resize(top_dim + 1);

        for (std::uint32_t v = 0; v < g.vertex_count; ++v) {
            record({{v}, 0.0});
            if (top_dim_ == 0) continue;
            prefix_.assign(1, v);
            std::vector<candidate> cands;
            cands.reserve(adjacency_[v].size());
            for (const auto& n : adjacency_[v]) cands.push_back({n.vertex, n.filtration});
            extend(cands, 0.0);
        }
    }

    filtered_complex take() { return std::move(complex_); }

  private:
    void record(filtered_cell cell) {
        if (++count_ > budget_)
            throw capacity_exceeded("flag complex exceeds cell budget of " +
                                    std::to_string(budget_));
        complex_.cells[cell.dim()].push_back(std::move(cell));
    }

    void extend(const std::vector<candidate>& cands, double prefix_filtration) {
        for (const auto& c : cands) {
            const double filt = std::max(prefix_filtration, c.acc_filtration);
            prefix_.push_back(c.vertex);
            filtered_cell cell{prefix_, filt};
            record(std::move(cell));

            if (static_cast<int>(prefix_.size()) <= top_dim_) {
                // intersect the candidate set with the out-neighbors of c
                std::vector<candidate> next;
                const auto& nbrs = adjacency_[c.vertex];
                auto it = nbrs.begin();
                for (const auto& cand : cands) {
                    while (it != nbrs.end() && it->vertex < cand.vertex) ++it;
                    if (it == nbrs.end()) break;
                    if (it->vertex == cand.vertex)
                        next.push_back(
                            {cand.vertex, std::max(cand.acc_filtration, it->filtration)});
                }
                if (!next.empty()) extend(next, filt);
            }
            prefix_.pop_back();
        }
    }

    int top_dim_;
    std::size_t budget_;
    std::size_t count_ = 0;
    std::vector<std::vector<neighbor>> adjacency_;
    std::vector<std::uint32_t> prefix_;
    filtered_complex complex_;
};

} // namespace

filtered_complex build_flag_complex(const filtered_digraph& g, int top_dim, std::size_t budget) {
    if (top_dim < 0) throw std::invalid_argument("top_dim must be >= 0");
    return enumerator(g, top_dim, budget).take();
}

std::vector<filtered_cell> cells_at(const filtered_complex& complex, double eps) {
    std::vector<filtered_cell> out;
    for (const auto& per_dim : complex.cells)
        for (const auto& cell : per_dim)
            if (cell.filtration <= eps) out.push_back(cell);
    std::sort(out.begin(), out.end(), cell_order_less);
    return out;
}

void dump_complex(const filtered_complex& complex, std::ostream& out) {
    std::vector<filtered_cell> ordered = cells_at(complex, std::numeric_limits<double>::infinity());
    char buf[48];
    for (const auto& cell : ordered) {
        std::snprintf(buf, sizeof(buf), "%d %.17g", cell.dim(), cell.filtration);
        out << buf;
        for (auto v : cell.vertices) out << ' ' << v;
        out << '\n';
    }
}

} // namespace topo
