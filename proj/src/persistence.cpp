#include "topoconverge/persistence.hpp"

#include "topoconverge/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace topo {

std::vector<filtered_cell> boundary(const filtered_cell& cell) {
    std::vector<filtered_cell> facets;
    if (cell.dim() < 1) return facets;
    facets.reserve(cell.vertices.size());
    for (std::size_t omit = 0; omit < cell.vertices.size(); ++omit) {
        filtered_cell facet;
        facet.vertices.reserve(cell.vertices.size() - 1);
        for (std::size_t i = 0; i < cell.vertices.size(); ++i)
            if (i != omit) facet.vertices.push_back(cell.vertices[i]);
        facets.push_back(std::move(facet));
    }
    return facets;
}

namespace {

// symmetric difference of sorted index vectors (column addition over Z2)
void xor_merge(std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
               std::vector<std::size_t>& scratch) {
    scratch.clear();
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(scratch));
    a.swap(scratch);
}

constexpr std::size_t npos = static_cast<std::size_t>(-1);

} // namespace

std::vector<persistence_diagram> compute_persistence(const filtered_complex& complex, int max_dim,
                                                     std::size_t budget) {
    if (max_dim < 0) throw std::invalid_argument("max_dim must be >= 0");
    if (max_dim > complex.top_dim - 1)
        throw std::invalid_argument("max_dim must be <= top_dim - 1");
    const int reduce_top = max_dim + 1;

    std::vector<const filtered_cell*> order;
    for (int d = 0; d <= reduce_top; ++d)
        for (const auto& c : complex.cells[d]) order.push_back(&c);
    if (order.size() > budget)
        throw capacity_exceeded("boundary matrix exceeds cell budget of " + std::to_string(budget));
    std::sort(order.begin(), order.end(),
              [](const filtered_cell* a, const filtered_cell* b) { return cell_order_less(*a, *b); });
    const std::size_t m = order.size();

    // per-dimension lexicographic index for facet lookups
    std::vector<std::vector<std::size_t>> by_tuple(reduce_top + 1);
    for (std::size_t i = 0; i < m; ++i) by_tuple[order[i]->dim()].push_back(i);
    for (auto& ids : by_tuple)
        std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
            return order[a]->vertices < order[b]->vertices;
        });

    auto find_cell = [&](const std::vector<std::uint32_t>& tuple) {
        const auto& ids = by_tuple[tuple.size() - 1];
        auto it = std::lower_bound(ids.begin(), ids.end(), tuple,
                                   [&](std::size_t id, const std::vector<std::uint32_t>& t) {
                                       return order[id]->vertices < t;
                                   });
        if (it == ids.end() || order[*it]->vertices != tuple)
            throw std::logic_error("complex is not face-closed");
        return *it;
    };

    std::vector<char> cleared(m, 0); // pivot of the next dimension up: column known zero
    std::vector<char> creator(m, 0); // column reduced to zero
    std::vector<char> paired(m, 0);  // matched as the birth of a pair
    struct pair_rec {
        std::size_t birth, death;
    };
    std::vector<pair_rec> pairs;

    std::vector<std::size_t> col, scratch;
    std::vector<std::uint32_t> facet;
    for (int d = reduce_top; d >= 1; --d) {
        std::vector<std::size_t> owner(m, npos); // pivot row -> stored column
        std::vector<std::vector<std::size_t>> stored;
        for (std::size_t cid = 0; cid < m; ++cid) {
            if (order[cid]->dim() != d) continue;
            if (cleared[cid]) { // already recorded as a birth by dimension d+1
                creator[cid] = 1;
                continue;
            }
            const auto& verts = order[cid]->vertices;
            col.clear();
            for (std::size_t omit = 0; omit < verts.size(); ++omit) {
                facet.clear();
                for (std::size_t i = 0; i < verts.size(); ++i)
                    if (i != omit) facet.push_back(verts[i]);
                col.push_back(find_cell(facet));
            }
            std::sort(col.begin(), col.end());

            while (!col.empty() && owner[col.back()] != npos)
                xor_merge(col, stored[owner[col.back()]], scratch);

            if (col.empty()) {
                creator[cid] = 1;
            } else {
                const std::size_t pivot = col.back();
                owner[pivot] = stored.size();
                stored.push_back(col);
                pairs.push_back({pivot, cid});
                paired[pivot] = 1;
                cleared[pivot] = 1;
            }
        }
    }

    std::vector<persistence_diagram> diagrams(max_dim + 1);
    for (int k = 0; k <= max_dim; ++k) diagrams[k].dim = k;
    for (const auto& pr : pairs) {
        const int k = order[pr.birth]->dim();
        diagrams[k].intervals.push_back(
            {order[pr.birth]->filtration, order[pr.death]->filtration});
    }
    for (std::size_t i = 0; i < m; ++i) {
        const int k = order[i]->dim();
        if (k > max_dim || paired[i]) continue;
        if (k == 0 || creator[i])
            diagrams[k].intervals.push_back(
                {order[i]->filtration, std::numeric_limits<double>::infinity()});
    }
    for (auto& dgm : diagrams)
        std::sort(dgm.intervals.begin(), dgm.intervals.end(),
                  [](const persistence_interval& a, const persistence_interval& b) {
                      return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
                  });
    return diagrams;
}

betti_profile betti_at(const std::vector<persistence_diagram>& diagrams, double eps) {
    betti_profile profile;
    for (const auto& dgm : diagrams)
        profile.betti.resize(std::max<std::size_t>(profile.betti.size(), dgm.dim + 1), 0);
    for (const auto& dgm : diagrams)
        for (const auto& iv : dgm.intervals)
            if (iv.birth <= eps && eps < iv.death) ++profile.betti[dgm.dim];
    return profile;
}

namespace {

// rank over GF(2) of a matrix given as bit-packed columns
std::size_t gf2_rank(std::vector<std::vector<std::uint64_t>> cols, std::size_t rows) {
    std::vector<std::size_t> owner(rows, npos);
    std::vector<std::vector<std::uint64_t>> basis;
    std::size_t rank = 0;

    auto highest_bit = [](const std::vector<std::uint64_t>& c) -> std::size_t {
        for (std::size_t w = c.size(); w-- > 0;)
            if (c[w]) return w * 64 + (63 - static_cast<std::size_t>(__builtin_clzll(c[w])));
        return npos;
    };

    for (auto& col : cols) {
        std::size_t hb = highest_bit(col);
        while (hb != npos && owner[hb] != npos) {
            const auto& b = basis[owner[hb]];
            for (std::size_t w = 0; w < col.size(); ++w) col[w] ^= b[w];
            hb = highest_bit(col);
        }
        if (hb != npos) {
            owner[hb] = basis.size();
            basis.push_back(std::move(col));
            ++rank;
        }
    }
    return rank;
}

} // namespace

betti_profile brute_force_betti(const filtered_complex& complex, double eps, std::size_t budget) {
    const std::vector<filtered_cell> sub = cells_at(complex, eps);
    if (sub.size() > budget)
        throw capacity_exceeded("sublevel complex exceeds oracle budget of " +
                                std::to_string(budget));

    const int top = complex.top_dim;
    std::vector<std::vector<const filtered_cell*>> by_dim(top + 1);
    for (const auto& c : sub) by_dim[c.dim()].push_back(&c);

    // lexicographic lookup per dimension
    std::vector<std::vector<std::size_t>> lex(top + 1);
    for (int d = 0; d <= top; ++d) {
        lex[d].resize(by_dim[d].size());
        for (std::size_t i = 0; i < lex[d].size(); ++i) lex[d][i] = i;
        std::sort(lex[d].begin(), lex[d].end(), [&](std::size_t a, std::size_t b) {
            return by_dim[d][a]->vertices < by_dim[d][b]->vertices;
        });
    }
    auto find_row = [&](int d, const std::vector<std::uint32_t>& tuple) {
        const auto& ids = lex[d];
        auto it = std::lower_bound(ids.begin(), ids.end(), tuple,
                                   [&](std::size_t id, const std::vector<std::uint32_t>& t) {
                                       return by_dim[d][id]->vertices < t;
                                   });
        if (it == ids.end() || by_dim[d][*it]->vertices != tuple)
            throw std::logic_error("sublevel set is not face-closed");
        return *it;
    };

    std::vector<std::size_t> rank(top + 2, 0);
    for (int d = 1; d <= top; ++d) {
        const std::size_t rows = by_dim[d - 1].size();
        const std::size_t words = (rows + 63) / 64;
        std::vector<std::vector<std::uint64_t>> cols;
        cols.reserve(by_dim[d].size());
        std::vector<std::uint32_t> facet;
        for (const auto* cell : by_dim[d]) {
            std::vector<std::uint64_t> col(words, 0);
            for (std::size_t omit = 0; omit < cell->vertices.size(); ++omit) {
                facet.clear();
                for (std::size_t i = 0; i < cell->vertices.size(); ++i)
                    if (i != omit) facet.push_back(cell->vertices[i]);
                const std::size_t row = find_row(d - 1, facet);
                col[row / 64] ^= 1ull << (row % 64);
            }
            cols.push_back(std::move(col));
        }
        rank[d] = gf2_rank(std::move(cols), rows);
    }

    betti_profile profile;
    profile.betti.resize(std::max(top, 0), 0);
    for (int k = 0; k < top; ++k) {
        const std::size_t nullity = by_dim[k].size() - rank[k]; // rank(d_0) = 0
        profile.betti[k] = nullity - rank[k + 1];
    }
    return profile;
}

void dump_diagrams(const std::vector<persistence_diagram>& diagrams, std::ostream& out) {
    out << "dim,birth,death\n";
    char buf[80];
    for (const auto& dgm : diagrams) {
        for (const auto& iv : dgm.intervals) {
            if (iv.finite())
                std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", dgm.dim, iv.birth, iv.death);
            else
                std::snprintf(buf, sizeof(buf), "%d,%.17g,inf\n", dgm.dim, iv.birth);
            out << buf;
        }
    }
}

} // namespace topo
