#pragma once

#include "topoconverge/snapshot.hpp"

#include <cstdint>
#include <vector>

namespace topo {

struct normalization_params {
    // smoothing constant keeping normalized values strictly positive
    double zeta = 1e-6;
};

struct directed_edge {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    double filtration = 0.0; // in [zeta, 1]
};

// Weighted digraph of one network state. No self-loops; reciprocal edges are
// allowed; at most one edge per ordered pair. Small normalized values mark
// strong connections (they enter the filtration first).
struct filtered_digraph {
    std::uint32_t vertex_count = 0;
    std::vector<directed_edge> edges;
};

// max(1 - |w| / w_absmax, zeta). Throws degenerate_scale when w_absmax == 0.
double normalize_weight(double w, double w_absmax, const normalization_params& params = {});

// One vertex per neuron (input layer first, then each layer's outputs), plus
// one bias vertex per biased layer appended after all neurons. Non-negative
// weights point forward, negative weights are reversed; every parameter
// contributes exactly one edge, normalized against the global |w| maximum
// over all weights and biases.
filtered_digraph build_graph(const network_state& state, const normalization_params& params = {});

} // namespace topo
