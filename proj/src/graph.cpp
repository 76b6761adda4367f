#include "topoconverge/graph.hpp"

#include "topoconverge/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace topo {

double normalize_weight(double w, double w_absmax, const normalization_params& params) {
    if (!(params.zeta > 0.0 && params.zeta < 1.0))
        throw std::invalid_argument("zeta must lie in (0,1)");
    if (w_absmax == 0.0) throw degenerate_scale("all-zero parameter scale");
    return std::max(1.0 - std::abs(w) / w_absmax, params.zeta);
}

filtered_digraph build_graph(const network_state& state, const normalization_params& params) {
    validate(state);
    if (state.layers.empty()) throw shape_mismatch("network without layers");

    // Vertex layout: inputs of layer 0, then each layer's output neurons,
    // then one bias vertex per biased layer.
    const std::size_t n_layers = state.layers.size();
    std::vector<std::uint32_t> out_base(n_layers);
    std::uint32_t next_id = state.layers[0].cols;
    for (std::size_t i = 0; i < n_layers; ++i) {
        out_base[i] = next_id;
        next_id += state.layers[i].rows;
    }
    std::vector<std::uint32_t> bias_vertex(n_layers, 0);
    for (std::size_t i = 0; i < n_layers; ++i)
        if (state.layers[i].has_bias()) bias_vertex[i] = next_id++;

    double absmax = 0.0;
    for (const auto& l : state.layers) {
        for (float w : l.weights) absmax = std::max(absmax, std::abs(static_cast<double>(w)));
        for (float b : l.bias) absmax = std::max(absmax, std::abs(static_cast<double>(b)));
    }
    if (absmax == 0.0) throw degenerate_scale("all parameters are zero");

    filtered_digraph g;
    g.vertex_count = next_id;

    std::unordered_set<std::uint64_t> seen;
    auto add_edge = [&](std::uint32_t u, std::uint32_t v, double w) {
        // the layered encoding cannot produce an ordered pair twice
        if (!seen.insert((static_cast<std::uint64_t>(u) << 32) | v).second)
            throw std::logic_error("duplicate ordered edge in layered encoding");
        g.edges.push_back({u, v, normalize_weight(w, absmax, params)});
    };

    for (std::size_t i = 0; i < n_layers; ++i) {
        const layer_weights& l = state.layers[i];
        const std::uint32_t in_base = i == 0 ? 0 : out_base[i - 1];
        for (std::uint32_t r = 0; r < l.rows; ++r) {
            for (std::uint32_t c = 0; c < l.cols; ++c) {
                const double w = l.weight(r, c);
                const std::uint32_t u = in_base + c;
                const std::uint32_t v = out_base[i] + r;
                if (w >= 0.0)
                    add_edge(u, v, w);
                else
                    add_edge(v, u, w);
            }
        }
        for (std::uint32_t r = 0; r < static_cast<std::uint32_t>(l.bias.size()); ++r) {
            const double b = l.bias[r];
            const std::uint32_t v = out_base[i] + r;
            if (b >= 0.0)
                add_edge(bias_vertex[i], v, b);
            else
                add_edge(v, bias_vertex[i], b);
        }
    }
    return g;
}

} // namespace topo
