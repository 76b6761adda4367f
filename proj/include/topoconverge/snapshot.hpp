#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace topo {

// One dense layer: rows = fan-out, cols = fan-in, weights row-major.
// Values are stored as 32-bit floats (the on-disk unit); all downstream
// arithmetic promotes to double.
struct layer_weights {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<float> weights; // rows * cols
    std::vector<float> bias;    // empty, or length rows

    bool has_bias() const { return !bias.empty(); }
    float weight(std::uint32_t r, std::uint32_t c) const { return weights[r * cols + c]; }
};

// Weight snapshot of one training step.
struct network_state {
    std::vector<layer_weights> layers;
    std::int64_t step = 0;
};

// Bit-exact equality (float payloads compared by bit pattern).
bool operator==(const layer_weights& a, const layer_weights& b);
bool operator==(const network_state& a, const network_state& b);

struct metric_point {
    std::int64_t step = 0;
    double val_accuracy = 0.0;
};

struct metric_series {
    std::vector<metric_point> points;
};

// Throws shape_mismatch / non_finite when the state violates its invariants
// (rows/cols >= 1, payload sizes, consecutive-layer compatibility, finiteness).
void validate(const network_state& state);

// NNPH v1, little-endian:
//   "NNPH" | version u32 | layer_count u32
//   | per layer: rows u32, cols u32, has_bias u8
//   | per layer: rows*cols f32 row-major, then rows f32 bias iff has_bias
network_state read_snapshot(const std::filesystem::path& path);
void write_snapshot(const network_state& state, const std::filesystem::path& path);

// "step_%08d.nnph"; names not matching the pattern parse as step 0.
std::string snapshot_filename(std::int64_t step);
std::int64_t parse_snapshot_step(const std::filesystem::path& path);

// Snapshot files of a directory, sorted numerically by step.
std::vector<std::filesystem::path> list_snapshots(const std::filesystem::path& dir);

// CSV with header "step,val_accuracy"; steps strictly increasing,
// accuracies within [0,1].
metric_series read_metrics(const std::filesystem::path& path);
void write_metrics(const metric_series& series, const std::filesystem::path& path);

} // namespace topo
