#pragma once

#include "topoconverge/rng.hpp"
#include "topoconverge/snapshot.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace topo {

enum class dataset_kind { blobs, xor_quads, rings };

const char* to_string(dataset_kind kind);
dataset_kind dataset_kind_from_string(const std::string& name);

struct train_config {
    std::vector<int> hidden_sizes{16, 16};
    double dropout = 0.2; // inverted dropout on hidden activations
    double lr = 0.01;
    int batch_size = 32;
    int epochs = 10;
    std::uint64_t seed = 0;
    dataset_kind dataset = dataset_kind::blobs;
    int snapshot_every = 1; // batches between snapshots, starting at step 0
    int n_samples = 200;
    // -1 derives the shuffle stream from `seed`; any other value varies the
    // input order while keeping data, init and dropout fixed (control runs)
    std::int64_t shuffle_seed = -1;
};

struct synthetic_dataset {
    int feature_dim = 2;
    int n_classes = 2;
    std::vector<double> features; // n x feature_dim, row-major
    std::vector<int> labels;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> val_idx;

    std::size_t size() const { return labels.size(); }
    const double* sample(std::size_t i) const { return features.data() + i * feature_dim; }
};

// blobs: two 2D Gaussian clusters separated by 6 sigma (linearly separable);
// xor: four clusters with XOR labels; rings: two concentric annuli.
// Deterministic per (kind, seed); disjoint 80/20 train/validation split.
synthetic_dataset generate_dataset(dataset_kind kind, int n, std::uint64_t seed);

// Numerically stable softmax cross-entropy for one sample; writes the logit
// gradient and returns the loss.
double softmax_cross_entropy(std::span<const double> logits, int label, std::span<double> dlogits);

// Dense ReLU network with a softmax cross-entropy head. Double precision
// internally; snapshots quantize to the 32-bit on-disk format.
class mlp {
  public:
    struct layer {
        std::uint32_t rows = 0, cols = 0;
        std::vector<double> w; // rows x cols, row-major
        std::vector<double> b; // rows
    };

    mlp(int input_dim, const std::vector<int>& hidden_sizes, int n_classes, splitmix64& init_rng);

    const std::vector<layer>& layers() const { return layers_; }

    // mean loss over the batch; grads gets the mean gradient. dropout_masks,
    // when present, holds one scale factor per (hidden layer, sample, unit).
    double batch_loss_and_grads(const synthetic_dataset& data,
                                std::span<const std::size_t> batch,
                                const std::vector<std::vector<double>>* dropout_masks,
                                std::vector<layer>& grads) const;

    void rmsprop_step(const std::vector<layer>& grads, double lr, std::vector<layer>& accum,
                      double decay = 0.9, double epsilon = 1e-8);

    int predict(const double* x) const; // argmax of logits, no dropout

    network_state to_state(std::int64_t step) const;

    // flattened parameter view (for finite differences)
    std::size_t parameter_count() const;
    double get_parameter(std::size_t i) const;
    void set_parameter(std::size_t i, double v);

    std::vector<layer> zero_like() const;

  private:
    std::vector<layer> layers_;
};

double evaluate_accuracy(const mlp& net, const synthetic_dataset& data,
                         std::span<const std::size_t> indices);

struct train_telemetry {
    std::vector<double> epoch_mean_loss;
};

// RMSProp training loop; writes step_%08d.nnph snapshots (step 0 is the
// initial state) and metrics.csv into out_dir, and returns the metric series.
metric_series train(const train_config& cfg, const std::filesystem::path& out_dir,
                    train_telemetry* telemetry = nullptr);

// Max relative error (unit-floored denominator) between analytic gradients
// and central finite differences with h = 1e-5, over every parameter of a
// tiny dropout-free network drawn from cfg.
double gradient_check(const train_config& cfg);

} // namespace topo
