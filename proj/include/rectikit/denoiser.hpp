#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rectikit/common.hpp"
#include "rectikit/rng.hpp"

namespace rectikit {

// Condition id passed for unconditional prediction; it selects the trained
// null-embedding row rather than zeroing the embedding.
inline constexpr int kNullCondition = -1;

// Fully connected conditional noise predictor. The input is the
// concatenation [x | sinusoidal time features of t | condition embedding];
// hidden layers use SiLU, the output layer is linear with width data_dim.
// All weights, biases and embeddings live in one flat parameter vector.
struct DenoiserModel {
    int data_dim = 2;
    int num_conditions = 1;
    int time_embed_dim = 16;  // even, >= 2
    int cond_embed_dim = 8;
    std::vector<int> hidden_widths = {64, 64, 64};
    Vec parameters;

    int input_dim() const { return data_dim + time_embed_dim + cond_embed_dim; }
    std::size_t param_count() const;
    void validate_arch() const;  // throws ConfigError on a malformed architecture
};

// Offsets of each block inside DenoiserModel::parameters. The embedding
// table has num_conditions + 1 rows; the extra row is the null condition.
struct ParamLayout {
    struct Layer {
        std::size_t w = 0, b = 0;
        int rows = 0, cols = 0;
    };
    std::size_t embed = 0;
    std::vector<Layer> layers;  // hidden layers, then the output layer
    std::size_t total = 0;

    explicit ParamLayout(const DenoiserModel& m);
};

// Fan-in uniform init for hidden layers and embeddings; the output layer is
// zeroed so a fresh model predicts 0 everywhere.
void init_params(DenoiserModel& m, Rng& rng);

// Scratch buffers plus cached parameter layout for one forward/backward
// pass. Not shareable across threads; parallel kernels hold one per worker.
struct Workspace {
    ParamLayout layout;
    Vec input;
    std::vector<Vec> z;    // pre-activations per hidden layer
    std::vector<Vec> act;  // SiLU outputs per hidden layer
    std::vector<Vec> sig;  // logistic(z), cached for the backward pass
    std::vector<Vec> delta;
    Vec out;

    explicit Workspace(const DenoiserModel& m);
};

// Sinusoidal features of t: sin/cos pairs at geometrically spaced
// frequencies from 1 to 1000 rad. dim must be even.
void time_features(double t, int dim, std::span<double> out);

// eps prediction for one input. cond is a condition id in
// [0, num_conditions) or kNullCondition.
void predict_eps(const DenoiserModel& m, std::span<const double> x, double t,
                 int cond, Workspace& ws, std::span<double> out);
Vec predict_eps(const DenoiserModel& m, std::span<const double> x, double t, int cond);

// One training batch in struct-of-arrays form; row i occupies
// [i*data_dim, (i+1)*data_dim) of x and eps_target.
struct TrainBatch {
    int data_dim = 2;
    Vec x;
    Vec t;
    std::vector<int> cond;
    Vec eps_target;

    std::size_t size() const { return t.size(); }
    void resize(std::size_t n, int dim);
    void validate(const DenoiserModel& m) const;
};

struct GradientBundle {
    double loss = 0.0;
    Vec grads;
};

// Mean over the batch of the squared eps residual, with exact reverse-mode
// gradients for every parameter. Serial mode accumulates in batch order;
// Parallel fans rows out over OpenMP workers and combines per-thread
// partials in thread order.
GradientBundle loss_and_grad(const DenoiserModel& m, const TrainBatch& batch,
                             ExecMode mode = ExecMode::Serial);

// Adam moment estimates with decoupled weight decay.
struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
};

struct AdamState {
    AdamConfig cfg;
    long step = 0;
    Vec m;
    Vec v;

    AdamState() = default;
    explicit AdamState(std::size_t n, AdamConfig c = {}) : cfg(c), m(n, 0.0), v(n, 0.0) {}
};

// One update: p -= lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * p).
// Throws NumericalError if any gradient entry is non-finite.
void adamw_step(DenoiserModel& m, const GradientBundle& g, double lr, AdamState& state);

}  // namespace rectikit
