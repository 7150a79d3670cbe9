#include "rectikit/denoiser.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rectikit {

namespace {

inline double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

inline int embed_row(const DenoiserModel& m, int cond) {
    if (cond == kNullCondition) return m.num_conditions;
    if (cond < 0 || cond >= m.num_conditions) {
        throw std::invalid_argument("condition id " + std::to_string(cond) +
                                    " outside [0, " + std::to_string(m.num_conditions) + ")");
    }
    return cond;
}

// Fills ws.input = [x | time features | embedding row for cond].
void build_input(const DenoiserModel& m, const ParamLayout& layout,
                 std::span<const double> x, double t, int cond, Workspace& ws) {
    if (static_cast<int>(x.size()) != m.data_dim) {
        throw std::invalid_argument("predict_eps: x has length " + std::to_string(x.size()) +
                                    ", expected " + std::to_string(m.data_dim));
    }
    if (!(t >= 0.0 && t <= 1.0)) {
        throw std::domain_error("predict_eps: t outside [0, 1]");
    }
    double* in = ws.input.data();
    for (int i = 0; i < m.data_dim; ++i) in[i] = x[i];
    time_features(t, m.time_embed_dim, {in + m.data_dim, static_cast<std::size_t>(m.time_embed_dim)});
    const double* emb = m.parameters.data() + layout.embed +
                        static_cast<std::size_t>(embed_row(m, cond)) * m.cond_embed_dim;
    double* dst = in + m.data_dim + m.time_embed_dim;
    for (int i = 0; i < m.cond_embed_dim; ++i) dst[i] = emb[i];
}

// Forward pass over ws.input; leaves activations in ws for the backward pass.
void forward(const DenoiserModel& m, const ParamLayout& layout, Workspace& ws) {
    const double* params = m.parameters.data();
    const std::size_t n_hidden = m.hidden_widths.size();
    const double* src = ws.input.data();
    int src_n = m.input_dim();
    for (std::size_t l = 0; l < n_hidden; ++l) {
        const auto& L = layout.layers[l];
        const double* W = params + L.w;
        const double* b = params + L.b;
        double* z = ws.z[l].data();
        double* a = ws.act[l].data();
        double* s = ws.sig[l].data();
        for (int i = 0; i < L.rows; ++i) {
            double acc = b[i];
            const double* w = W + static_cast<std::size_t>(i) * src_n;
            for (int j = 0; j < src_n; ++j) acc += w[j] * src[j];
            z[i] = acc;
            double sg = logistic(acc);
            s[i] = sg;
            a[i] = acc * sg;
        }
        src = a;
        src_n = L.rows;
    }
    const auto& O = layout.layers[n_hidden];
    const double* W = params + O.w;
    const double* b = params + O.b;
    for (int i = 0; i < O.rows; ++i) {
        double acc = b[i];
        const double* w = W + static_cast<std::size_t>(i) * src_n;
        for (int j = 0; j < src_n; ++j) acc += w[j] * src[j];
        ws.out[i] = acc;
    }
}

// Backward pass for the squared residual ||out - target||^2 of one sample.
// Adds parameter gradients into grad (unscaled) and returns the residual.
double backward(const DenoiserModel& m, const ParamLayout& layout, int cond,
                std::span<const double> target, Workspace& ws, double* grad) {
    const double* params = m.parameters.data();
    const std::size_t n_hidden = m.hidden_widths.size();

    double sq = 0.0;
    const auto& O = layout.layers[n_hidden];
    const double* a_last = n_hidden > 0 ? ws.act[n_hidden - 1].data() : ws.input.data();
    const int last_n = O.cols;
    Vec& dlast = n_hidden > 0 ? ws.delta[n_hidden - 1] : ws.delta[0];
    for (int j = 0; j < last_n; ++j) dlast[j] = 0.0;
    for (int i = 0; i < O.rows; ++i) {
        double r = ws.out[i] - target[i];
        sq += r * r;
        double g = 2.0 * r;
        grad[O.b + i] += g;
        double* gw = grad + O.w + static_cast<std::size_t>(i) * last_n;
        const double* w = params + O.w + static_cast<std::size_t>(i) * last_n;
        for (int j = 0; j < last_n; ++j) {
            gw[j] += g * a_last[j];
            dlast[j] += g * w[j];
        }
    }

    for (std::size_t l = n_hidden; l-- > 0;) {
        const auto& L = layout.layers[l];
        double* d = ws.delta[l].data();
        const double* z = ws.z[l].data();
        const double* s = ws.sig[l].data();
        // d(silu)/dz = s * (1 + z * (1 - s)), with s = logistic(z)
        for (int i = 0; i < L.rows; ++i) d[i] *= s[i] * (1.0 + z[i] * (1.0 - s[i]));

        const double* below = l > 0 ? ws.act[l - 1].data() : ws.input.data();
        double* dbelow = l > 0 ? ws.delta[l - 1].data() : nullptr;
        if (dbelow != nullptr) {
            for (int j = 0; j < L.cols; ++j) dbelow[j] = 0.0;
        }
        for (int i = 0; i < L.rows; ++i) {
            double g = d[i];
            grad[L.b + i] += g;
            double* gw = grad + L.w + static_cast<std::size_t>(i) * L.cols;
            const double* w = params + L.w + static_cast<std::size_t>(i) * L.cols;
            if (dbelow != nullptr) {
                for (int j = 0; j < L.cols; ++j) {
                    gw[j] += g * below[j];
                    dbelow[j] += g * w[j];
                }
            } else {
                // first layer: propagate only into the embedding slice
                const int emb_base = m.data_dim + m.time_embed_dim;
                for (int j = 0; j < L.cols; ++j) gw[j] += g * below[j];
                std::size_t erow = layout.embed +
                                   static_cast<std::size_t>(embed_row(m, cond)) * m.cond_embed_dim;
                for (int j = 0; j < m.cond_embed_dim; ++j) {
                    grad[erow + j] += g * w[emb_base + j];
                }
            }
        }
    }
    if (n_hidden == 0) {
        // linear model: output layer consumed the input directly; embedding
        // gradient comes straight from the output weights.
        const int emb_base = m.data_dim + m.time_embed_dim;
        std::size_t erow = layout.embed +
                           static_cast<std::size_t>(embed_row(m, cond)) * m.cond_embed_dim;
        const double* w = params + O.w;
        for (int i = 0; i < O.rows; ++i) {
            double g = 2.0 * (ws.out[i] - target[i]);
            for (int j = 0; j < m.cond_embed_dim; ++j) {
                grad[erow + j] += g * w[static_cast<std::size_t>(i) * O.cols + emb_base + j];
            }
        }
    }
    return sq;
}

}  // namespace

ParamLayout::ParamLayout(const DenoiserModel& m) {
    std::size_t off = 0;
    embed = off;
    off += static_cast<std::size_t>(m.num_conditions + 1) * m.cond_embed_dim;
    int in_n = m.input_dim();
    for (int h : m.hidden_widths) {
        Layer L;
        L.rows = h;
        L.cols = in_n;
        L.w = off;
        off += static_cast<std::size_t>(h) * in_n;
        L.b = off;
        off += h;
        layers.push_back(L);
        in_n = h;
    }
    Layer O;
    O.rows = m.data_dim;
    O.cols = in_n;
    O.w = off;
    off += static_cast<std::size_t>(m.data_dim) * in_n;
    O.b = off;
    off += m.data_dim;
    layers.push_back(O);
    total = off;
}

std::size_t DenoiserModel::param_count() const {
    return ParamLayout(*this).total;
}

void DenoiserModel::validate_arch() const {
    if (data_dim < 1 || num_conditions < 1 || cond_embed_dim < 1) {
        throw ConfigError("denoiser: data_dim, num_conditions and cond_embed_dim must be positive");
    }
    if (time_embed_dim < 2 || time_embed_dim % 2 != 0) {
        throw ConfigError("denoiser: time_embed_dim must be even and >= 2");
    }
    for (int h : hidden_widths) {
        if (h < 1) throw ConfigError("denoiser: hidden widths must be positive");
    }
}

void init_params(DenoiserModel& m, Rng& rng) {
    m.validate_arch();
    ParamLayout layout(m);
    m.parameters.assign(layout.total, 0.0);
    double* p = m.parameters.data();

    const std::size_t emb_n = static_cast<std::size_t>(m.num_conditions + 1) * m.cond_embed_dim;
    for (std::size_t i = 0; i < emb_n; ++i) p[layout.embed + i] = rng.uniform(-0.1, 0.1);

    // hidden layers: U(-1/sqrt(fan_in), 1/sqrt(fan_in)); output layer stays 0
    for (std::size_t l = 0; l + 1 < layout.layers.size(); ++l) {
        const auto& L = layout.layers[l];
        double bound = 1.0 / std::sqrt(static_cast<double>(L.cols));
        for (std::size_t i = 0; i < static_cast<std::size_t>(L.rows) * L.cols; ++i) {
            p[L.w + i] = rng.uniform(-bound, bound);
        }
    }
}

Workspace::Workspace(const DenoiserModel& m) : layout(m) {
    input.assign(m.input_dim(), 0.0);
    for (int h : m.hidden_widths) {
        z.emplace_back(h, 0.0);
        act.emplace_back(h, 0.0);
        sig.emplace_back(h, 0.0);
        delta.emplace_back(h, 0.0);
    }
    if (delta.empty()) delta.emplace_back(m.input_dim(), 0.0);
    out.assign(m.data_dim, 0.0);
}

void time_features(double t, int dim, std::span<double> out) {
    const int half = dim / 2;
    for (int k = 0; k < half; ++k) {
        double omega = half > 1 ? std::pow(1000.0, static_cast<double>(k) / (half - 1)) : 1.0;
        out[2 * k] = std::sin(omega * t);
        out[2 * k + 1] = std::cos(omega * t);
    }
}

void predict_eps(const DenoiserModel& m, std::span<const double> x, double t,
                 int cond, Workspace& ws, std::span<double> out) {
    build_input(m, ws.layout, x, t, cond, ws);
    forward(m, ws.layout, ws);
    for (int i = 0; i < m.data_dim; ++i) out[i] = ws.out[i];
}

Vec predict_eps(const DenoiserModel& m, std::span<const double> x, double t, int cond) {
    Workspace ws(m);
    Vec out(m.data_dim, 0.0);
    predict_eps(m, x, t, cond, ws, out);
    return out;
}

void TrainBatch::resize(std::size_t n, int dim) {
    data_dim = dim;
    x.assign(n * dim, 0.0);
    t.assign(n, 0.0);
    cond.assign(n, 0);
    eps_target.assign(n * dim, 0.0);
}

void TrainBatch::validate(const DenoiserModel& m) const {
    const std::size_t n = size();
    if (n == 0) throw std::invalid_argument("loss_and_grad: empty batch");
    if (data_dim != m.data_dim || x.size() != n * m.data_dim ||
        eps_target.size() != n * m.data_dim || cond.size() != n) {
        throw std::invalid_argument("loss_and_grad: batch shape mismatch");
    }
}

GradientBundle loss_and_grad(const DenoiserModel& m, const TrainBatch& batch, ExecMode mode) {
    batch.validate(m);
    ParamLayout layout(m);
    if (m.parameters.size() != layout.total) {
        throw std::invalid_argument("loss_and_grad: parameter vector does not match architecture");
    }
    const std::size_t n = batch.size();
    const int dim = m.data_dim;

    GradientBundle result;
    result.grads.assign(layout.total, 0.0);

    double loss_sum = 0.0;
#ifdef _OPENMP
    const int workers = mode == ExecMode::Parallel ? worker_count() : 1;
#else
    const int workers = 1;
#endif
    if (workers <= 1) {
        Workspace ws(m);
        for (std::size_t i = 0; i < n; ++i) {
            build_input(m, layout, {batch.x.data() + i * dim, static_cast<std::size_t>(dim)},
                        batch.t[i], batch.cond[i], ws);
            forward(m, layout, ws);
            loss_sum += backward(m, layout, batch.cond[i],
                                 {batch.eps_target.data() + i * dim, static_cast<std::size_t>(dim)},
                                 ws, result.grads.data());
        }
    } else {
#ifdef _OPENMP
        std::vector<Vec> partial_grads(workers);
        std::vector<double> partial_loss(workers, 0.0);
#pragma omp parallel num_threads(workers)
        {
            const int tid = omp_get_thread_num();
            partial_grads[tid].assign(layout.total, 0.0);
            Workspace ws(m);
            double local = 0.0;
#pragma omp for schedule(static)
            for (std::size_t i = 0; i < n; ++i) {
                build_input(m, layout, {batch.x.data() + i * dim, static_cast<std::size_t>(dim)},
                            batch.t[i], batch.cond[i], ws);
                forward(m, layout, ws);
                local += backward(m, layout, batch.cond[i],
                                  {batch.eps_target.data() + i * dim, static_cast<std::size_t>(dim)},
                                  ws, partial_grads[tid].data());
            }
            partial_loss[tid] = local;
        }
        for (int w = 0; w < workers; ++w) {  // fixed combine order
            loss_sum += partial_loss[w];
            if (partial_grads[w].empty()) continue;
            for (std::size_t i = 0; i < layout.total; ++i) result.grads[i] += partial_grads[w][i];
        }
#endif
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    result.loss = loss_sum * inv_n;
    for (double& g : result.grads) g *= inv_n;
    return result;
}

void adamw_step(DenoiserModel& m, const GradientBundle& g, double lr, AdamState& state) {
    const std::size_t n = m.parameters.size();
    if (g.grads.size() != n) {
        throw std::invalid_argument("adamw_step: gradient/parameter size mismatch");
    }
    if (state.m.empty()) {
        state.m.assign(n, 0.0);
        state.v.assign(n, 0.0);
    }
    if (state.m.size() != n || state.v.size() != n) {
        throw std::invalid_argument("adamw_step: optimizer state size mismatch");
    }
    if (!all_finite(g.grads)) {
        throw NumericalError("adamw_step: non-finite gradient at step " +
                             std::to_string(state.step + 1));
    }
    const auto& c = state.cfg;
    state.step += 1;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
    double* p = m.parameters.data();
    double* mm = state.m.data();
    double* vv = state.v.data();
    const double* gr = g.grads.data();
    for (std::size_t i = 0; i < n; ++i) {
        mm[i] = c.beta1 * mm[i] + (1.0 - c.beta1) * gr[i];
        vv[i] = c.beta2 * vv[i] + (1.0 - c.beta2) * gr[i] * gr[i];
        double m_hat = mm[i] / bc1;
        double v_hat = vv[i] / bc2;
        p[i] -= lr * (m_hat / (std::sqrt(v_hat) + c.eps) + c.weight_decay * p[i]);
    }
}

}  // namespace rectikit
