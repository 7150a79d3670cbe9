#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rectikit/common.hpp"
#include "rectikit/denoiser.hpp"
#include "rectikit/schedule.hpp"

namespace rectikit {

enum class GridScheme { UniformT, UniformLambda };
enum class Solver { Ddim, Euler };

// Strictly decreasing times from 1 to 0; steps() intervals.
struct TimeGrid {
    std::vector<double> times;
    int steps() const { return static_cast<int>(times.size()) - 1; }
};

// UniformT spaces times equally in t. UniformLambda spaces the interior
// equally in log-SNR between lambda(1) and lambda(kTMinClip), mapped back
// through the schedule inverse; endpoints are forced to exactly 1 and 0.
TimeGrid make_grid(const NoiseSchedule& sched, int steps, GridScheme scheme = GridScheme::UniformT);

// One solver run's bookkeeping: states has one entry per grid time and
// eps_history holds the guided prediction used for each of the steps() moves.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> eps_history;
};

// First-order update from x_s at time s to time t < s under a frozen noise
// prediction eps_hat:
//   x_t = (alpha_t/alpha_s) x_s - alpha_t (sigma_s/alpha_s - sigma_t/alpha_t) eps_hat
// Exact whenever the model's prediction is constant along the trajectory.
Vec ddim_step(const NoiseSchedule& sched, std::span<const double> x_s, double s, double t,
              std::span<const double> eps_hat);

// Explicit Euler update of dx = [f_coeff x + g^2/(2 sigma_s) eps_hat] dt.
// Convergence baseline; requires s >= kTMinClip so sigma_s > 0.
Vec euler_step(const NoiseSchedule& sched, std::span<const double> x_s, double s, double t,
               std::span<const double> eps_hat);

// Anything that can produce an eps prediction; implementations may keep
// scratch state, so parallel drivers clone one instance per worker.
struct EpsSource {
    virtual ~EpsSource() = default;
    virtual int dim() const = 0;
    virtual void predict(std::span<const double> x, double t, int cond, std::span<double> out) = 0;
    virtual std::unique_ptr<EpsSource> clone() const = 0;
};

// EpsSource backed by a DenoiserModel (borrowed; caller keeps it alive).
class ModelEpsSource final : public EpsSource {
public:
    explicit ModelEpsSource(const DenoiserModel& m) : model_(&m), ws_(m) {}
    int dim() const override { return model_->data_dim; }
    void predict(std::span<const double> x, double t, int cond, std::span<double> out) override {
        predict_eps(*model_, x, t, cond, ws_, out);
    }
    std::unique_ptr<EpsSource> clone() const override {
        return std::make_unique<ModelEpsSource>(*model_);
    }

private:
    const DenoiserModel* model_;
    Workspace ws_;
};

// Classifier-free guidance: (1 - w) * eps(x,t,null) + w * eps(x,t,cond).
// cond must be a real condition id. w = 1 skips the unconditional call.
void guided_eps(EpsSource& src, std::span<const double> x, double t, int cond, double w,
                std::span<double> out, Vec& scratch);
Vec guided_eps(const DenoiserModel& m, std::span<const double> x, double t, int cond, double w);

struct SampleResult {
    Vec x0;
    std::optional<Trajectory> trajectory;
};

// Integrates the chosen solver over the grid from t = 1 to t = 0, applying
// guidance at every state. Deterministic given the starting noise.
SampleResult sample(EpsSource& src, const NoiseSchedule& sched, const TimeGrid& grid,
                    int cond, double w, std::span<const double> noise,
                    Solver solver = Solver::Ddim, bool record = false);
SampleResult sample(const DenoiserModel& m, const NoiseSchedule& sched, const TimeGrid& grid,
                    int cond, double w, std::span<const double> noise,
                    Solver solver = Solver::Ddim, bool record = false);

// Batch kernel: row i starts from noises[i*dim .. ) with condition conds[i]
// and lands in out_x0[i*dim .. ). Rows are independent, so Serial and
// Parallel produce identical bytes. When trajectories != nullptr the first
// record_count rows are recorded into it.
void sample_many(const EpsSource& proto, const NoiseSchedule& sched, const TimeGrid& grid,
                 std::span<const int> conds, double w, std::span<const double> noises,
                 Solver solver, ExecMode mode, std::span<double> out_x0,
                 std::vector<Trajectory>* trajectories = nullptr, std::size_t record_count = 0);
void sample_many(const DenoiserModel& m, const NoiseSchedule& sched, const TimeGrid& grid,
                 std::span<const int> conds, double w, std::span<const double> noises,
                 Solver solver, ExecMode mode, std::span<double> out_x0,
                 std::vector<Trajectory>* trajectories = nullptr, std::size_t record_count = 0);

}  // namespace rectikit
