#pragma once

#include "defence/fence_mask.hpp"
#include "defence/image.hpp"
#include "defence/motion.hpp"
#include "defence/operators.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace defence {

enum class TvMode { Isotropic, Anisotropic };

/// Which ratio sets the shrinkage threshold. `LambdaOverMu` exists only for
/// comparison runs; it wipes out almost every gradient at usual settings.
enum class ShrinkRule { MuOverLambda, LambdaOverMu };

struct SolverParams {
    double mu = 1e-5;       ///< TV weight
    double lambda = 0.01;   ///< splitting weight
    int outer_iters = 50;
    int inner_iters = 10;
    std::optional<double> step_tau;  ///< default 1 / (frames + 4 lambda)
    double tol = 1e-4;               ///< stop once rel_change drops below
    TvMode tv_mode = TvMode::Isotropic;
    ShrinkRule shrink_rule = ShrinkRule::MuOverLambda;

    void validate() const;
    double shrink_threshold() const;
};

struct BregmanState {
    ImagePlane x;
    ImagePlane dx, dy;
    ImagePlane bx, by;
    int iter = 0;
    double tau = 0.0;  ///< current step; 0 means "use the default"

    /// x0 with d = b = 0.
    static BregmanState start(ImagePlane x0);
};

struct ConvergenceRecord {
    int iter = 0;
    double data_energy = 0.0;
    double tv_energy = 0.0;
    double total = 0.0;
    double rel_change = 0.0;
};

/// Isotropic mode scales each
/// gradient vector by max(|v| - t, 0) / |v|; anisotropic soft-thresholds
/// each component.
Gradient shrink(const ImagePlane& vx, const ImagePlane& vy, double threshold, TvMode mode);

/// Scalar soft threshold sign(v) max(|v| - t, 0).
double shrink_scalar(double v, double threshold) noexcept;

/// 0.5 sum ||A x - y||^2 + 0.5 lambda ||grad x - d + b||^2.
double x_subproblem_objective(const BregmanState& s, std::span<const FrameObservation> obs,
                              const SolverParams& p);

/// One split Bregman solver for a single channel with prebuilt operators.
class SplitBregman {
public:
    SplitBregman(std::vector<FrameObservation> obs, SolverParams params, BregmanState state);

    /// Runs inner_iters gradient steps on x. A step that raises the
    /// objective is undone and retried with half the step; the reduced step
    /// is kept for later iterations.
    void solve_x();
    /// d = shrink(grad x + b), b = grad x + b - d.
    void update_splitting();
    /// solve_x + update_splitting + energies.
    ConvergenceRecord step();

    double data_energy() const;
    double tv_energy() const;

    const BregmanState& state() const noexcept { return state_; }
    std::size_t frame_count() const noexcept { return ops_.size(); }

private:
    double subproblem_objective(std::span<const double> x, std::vector<std::vector<double>>& residuals,
                                std::vector<double>& grad_term) const;

    std::vector<FrameObservation> obs_;
    std::vector<DegradationOperator> ops_;
    GradientOperator grad_op_;
    SolverParams params_;
    BregmanState state_;
};

ImagePlane solve_x_subproblem(const BregmanState& state, std::span<const FrameObservation> obs,
                              const SolverParams& p);

struct BregmanStepResult {
    BregmanState state;
    ConvergenceRecord record;
};
BregmanStepResult bregman_step(const BregmanState& state, std::span<const FrameObservation> obs,
                               const SolverParams& p);

using Motion = std::variant<FlowField, GlobalShift>;

enum class InitMode { RandomUniform, ReferenceFrame };

struct InitSpec {
    InitMode mode = InitMode::RandomUniform;
    std::uint64_t seed = 7;
};

struct DefenceResult {
    ColorImage image;
    std::vector<ConvergenceRecord> log;
};

/// Recovers the latent image in frame 0's geometry. Channels advance in
/// lockstep; energies in the log are summed over channels and rel_change is
/// measured on the stacked channels. `psfs` is empty or one kernel per frame.
DefenceResult defence(const std::vector<ColorImage>& frames, const std::vector<FenceMask>& masks,
                      const std::vector<Motion>& motions, const SolverParams& params,
                      const InitSpec& init, const std::vector<Kernel2D>& psfs = {});

/// Header `iter,data_energy,tv_energy,total,rel_change`, one row per record.
void write_convergence_csv(const std::filesystem::path& path,
                           std::span<const ConvergenceRecord> log);

}  // namespace defence
