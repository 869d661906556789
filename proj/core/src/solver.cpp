#include "defence/solver.hpp"

#include "defence/atomic_file.hpp"
#include "defence/error.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <string>

namespace defence {

namespace {

constexpr double kMinTau = 1e-8;
// Rounding slack when comparing objective values across a step.
constexpr double kObjectiveSlack = 1e-12;

double sum_squares(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

void put(std::ostream& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, res.ptr - buf);
}

}  // namespace

void SolverParams::validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be > 0");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be > 0");
    if (outer_iters < 1 || inner_iters < 1) throw InvalidArgument("iteration counts must be >= 1");
    if (step_tau && (!(*step_tau > 0.0) || !std::isfinite(*step_tau))) {
        throw InvalidArgument("step tau must be > 0");
    }
    if (!(tol >= 0.0)) throw InvalidArgument("tol must be >= 0");
}

double SolverParams::shrink_threshold() const {
    return shrink_rule == ShrinkRule::MuOverLambda ? mu / lambda : lambda / mu;
}

BregmanState BregmanState::start(ImagePlane x0) {
    const int w = x0.width();
    const int h = x0.height();
    return BregmanState{std::move(x0), ImagePlane(w, h), ImagePlane(w, h), ImagePlane(w, h),
                        ImagePlane(w, h), 0, 0.0};
}

double shrink_scalar(double v, double threshold) noexcept {
    const double m = std::abs(v) - threshold;
    if (m <= 0.0) return 0.0;
    return v > 0.0 ? m : -m;
}

Gradient shrink(const ImagePlane& vx, const ImagePlane& vy, double threshold, TvMode mode) {
    if (!vx.same_shape(vy)) throw InvalidArgument("shrink: component sizes differ");
    if (!(threshold >= 0.0)) throw InvalidArgument("shrink threshold must be >= 0");
    Gradient out{ImagePlane(vx.width(), vx.height()), ImagePlane(vx.width(), vx.height())};
    const auto ax = vx.values();
    const auto ay = vy.values();
    auto ox = out.gx.values();
    auto oy = out.gy.values();
    for (std::size_t i = 0; i < ax.size(); ++i) {
        if (mode == TvMode::Anisotropic) {
            ox[i] = shrink_scalar(ax[i], threshold);
            oy[i] = shrink_scalar(ay[i], threshold);
            continue;
        }
        const double s = std::hypot(ax[i], ay[i]);
        if (s <= threshold || s == 0.0) continue;
        const double f = (s - threshold) / s;
        ox[i] = ax[i] * f;
        oy[i] = ay[i] * f;
    }
    return out;
}

SplitBregman::SplitBregman(std::vector<FrameObservation> obs, SolverParams params, BregmanState state)
    : obs_(std::move(obs)),
      grad_op_(state.x.width(), state.x.height()),
      params_(std::move(params)),
      state_(std::move(state)) {
    params_.validate();
    if (obs_.empty()) throw InvalidArgument("solver needs at least one observation");
    const ImagePlane& x = state_.x;
    for (const ImagePlane* p : {&state_.dx, &state_.dy, &state_.bx, &state_.by}) {
        if (!p->same_shape(x)) throw InvalidArgument("Bregman state planes differ in size");
    }
    ops_.reserve(obs_.size());
    for (const auto& o : obs_) {
        if (!o.y.same_shape(x)) throw InvalidArgument("observation size differs from the estimate");
        ops_.emplace_back(o);
    }
    // Masked-out samples carry no data; zero them so energies only see observed pixels.
    for (std::size_t m = 0; m < obs_.size(); ++m) {
        const auto bits = ops_[m].effective_mask().bits();
        auto y = obs_[m].y.values();
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (!bits[i]) y[i] = 0.0;
        }
    }
    if (!(state_.tau > 0.0)) {
        state_.tau = params_.step_tau.value_or(
            1.0 / (static_cast<double>(ops_.size()) + 4.0 * params_.lambda));
    }
}

double SplitBregman::subproblem_objective(std::span<const double> x,
                                          std::vector<std::vector<double>>& residuals,
                                          std::vector<double>& grad_term) const {
    double data = 0.0;
    for (std::size_t m = 0; m < ops_.size(); ++m) {
        auto& r = residuals[m];
        ops_[m].apply(x, r);
        const auto y = obs_[m].y.values();
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
        data += sum_squares(r);
    }
    grad_op_.apply(x, grad_term);
    const std::size_t n = x.size();
    const auto dx = state_.dx.values(), dy = state_.dy.values();
    const auto bx = state_.bx.values(), by = state_.by.values();
    for (std::size_t i = 0; i < n; ++i) {
        grad_term[i] += bx[i] - dx[i];
        grad_term[n + i] += by[i] - dy[i];
    }
    return 0.5 * data + 0.5 * params_.lambda * sum_squares(grad_term);
}

void SplitBregman::solve_x() {
    const std::size_t n = state_.x.size();
    std::vector<std::vector<double>> res(ops_.size(), std::vector<double>(n));
    std::vector<std::vector<double>> trial_res = res;
    std::vector<double> gterm(2 * n), trial_gterm(2 * n);
    std::vector<double> g(n), tmp(n), trial(n);
    auto x = state_.x.values();
    double energy = subproblem_objective(x, res, gterm);

    for (int k = 0; k < params_.inner_iters; ++k) {
        grad_op_.apply_adjoint(gterm, g);
        for (double& v : g) v *= params_.lambda;
        for (std::size_t m = 0; m < ops_.size(); ++m) {
            ops_[m].apply_adjoint(res[m], tmp);
            for (std::size_t i = 0; i < n; ++i) g[i] += tmp[i];
        }
        if (sum_squares(g) == 0.0) break;
        for (;;) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - state_.tau * g[i];
            const double e = subproblem_objective(trial, trial_res, trial_gterm);
            if (e <= energy + kObjectiveSlack * std::abs(energy)) {
                std::copy(trial.begin(), trial.end(), x.begin());
                std::swap(res, trial_res);
                std::swap(gterm, trial_gterm);
                energy = e;
                break;
            }
            state_.tau *= 0.5;
            if (state_.tau < kMinTau) {
                throw SolverFailure("gradient step underflow (tau < 1e-8) at outer iteration " +
                                    std::to_string(state_.iter + 1));
            }
        }
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw SolverFailure("non-finite estimate in the x update");
    }
}

void SplitBregman::update_splitting() {
    const Gradient g = grad(state_.x);
    ImagePlane vx = g.gx;
    ImagePlane vy = g.gy;
    auto px = vx.values(), py = vy.values();
    const auto bx = state_.bx.values(), by = state_.by.values();
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] += bx[i];
        py[i] += by[i];
    }
    Gradient d = shrink(vx, vy, params_.shrink_threshold(), params_.tv_mode);
    auto nbx = state_.bx.values(), nby = state_.by.values();
    const auto dx = d.gx.values(), dy = d.gy.values();
    for (std::size_t i = 0; i < px.size(); ++i) {
        nbx[i] = px[i] - dx[i];
        nby[i] = py[i] - dy[i];
    }
    state_.dx = std::move(d.gx);
    state_.dy = std::move(d.gy);
}

double SplitBregman::data_energy() const {
    const std::size_t n = state_.x.size();
    std::vector<double> r(n);
    double e = 0.0;
    for (std::size_t m = 0; m < ops_.size(); ++m) {
        ops_[m].apply(state_.x.values(), r);
        const auto y = obs_[m].y.values();
        for (std::size_t i = 0; i < n; ++i) {
            const double d = r[i] - y[i];
            e += d * d;
        }
    }
    return 0.5 * e;
}

double SplitBregman::tv_energy() const {
    const Gradient g = grad(state_.x);
    const auto gx = g.gx.values(), gy = g.gy.values();
    double tv = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        tv += params_.tv_mode == TvMode::Isotropic ? std::hypot(gx[i], gy[i])
                                                   : std::abs(gx[i]) + std::abs(gy[i]);
    }
    return params_.mu * tv;
}

ConvergenceRecord SplitBregman::step() {
    const std::vector<double> prev = state_.x.vector();
    solve_x();
    update_splitting();
    ++state_.iter;
    ConvergenceRecord rec;
    rec.iter = state_.iter;
    rec.data_energy = data_energy();
    rec.tv_energy = tv_energy();
    rec.total = rec.data_energy + rec.tv_energy;
    double diff = 0.0;
    const auto x = state_.x.values();
    for (std::size_t i = 0; i < x.size(); ++i) diff += (x[i] - prev[i]) * (x[i] - prev[i]);
    const double base = std::sqrt(sum_squares(prev));
    rec.rel_change = std::sqrt(diff) / (base > 0.0 ? base : 1.0);
    return rec;
}

double x_subproblem_objective(const BregmanState& s, std::span<const FrameObservation> obs,
                              const SolverParams& p) {
    double data = 0.0;
    for (const auto& o : obs) {
        const DegradationOperator op(o);
        std::vector<double> ax(op.range_size());
        op.apply(s.x.values(), ax);
        const auto bits = op.effective_mask().bits();
        for (std::size_t i = 0; i < ax.size(); ++i) {
            const double d = ax[i] - (bits[i] ? o.y.values()[i] : 0.0);
            data += d * d;
        }
    }
    const Gradient g = grad(s.x);
    double split = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double ex = g.gx.values()[i] - s.dx.values()[i] + s.bx.values()[i];
        const double ey = g.gy.values()[i] - s.dy.values()[i] + s.by.values()[i];
        split += ex * ex + ey * ey;
    }
    return 0.5 * data + 0.5 * p.lambda * split;
}

ImagePlane solve_x_subproblem(const BregmanState& state, std::span<const FrameObservation> obs,
                              const SolverParams& p) {
    SplitBregman sb({obs.begin(), obs.end()}, p, state);
    sb.solve_x();
    return sb.state().x;
}

BregmanStepResult bregman_step(const BregmanState& state, std::span<const FrameObservation> obs,
                               const SolverParams& p) {
    SplitBregman sb({obs.begin(), obs.end()}, p, state);
    const ConvergenceRecord rec = sb.step();
    return {sb.state(), rec};
}

DefenceResult defence(const std::vector<ColorImage>& frames, const std::vector<FenceMask>& masks,
                      const std::vector<Motion>& motions, const SolverParams& params,
                      const InitSpec& init, const std::vector<Kernel2D>& psfs) {
    params.validate();
    if (frames.empty()) throw InvalidArgument("no frames given");
    if (masks.size() != frames.size() || motions.size() != frames.size()) {
        throw InvalidArgument("expected one mask and one motion per frame (" +
                              std::to_string(frames.size()) + " frames, " +
                              std::to_string(masks.size()) + " masks, " +
                              std::to_string(motions.size()) + " motions)");
    }
    if (!psfs.empty() && psfs.size() != frames.size()) {
        throw InvalidArgument("expected one psf per frame");
    }
    const int w = frames[0].width();
    const int h = frames[0].height();
    std::vector<FlowField> flows;
    for (std::size_t m = 0; m < frames.size(); ++m) {
        if (frames[m].width() != w || frames[m].height() != h) {
            throw InvalidArgument("frame " + std::to_string(m + 1) + " differs in size from frame 1");
        }
        if (masks[m].width() != w || masks[m].height() != h) {
            throw InvalidArgument("mask " + std::to_string(m + 1) + " differs in size from the frames");
        }
        if (const auto* s = std::get_if<GlobalShift>(&motions[m])) {
            flows.push_back(flow_for_shift(*s, w, h));
        } else {
            const auto& f = std::get<FlowField>(motions[m]);
            if (f.width() != w || f.height() != h) {
                throw InvalidArgument("flow " + std::to_string(m + 1) + " differs in size from the frames");
            }
            flows.push_back(f);
        }
    }

    std::mt19937_64 rng(init.seed);
    std::uniform_real_distribution<double> uniform(0.0, 255.0);
    std::vector<SplitBregman> solvers;
    solvers.reserve(3);
    for (std::size_t c = 0; c < 3; ++c) {
        ImagePlane x0(w, h);
        if (init.mode == InitMode::RandomUniform) {
            for (double& v : x0.values()) v = uniform(rng);
        } else {
            x0 = frames[0].channel(c);
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    if (masks[0].fence(x, y)) x0(x, y) = 128.0;
                }
            }
        }
        std::vector<FrameObservation> obs;
        for (std::size_t m = 0; m < frames.size(); ++m) {
            FrameObservation o{frames[m].channel(c), masks[m], flows[m], std::nullopt};
            if (!psfs.empty()) o.psf = psfs[m];
            obs.push_back(std::move(o));
        }
        solvers.emplace_back(std::move(obs), params, BregmanState::start(std::move(x0)));
    }

    DefenceResult result{ColorImage(w, h), {}};
    for (int k = 0; k < params.outer_iters; ++k) {
        ConvergenceRecord joint;
        double diff = 0.0;
        double base = 0.0;
        for (auto& s : solvers) {
            const std::vector<double> prev = s.state().x.vector();
            const ConvergenceRecord r = s.step();
            const auto x = s.state().x.values();
            for (std::size_t i = 0; i < x.size(); ++i) {
                diff += (x[i] - prev[i]) * (x[i] - prev[i]);
                base += prev[i] * prev[i];
            }
            joint.iter = r.iter;
            joint.data_energy += r.data_energy;
            joint.tv_energy += r.tv_energy;
        }
        joint.total = joint.data_energy + joint.tv_energy;
        joint.rel_change = std::sqrt(diff) / (base > 0.0 ? std::sqrt(base) : 1.0);
        result.log.push_back(joint);
        if (joint.rel_change < params.tol) break;
    }
    for (std::size_t c = 0; c < 3; ++c) result.image.channel(c) = solvers[c].state().x;
    return result;
}

void write_convergence_csv(const std::filesystem::path& path,
                           std::span<const ConvergenceRecord> log) {
    write_text_atomically(path, [&](std::ostream& out) {
        out << "iter,data_energy,tv_energy,total,rel_change\n";
        for (const auto& r : log) {
            out << r.iter << ',';
            put(out, r.data_energy);
            out << ',';
            put(out, r.tv_energy);
            out << ',';
            put(out, r.total);
            out << ',';
            put(out, r.rel_change);
            out << '\n';
        }
    });
}

}  // namespace defence
