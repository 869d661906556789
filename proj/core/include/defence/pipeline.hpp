#pragma once

#include "defence/fence_mask.hpp"
#include "defence/gabor.hpp"
#include "defence/image.hpp"
#include "defence/motion.hpp"
#include "defence/sliding_window.hpp"
#include "defence/solver.hpp"
#include "defence/svm.hpp"

#include <string>
#include <variant>
#include <vector>

namespace defence {

/// Masks supplied by the caller; detection is skipped.
struct GivenMasks {
    std::vector<FenceMask> masks;
};

struct SvmDetectionConfig {
    SvmModel model;
    SvmDetectOptions options;
};

using DetectionConfig = std::variant<GivenMasks, GaborDetectOptions, SvmDetectionConfig>;

enum class MotionKind { Global, Dense, Given };

struct MotionConfig {
    MotionKind kind = MotionKind::Dense;
    int radius = 20;                 ///< global search radius
    FlowParams flow;                 ///< presmooth_sigma also applies to the global search
    std::vector<Motion> given;       ///< used with MotionKind::Given, one per frame
};

struct PipelineConfig {
    DetectionConfig detection = GaborDetectOptions{};
    MotionConfig motion;
    SolverParams solver;
    InitSpec init;
    std::vector<Kernel2D> psfs;
};

struct PipelineResult {
    ColorImage image;
    std::vector<FenceMask> masks;
    std::vector<Motion> motions;
    std::vector<ConvergenceRecord> log;
    std::vector<std::string> warnings;
};

/// detect -> motion of every frame against frame 0 -> solve. Errors are
/// rethrown with the failing stage name ("detection", "motion", "solver")
/// prefixed to the message.
PipelineResult pipeline_run(const std::vector<ColorImage>& frames, const PipelineConfig& cfg);

}  // namespace defence
