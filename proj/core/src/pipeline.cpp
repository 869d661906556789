#include "defence/pipeline.hpp"

#include "defence/error.hpp"

#include <string>

namespace defence {

namespace {

template <typename F>
auto in_stage(const char* name, F&& f) -> decltype(f()) {
    const std::string prefix = std::string(name) + ": ";
    try {
        return f();
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(prefix + e.what());
    } catch (const IoError& e) {
        throw IoError(prefix + e.what());
    } catch (const SolverFailure& e) {
        throw SolverFailure(prefix + e.what());
    } catch (const EstimationFailure& e) {
        throw EstimationFailure(prefix + e.what());
    }
}

std::vector<FenceMask> detect_all(const std::vector<ImagePlane>& gray, const DetectionConfig& det,
                                  std::vector<std::string>& warnings) {
    std::vector<FenceMask> masks;
    if (const auto* given = std::get_if<GivenMasks>(&det)) {
        if (given->masks.size() != gray.size()) {
            throw InvalidArgument("expected " + std::to_string(gray.size()) + " masks, got " +
                                  std::to_string(given->masks.size()));
        }
        for (std::size_t m = 0; m < gray.size(); ++m) {
            if (given->masks[m].width() != gray[m].width() || given->masks[m].height() != gray[m].height()) {
                throw InvalidArgument("mask " + std::to_string(m + 1) + " differs in size from its frame");
            }
        }
        return given->masks;
    }
    for (const auto& g : gray) {
        if (const auto* gabor = std::get_if<GaborDetectOptions>(&det)) {
            masks.push_back(detect_fence_gabor(g, *gabor));
        } else {
            const auto& svm = std::get<SvmDetectionConfig>(det);
            SvmDetection d = detect_fence_svm(g, svm.model, svm.options);
            warnings.insert(warnings.end(), d.warnings.begin(), d.warnings.end());
            masks.push_back(std::move(d.mask));
        }
    }
    return masks;
}

std::vector<Motion> estimate_all(const std::vector<ImagePlane>& gray, const std::vector<FenceMask>& masks,
                                 const MotionConfig& cfg) {
    if (cfg.kind == MotionKind::Given) {
        if (cfg.given.size() != gray.size()) {
            throw InvalidArgument("expected " + std::to_string(gray.size()) + " motions, got " +
                                  std::to_string(cfg.given.size()));
        }
        return cfg.given;
    }
    std::vector<Motion> motions{GlobalShift{}};
    if (cfg.kind == MotionKind::Global) {
        const ImagePlane ref = presmooth(gray[0], cfg.flow.presmooth_sigma);
        for (std::size_t m = 1; m < gray.size(); ++m) {
            motions.emplace_back(estimate_global_shift(ref, presmooth(gray[m], cfg.flow.presmooth_sigma),
                                                       masks[0], masks[m], cfg.radius));
        }
    } else {
        // Frame m samples the latent image at p + flow, so the flow runs from frame m to frame 0.
        for (std::size_t m = 1; m < gray.size(); ++m) {
            motions.emplace_back(estimate_flow(gray[m], gray[0], cfg.flow));
        }
    }
    return motions;
}

}  // namespace

PipelineResult pipeline_run(const std::vector<ColorImage>& frames, const PipelineConfig& cfg) {
    if (frames.empty()) throw InvalidArgument("input: no frames given");
    for (std::size_t m = 1; m < frames.size(); ++m) {
        if (frames[m].width() != frames[0].width() || frames[m].height() != frames[0].height()) {
            throw InvalidArgument("input: frame " + std::to_string(m + 1) + " differs in size from frame 1");
        }
    }
    std::vector<ImagePlane> gray;
    for (const auto& f : frames) gray.push_back(to_grayscale(f));

    PipelineResult out{ColorImage(frames[0].width(), frames[0].height()), {}, {}, {}, {}};
    out.masks = in_stage("detection", [&] { return detect_all(gray, cfg.detection, out.warnings); });
    out.motions = in_stage("motion", [&] { return estimate_all(gray, out.masks, cfg.motion); });
    DefenceResult solved = in_stage(
        "solver", [&] { return defence(frames, out.masks, out.motions, cfg.solver, cfg.init, cfg.psfs); });
    out.image = std::move(solved.image);
    out.log = std::move(solved.log);
    return out;
}

}  // namespace defence
