#include "commands.hpp"

#include "args.hpp"

#include <defence/error.hpp>
#include <defence/flo_io.hpp>
#include <defence/gabor.hpp>
#include <defence/image_io.hpp>
#include <defence/mask_score.hpp>
#include <defence/metrics.hpp>
#include <defence/pipeline.hpp>
#include <defence/sliding_window.hpp>
#include <defence/solver.hpp>
#include <defence/svm.hpp>
#include <defence/synth.hpp>

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>

namespace fs = std::filesystem;

namespace defence::cli {

namespace {

void require_file(const std::string& path) {
    if (!fs::is_regular_file(path)) throw UsageError("no such file: " + path);
}

std::vector<std::string> file_list(const std::string& s, const char* what) {
    std::vector<std::string> out;
    for (auto& p : split(s, ',')) {
        if (p.empty()) throw UsageError(std::string("empty entry in ") + what);
        require_file(p);
        out.push_back(std::move(p));
    }
    return out;
}

ImagePlane read_gray(const std::string& path) {
    require_file(path);
    return to_grayscale(read_image(path));
}

struct GaborArgs {
    std::string thetas = "45,225";
    double lambda = 4.0;
    double sigma = 4.0;
    double gamma = 0.5;
    double psi = 0.0;
    std::string threshold = "otsu";
    int dilate = 1;
    bool no_refine = false;

    /// `prefix` keeps the names apart from solver options in `run`.
    void add(CLI::App* sub, const std::string& prefix = "") {
        auto name = [&](const char* n) { return "--" + prefix + n; };
        sub->add_option(name("thetas"), thetas, "Filter orientations in degrees")->capture_default_str();
        sub->add_option(name("lambda"), lambda, "Gabor wavelength (px)")->capture_default_str();
        sub->add_option(name("sigma"), sigma, "Gabor envelope sigma (px)")->capture_default_str();
        sub->add_option(name("gamma"), gamma, "Gabor aspect ratio")->capture_default_str();
        sub->add_option(name("psi"), psi, "Gabor phase (rad)")->capture_default_str();
        sub->add_option(name("threshold"), threshold, "otsu or a response level in [0,1]")
            ->capture_default_str();
        sub->add_option(name("dilate"), dilate, "3x3 dilation passes")->capture_default_str();
        sub->add_flag(name("no-refine"), no_refine, "Keep the raw thresholded response band");
    }

    GaborDetectOptions options() const {
        GaborDetectOptions o;
        o.thetas_deg = parse_number_list(thetas, "--thetas");
        o.base.wavelength = lambda;
        o.base.sigma = sigma;
        o.base.aspect = gamma;
        o.base.phase = psi;
        if (threshold == "otsu") {
            o.threshold = OtsuThreshold{};
        } else {
            o.threshold = FixedThreshold{parse_number(threshold, "--threshold")};
        }
        o.dilate_iters = dilate;
        o.refine_by_intensity = !no_refine;
        return o;
    }
};

struct SvmArgs {
    std::string model;
    int stride = 8;
    std::string scales = "1,0.8333333333333334,0.6944444444444444";
    std::string template_path;

    void add(CLI::App* sub) {
        sub->add_option("--model", model, "Trained SVM model file");
        sub->add_option("--stride", stride, "Window stride (px)")->capture_default_str();
        sub->add_option("--scales", scales, "Image scales to scan")->capture_default_str();
        sub->add_option("--template", template_path, "Window-sized mask stamped on hits");
    }

    SvmDetectionConfig config() const {
        if (model.empty()) throw UsageError("--model is required for SVM detection");
        require_file(model);
        SvmDetectionConfig c{load_svm_model(model), {}};
        c.options.stride = stride;
        c.options.scales = parse_number_list(scales, "--scales");
        if (!template_path.empty()) {
            require_file(template_path);
            c.options.template_mask = read_mask(template_path);
        }
        return c;
    }
};

struct FlowArgs {
    double presmooth = 1.5;
    double alpha = 15.0;
    std::string levels = "auto";
    int iters = 100;
    int warps = 3;
    double scale_factor = 0.5;

    void add(CLI::App* sub) {
        sub->add_option("--presmooth", presmooth, "Gaussian sigma applied before estimation")->capture_default_str();
        sub->add_option("--alpha", alpha, "Smoothness weight")->capture_default_str();
        sub->add_option("--levels", levels, "Pyramid levels or 'auto'")->capture_default_str();
        sub->add_option("--iters", iters, "Jacobi iterations per warp")->capture_default_str();
        sub->add_option("--warps", warps, "Warps per pyramid level")->capture_default_str();
        sub->add_option("--scale-factor", scale_factor, "Pyramid downscale factor")->capture_default_str();
    }

    FlowParams params() const {
        FlowParams p;
        p.presmooth_sigma = presmooth;
        p.alpha = alpha;
        p.levels = levels == "auto" ? 0 : parse_int(levels, "--levels");
        if (levels != "auto" && p.levels < 1) throw UsageError("--levels must be >= 1 or 'auto'");
        p.iters = iters;
        p.warps = warps;
        p.scale_factor = scale_factor;
        return p;
    }
};

void print_fixed(const char* key, double v) {
    std::cout << key << ' ' << std::fixed << std::setprecision(4) << v << '\n';
}

}  // namespace

void add_detect(CLI::App& app) {
    struct Args {
        std::string method = "gabor";
        std::string input, output;
        GaborArgs gabor;
        SvmArgs svm;
    };
    auto a = std::make_shared<Args>();
    auto* sub = app.add_subcommand("detect", "Detect fence pixels in one frame");
    sub->add_option("--method", a->method, "gabor or svm")
        ->check(CLI::IsMember({"gabor", "svm"}))
        ->capture_default_str();
    sub->add_option("--input", a->input, "Input frame (PNG)")->required();
    sub->add_option("--output", a->output, "Output mask (PNG, 0 = fence)")->required();
    a->gabor.add(sub);
    a->svm.add(sub);
    sub->callback([a] {
        const ImagePlane gray = read_gray(a->input);
        if (a->method == "gabor") {
            write_mask(a->output, detect_fence_gabor(gray, a->gabor.options()));
            return;
        }
        const SvmDetectionConfig cfg = a->svm.config();
        const SvmDetection det = detect_fence_svm(gray, cfg.model, cfg.options);
        for (const auto& w : det.warnings) std::cerr << "warning: " << w << '\n';
        write_mask(a->output, det.mask);
        std::cout << "windows " << det.windows_scanned << "\nhits " << det.hits.size() << '\n';
    });
}

void add_train_svm(CLI::App& app) {
    struct Args {
        std::string pos, neg, out;
        int folds = 5;
        std::uint64_t seed = 42;
        std::string c_values, gamma_values;
    };
    auto a = std::make_shared<Args>();
    auto* sub = app.add_subcommand("train-svm", "Train the HOG + RBF-SVM fence classifier");
    sub->add_option("--pos", a->pos, "Directory of fence patches (PNG)")->required();
    sub->add_option("--neg", a->neg, "Directory of non-fence patches (PNG)")->required();
    sub->add_option("--out", a->out, "Model output path")->required();
    sub->add_option("--folds", a->folds, "Cross-validation folds")->capture_default_str();
    sub->add_option("--seed", a->seed, "Fold shuffling seed")->capture_default_str();
    sub->add_option("--c-values", a->c_values, "Override the C grid");
    sub->add_option("--gamma-values", a->gamma_values, "Override the gamma grid");
    sub->callback([a] {
        const HogConfig cfg;
        std::vector<LabeledPatch> patches;
        auto load_dir = [&](const std::string& dir, PatchLabel label) {
            if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir);
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(dir)) {
                if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
            }
            std::sort(files.begin(), files.end());
            for (const auto& f : files) {
                ImagePlane g = to_grayscale(read_image(f));
                if (g.width() != cfg.window_width || g.height() != cfg.window_height) {
                    throw InvalidArgument(f.string() + ": patch is " + std::to_string(g.width()) + "x" +
                                          std::to_string(g.height()) + ", expected " +
                                          std::to_string(cfg.window_width) + "x" +
                                          std::to_string(cfg.window_height));
                }
                patches.push_back({std::move(g), label});
            }
        };
        load_dir(a->pos, PatchLabel::Fence);
        load_dir(a->neg, PatchLabel::NonFence);
        SvmTrainOptions opts;
        opts.folds = a->folds;
        opts.seed = a->seed;
        if (!a->c_values.empty()) opts.grid.c_values = parse_number_list(a->c_values, "--c-values");
        if (!a->gamma_values.empty()) {
            opts.grid.gamma_values = parse_number_list(a->gamma_values, "--gamma-values");
        }
        const SvmTrainResult r = train_svm(patches, opts, cfg);
        save_svm_model(a->out, r.model);
        std::cout << "best_c " << r.cv.best_c << "\nbest_gamma " << r.cv.best_gamma << '\n';
        print_fixed("cv_accuracy", r.cv.best_accuracy);
        print_fixed("training_accuracy", r.training_accuracy);
        std::cout << "support_vectors " << r.model.support_vectors.size() << '\n';
    });
}

void add_flow(CLI::App& app) {
    struct Args {
        std::string ref, tgt, out;
        FlowArgs flow;
    };
    auto a = std::make_shared<Args>();
    auto* sub = app.add_subcommand("flow", "Dense optical flow between two frames (.flo)");
    sub->add_option("--ref", a->ref, "Reference frame")->required();
    sub->add_option("--tgt", a->tgt, "Target frame")->required();
    sub->add_option("--out", a->out, "Output .flo file")->required();
    a->flow.add(sub);
    sub->callback([a] {
        const FlowParams p = a->flow.params();
        write_flow(a->out, estimate_flow(read_gray(a->ref), read_gray(a->tgt), p));
    });
}

void add_shift(CLI::App& app) {
    struct Args {
        std::string ref, tgt, mask, tgt_mask;
        int radius = 20;
        double presmooth = 0.0;
    };
    auto a = std::make_shared<Args>();
    auto* sub = app.add_subcommand("shift", "Global translation of tgt relative to ref");
    sub->add_option("--ref", a->ref, "Reference frame")->required();
    sub->add_option("--tgt", a->tgt, "Target frame")->required();
    sub->add_option("--radius", a->radius, "Search radius (px)")->capture_default_str();
    sub->add_option("--mask", a->mask, "Validity mask for ref (and tgt unless --tgt-mask)");
    sub->add_option("--tgt-mask", a->tgt_mask, "Validity mask for tgt");
    sub->add_option("--presmooth", a->presmooth, "Gaussian sigma applied first")->capture_default_str();
    sub->callback([a] {
        const ImagePlane ref = presmooth(read_gray(a->ref), a->presmooth);
        const ImagePlane tgt = presmooth(read_gray(a->tgt), a->presmooth);
        FenceMask ref_mask(ref.width(), ref.height());
        if (!a->mask.empty()) {
            require_file(a->mask);
            ref_mask = read_mask(a->mask);
        }
        FenceMask tgt_mask = ref_mask;
        if (!a->tgt_mask.empty()) {
            require_file(a->tgt_mask);
            tgt_mask = read_mask(a->tgt_mask);
        }
        const GlobalShift s = estimate_global_shift(ref, tgt, ref_mask, tgt_mask, a->radius);
        std::cout << std::setprecision(6) << s.dx << ' ' << s.dy << '\n';
    });
}

void add_run(CLI::App& app) {
    struct Args {
        std::string frames, masks, flows, shifts;
        std::string detect = "gabor";
        std::string motion = "dense";
        int radius = 20;
        GaborArgs gabor;
        SvmArgs svm;
        FlowArgs flow;
        double mu = 1e-5, lambda = 0.01, tol = 1e-4;
        int outer = 50, inner = 10;
        double tau = 0.0;
        std::string tv = "isotropic";
        std::string shrink_rule = "mu-over-lambda";
        std::string init = "random";
        std::uint64_t seed = 7;
        double psf_sigma = 0.0;
        std::string out, log, save_masks, save_flows;
    };
    auto a = std::make_shared<Args>();
    auto* sub = app.add_subcommand("run", "Detect, register and reconstruct a fence-free image");
    sub->add_option("--frames", a->frames, "Comma-separated frames; the first is the reference")->required();
    sub->add_option("--masks", a->masks, "Comma-separated masks (skips detection)");
    sub->add_option("--detect", a->detect, "gabor, svm or none")
        ->check(CLI::IsMember({"gabor", "svm", "none"}))
        ->capture_default_str();
    sub->add_option("--flows", a->flows, "Comma-separated .flo files, frame m -> reference");
    sub->add_option("--shifts", a->shifts, "Frame shifts \"dx,dy;dx,dy;...\"");
    sub->add_option("--motion", a->motion, "dense or global when no motion is given")
        ->check(CLI::IsMember({"dense", "global"}))
        ->capture_default_str();
    sub->add_option("--radius", a->radius, "Global shift search radius")->capture_default_str();
    a->gabor.add(sub, "gabor-");
    a->svm.add(sub);
    a->flow.add(sub);
    sub->add_option("--mu", a->mu, "TV weight")->capture_default_str();
    sub->add_option("--lambda", a->lambda, "Splitting weight")->capture_default_str();
    sub->add_option("--outer", a->outer, "Bregman iterations")->capture_default_str();
    sub->add_option("--inner", a->inner, "Gradient steps per Bregman iteration")->capture_default_str();
    sub->add_option("--tol", a->tol, "Relative-change stopping threshold")->capture_default_str();
    sub->add_option("--tau", a->tau, "Initial gradient step (default 1/(frames + 4 lambda))");
    sub->add_option("--tv", a->tv, "isotropic or anisotropic")
        ->check(CLI::IsMember({"isotropic", "anisotropic"}))
        ->capture_default_str();
    sub->add_option("--shrink-rule", a->shrink_rule, "Shrinkage threshold ratio (debug)")
        ->check(CLI::IsMember({"mu-over-lambda", "lambda-over-mu"}))
        ->capture_default_str();
    sub->add_option("--init", a->init, "random or reference")
        ->check(CLI::IsMember({"random", "reference"}))
        ->capture_default_str();
    sub->add_option("--seed", a->seed, "Seed for random initialization")->capture_default_str();
    sub->add_option("--psf-sigma", a->psf_sigma, "Gaussian blur sigma of every frame (0 = none)")
        ->capture_default_str();
    sub->add_option("--out", a->out, "Reconstructed image (PNG)")->required();
    sub->add_option("--log", a->log, "Convergence CSV");
    sub->add_option("--save-masks", a->save_masks, "Directory for the masks used");
    sub->add_option("--save-flows", a->save_flows, "Directory for the estimated motion");
    sub->callback([a] {
        const auto frame_paths = file_list(a->frames, "--frames");
        const std::size_t n = frame_paths.size();
        if (!a->flows.empty() && !a->shifts.empty()) throw UsageError("give --flows or --shifts, not both");

        PipelineConfig cfg;
        if (!a->masks.empty()) {
            GivenMasks given;
            for (const auto& p : file_list(a->masks, "--masks")) given.masks.push_back(read_mask(p));
            cfg.detection = std::move(given);
        } else if (a->detect == "none") {
            throw UsageError("--detect none needs --masks");
        } else if (a->detect == "svm") {
            cfg.detection = a->svm.config();
        } else {
            cfg.detection = a->gabor.options();
        }

        cfg.motion.flow = a->flow.params();
        cfg.motion.radius = a->radius;
        cfg.motion.kind = a->motion == "global" ? MotionKind::Global : MotionKind::Dense;
        auto pad_reference = [n](std::vector<Motion> m, const char* what) {
            if (m.size() + 1 == n) m.insert(m.begin(), GlobalShift{});
            if (m.size() != n) {
                throw UsageError(std::string(what) + ": expected " + std::to_string(n) + " or " +
                                 std::to_string(n - 1) + " entries");
            }
            return m;
        };
        if (!a->shifts.empty()) {
            std::vector<Motion> m;
            for (const auto& s : parse_shift_list(a->shifts)) m.emplace_back(s);
            cfg.motion.kind = MotionKind::Given;
            cfg.motion.given = pad_reference(std::move(m), "--shifts");
        } else if (!a->flows.empty()) {
            std::vector<Motion> m;
            for (const auto& p : file_list(a->flows, "--flows")) m.emplace_back(read_flow(p));
            cfg.motion.kind = MotionKind::Given;
            cfg.motion.given = pad_reference(std::move(m), "--flows");
        }

        cfg.solver.mu = a->mu;
        cfg.solver.lambda = a->lambda;
        cfg.solver.outer_iters = a->outer;
        cfg.solver.inner_iters = a->inner;
        cfg.solver.tol = a->tol;
        if (a->tau != 0.0) cfg.solver.step_tau = a->tau;
        cfg.solver.tv_mode = a->tv == "anisotropic" ? TvMode::Anisotropic : TvMode::Isotropic;
        cfg.solver.shrink_rule =
            a->shrink_rule == "lambda-over-mu" ? ShrinkRule::LambdaOverMu : ShrinkRule::MuOverLambda;
        cfg.solver.validate();
        cfg.init.mode = a->init == "reference" ? InitMode::ReferenceFrame : InitMode::RandomUniform;
        cfg.init.seed = a->seed;
        if (a->psf_sigma < 0.0) throw UsageError("--psf-sigma must be >= 0");
        if (a->psf_sigma > 0.0) cfg.psfs.assign(n, gaussian_kernel(a->psf_sigma));

        std::vector<ColorImage> frames;
        for (const auto& p : frame_paths) frames.push_back(read_image(p));
        const PipelineResult r = pipeline_run(frames, cfg);
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';

        write_image(a->out, r.image);
        if (!a->log.empty()) write_convergence_csv(a->log, r.log);
        if (!a->save_masks.empty()) {
            fs::create_directories(a->save_masks);
            for (std::size_t m = 0; m < n; ++m) {
                write_mask(fs::path(a->save_masks) / ("mask" + std::to_string(m + 1) + ".png"), r.masks[m]);
            }
        }
        if (!a->save_flows.empty()) {
            fs::create_directories(a->save_flows);
            const int w = frames[0].width(), h = frames[0].height();
            for (std::size_t m = 0; m < n; ++m) {
                const auto& mo = r.motions[m];
                const FlowField f = std::holds_alternative<FlowField>(mo)
                                        ? std::get<FlowField>(mo)
                                        : flow_for_shift(std::get<GlobalShift>(mo), w, h);
                write_flow(fs::path(a->save_flows) / ("flow" + std::to_string(m + 1) + ".flo"), f);
            }
        }
        if (!r.log.empty()) {
            const auto& last = r.log.back();
            std::cout << "iterations " << last.iter << '\n';
            std::cout << "total_energy " << std::setprecision(8) << last.total << '\n';
            std::cout << "rel_change " << last.rel_change << '\n';
        }
    });
}

void add_synth(CLI::App& app) {
    struct Args {
        std::string image, out_dir;
        std::string shifts = "0,0;-8,-8;8,8;15,15";
        std::string angles = "0,90";
        int width = 7, period = 48;
        double offset = 24.0, color = 128.0, noise = 0.0;
        std::uint64_t seed = 1;
    };
    auto a = std::make_shared<Args>();
    auto* sub = app.add_subcommand("synth", "Generate shifted, fenced frames from a clean image");
    sub->add_option("--image", a->image, "Clean source image")->required();
    sub->add_option("--out-dir", a->out_dir, "Output directory")->required();
    sub->add_option("--shifts", a->shifts, "Scene shift per frame; the first must be 0,0")->capture_default_str();
    sub->add_option("--fence-width", a->width, "Bar thickness (px)")->capture_default_str();
    sub->add_option("--fence-period", a->period, "Bar spacing (px)")->capture_default_str();
    sub->add_option("--angles", a->angles, "Bar directions (deg)")->capture_default_str();
    sub->add_option("--fence-offset", a->offset, "Offset of the first bar (px)")->capture_default_str();
    sub->add_option("--fence-color", a->color, "Fence intensity")->capture_default_str();
    sub->add_option("--noise", a->noise, "Gaussian noise sigma")->capture_default_str();
    sub->add_option("--seed", a->seed, "Noise seed")->capture_default_str();
    sub->callback([a] {
        require_file(a->image);
        SynthConfig cfg;
        cfg.shifts = parse_shift_list(a->shifts);
        cfg.fence_width = a->width;
        cfg.fence_period = a->period;
        cfg.fence_angles = parse_number_list(a->angles, "--angles");
        cfg.fence_offset = a->offset;
        cfg.fence_color = a->color;
        cfg.noise_sigma = a->noise;
        cfg.seed = a->seed;
        const SynthResult r = synth_generate(read_image(a->image), cfg);
        fs::create_directories(a->out_dir);
        const fs::path dir(a->out_dir);
        for (std::size_t m = 0; m < r.frames.size(); ++m) {
            write_image(dir / ("frame" + std::to_string(m + 1) + ".png"), r.frames[m]);
            write_mask(dir / ("mask" + std::to_string(m + 1) + ".png"), r.masks[m]);
        }
        write_image(dir / "truth.png", r.truth);
    });
}

void add_metrics(CLI::App& app) {
    struct Args {
        std::string ref, test;
    };
    auto a = std::make_shared<Args>();
    auto* sub = app.add_subcommand("metrics", "PSNR and SSIM of a test image against a reference");
    sub->add_option("--ref", a->ref, "Reference image")->required();
    sub->add_option("--test", a->test, "Test image")->required();
    sub->callback([a] {
        require_file(a->ref);
        require_file(a->test);
        const ColorImage ref = read_image(a->ref);
        const ColorImage test = read_image(a->test);
        if (ref.width() != test.width() || ref.height() != test.height()) {
            throw InvalidArgument("image sizes differ: " + std::to_string(ref.width()) + "x" +
                                  std::to_string(ref.height()) + " vs " + std::to_string(test.width()) +
                                  "x" + std::to_string(test.height()));
        }
        const ImagePlane ry = to_grayscale(ref), ty = to_grayscale(test);
        // Compute everything before printing so failures leave no partial output.
        const double p = psnr(ry, ty), s = ssim(ry, ty);
        double pc[3], sc[3];
        for (std::size_t c = 0; c < 3; ++c) {
            pc[c] = psnr(ref.channel(c), test.channel(c));
            sc[c] = ssim(ref.channel(c), test.channel(c));
        }
        print_fixed("psnr", p);
        print_fixed("ssim", s);
        const char* names[3] = {"r", "g", "b"};
        for (std::size_t c = 0; c < 3; ++c) {
            print_fixed(("psnr_" + std::string(names[c])).c_str(), pc[c]);
            print_fixed(("ssim_" + std::string(names[c])).c_str(), sc[c]);
        }
    });
}

void add_mask_score(CLI::App& app) {
    struct Args {
        std::string pred, truth;
        int tolerance = 1;
    };
    auto a = std::make_shared<Args>();
    auto* sub = app.add_subcommand("mask-score", "Precision, recall and F1 of a fence mask");
    sub->add_option("--pred", a->pred, "Predicted mask")->required();
    sub->add_option("--truth", a->truth, "Ground-truth mask")->required();
    sub->add_option("--tolerance", a->tolerance, "Chebyshev tolerance (px)")->capture_default_str();
    sub->callback([a] {
        require_file(a->pred);
        require_file(a->truth);
        const MaskScore s = mask_score(read_mask(a->pred), read_mask(a->truth), a->tolerance);
        print_fixed("precision", s.precision);
        print_fixed("recall", s.recall);
        print_fixed("f1", s.f1);
    });
}

}  // namespace defence::cli
