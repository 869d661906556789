#pragma once

#include "defence/hog.hpp"
#include "defence/image.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace defence {

enum class PatchLabel : int { NonFence = -1, Fence = +1 };

/// A window-sized training example.
struct LabeledPatch {
    ImagePlane image;
    PatchLabel label;
};

/// Trained RBF-SVM. decision(d) = sum_i dual_coefs[i] k(sv_i, d) + bias.
struct SvmModel {
    std::vector<HogDescriptor> support_vectors;
    std::vector<double> dual_coefs;  ///< alpha_i * y_i
    double bias = 0.0;
    double gamma = 1.0;              ///< RBF width, exp(-gamma ||a - b||^2)
    HogConfig config{};

    /// Length of the descriptors this model scores.
    std::size_t dimension() const noexcept {
        return support_vectors.empty() ? config.descriptor_length() : support_vectors.front().size();
    }
};

/// exp(-gamma ||a - b||^2).
double rbf_kernel(const HogDescriptor& a, const HogDescriptor& b, double gamma);

double svm_decision(const SvmModel& model, const HogDescriptor& d);

struct SvmGrid {
    std::vector<double> c_values;
    std::vector<double> gamma_values;

    /// C in {2^-3 .. 2^7} (powers of 2), gamma in {2^-15 .. 2^1} (powers of 4).
    static SvmGrid defaults();
};

struct SvmTrainOptions {
    SvmGrid grid = SvmGrid::defaults();
    int folds = 5;
    std::uint64_t seed = 42;
    double tolerance = 1e-3;       ///< KKT violation gap at which SMO stops
    long max_passes = 10000;       ///< SMO iteration cap = max_passes * n
};

struct CvEntry {
    double c;
    double gamma;
    double accuracy;
};

struct CvReport {
    std::vector<CvEntry> entries;  ///< grid order: C outer, gamma inner, ascending
    double best_c = 0.0;
    double best_gamma = 0.0;
    double best_accuracy = 0.0;
};

struct SvmTrainResult {
    SvmModel model;
    CvReport cv;
    double training_accuracy = 0.0;
};

/// Result of one SMO run on a precomputed kernel matrix.
struct SmoSolution {
    std::vector<double> alpha;
    double bias = 0.0;
    long iterations = 0;
};

/// Dual soft-margin SVM by sequential minimal optimization with
/// maximal-violating-pair working set selection. `kernel` is n x n row-major.
SmoSolution smo_solve(const std::vector<double>& kernel, const std::vector<int>& labels, double c,
                      double tolerance, long max_iterations);

/// Grid search over (C, gamma) by stratified k-fold cross-validation, then a
/// final fit on all samples with the best pair. Ties go to the smaller C,
/// then the smaller gamma. Deterministic for a fixed seed.
SvmTrainResult train_svm(const std::vector<HogDescriptor>& descriptors,
                         const std::vector<PatchLabel>& labels, const SvmTrainOptions& opts,
                         const HogConfig& config = {});

/// Equalizes each patch, extracts HOG features and trains.
SvmTrainResult train_svm(const std::vector<LabeledPatch>& patches, const SvmTrainOptions& opts,
                         const HogConfig& config = {});

/// Plain-text model format, header `DEFENCE-SVM v1`.
void save_svm_model(const std::filesystem::path& path, const SvmModel& model);
SvmModel load_svm_model(const std::filesystem::path& path);

}  // namespace defence
