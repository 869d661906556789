#include "defence/svm.hpp"

#include "defence/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace defence {

namespace {

constexpr double kTau = 1e-12;

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

std::vector<int> to_signs(const std::vector<PatchLabel>& labels) {
    std::vector<int> y(labels.size());
    std::transform(labels.begin(), labels.end(), y.begin(),
                   [](PatchLabel l) { return static_cast<int>(l); });
    return y;
}

// Subset of a full squared-distance matrix mapped through the RBF.
std::vector<double> kernel_block(const std::vector<double>& dist2, std::size_t n,
                                 const std::vector<std::size_t>& rows,
                                 const std::vector<std::size_t>& cols, double gamma) {
    std::vector<double> k(rows.size() * cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            k[i * cols.size() + j] = std::exp(-gamma * dist2[rows[i] * n + cols[j]]);
        }
    }
    return k;
}

}  // namespace

double rbf_kernel(const HogDescriptor& a, const HogDescriptor& b, double gamma) {
    if (a.size() != b.size()) {
        throw InvalidArgument("descriptor lengths differ: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    }
    if (!(gamma > 0.0)) throw InvalidArgument("RBF gamma must be positive");
    return std::exp(-gamma * squared_distance(a.values, b.values));
}

double svm_decision(const SvmModel& model, const HogDescriptor& d) {
    if (d.size() != model.dimension()) {
        throw InvalidArgument("descriptor length " + std::to_string(d.size()) +
                              " does not match model dimension " + std::to_string(model.dimension()));
    }
    double acc = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        acc += model.dual_coefs[i] *
               std::exp(-model.gamma * squared_distance(model.support_vectors[i].values, d.values));
    }
    return acc;
}

SvmGrid SvmGrid::defaults() {
    SvmGrid g;
    for (int e = -3; e <= 7; ++e) g.c_values.push_back(std::ldexp(1.0, e));
    for (int e = -15; e <= 1; e += 2) g.gamma_values.push_back(std::ldexp(1.0, e));
    return g;
}

SmoSolution smo_solve(const std::vector<double>& kernel, const std::vector<int>& y, double c,
                      double tolerance, long max_iterations) {
    const std::size_t n = y.size();
    if (kernel.size() != n * n) throw InvalidArgument("kernel matrix size does not match labels");
    if (!(c > 0.0)) throw InvalidArgument("SVM penalty C must be positive");
    auto q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * kernel[i * n + j]; };

    SmoSolution sol;
    sol.alpha.assign(n, 0.0);
    std::vector<double> grad(n, -1.0);
    auto& alpha = sol.alpha;
    auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0); };
    auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c); };

    for (sol.iterations = 0; sol.iterations < max_iterations; ++sol.iterations) {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        std::size_t i = n;
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            if (in_up(t) && v > gmax) {
                gmax = v;
                i = t;
            }
            if (in_low(t) && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        if (i == n || j == n || gmax - gmin < tolerance) break;

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = kernel[i * n + i] + kernel[j * n + j] + 2.0 * q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = kernel[i * n + i] + kernel[j * n + j] - 2.0 * q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
    }

    // Offset from the free vectors, or the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= c) {
            if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++free_count;
            free_sum += yg;
        }
    }
    const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2.0;
    sol.bias = -rho;
    return sol;
}

SvmTrainResult train_svm(const std::vector<HogDescriptor>& descriptors,
                         const std::vector<PatchLabel>& labels, const SvmTrainOptions& opts,
                         const HogConfig& config) {
    const std::size_t n = descriptors.size();
    if (n != labels.size()) throw InvalidArgument("descriptor and label counts differ");
    if (opts.folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
    if (opts.grid.c_values.empty() || opts.grid.gamma_values.empty()) {
        throw InvalidArgument("SVM parameter grid is empty");
    }
    for (const auto& d : descriptors) {
        if (d.size() != descriptors.front().size()) throw InvalidArgument("descriptor lengths differ");
    }
    const std::vector<int> y = to_signs(labels);
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < n; ++i) (y[i] > 0 ? pos : neg).push_back(i);
    if (pos.size() < static_cast<std::size_t>(opts.folds) || neg.size() < static_cast<std::size_t>(opts.folds)) {
        throw InvalidArgument("need at least " + std::to_string(opts.folds) +
                              " samples of each class, got " + std::to_string(pos.size()) +
                              " fence and " + std::to_string(neg.size()) + " non-fence");
    }

    std::vector<double> dist2(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            dist2[i * n + j] = dist2[j * n + i] = squared_distance(descriptors[i].values, descriptors[j].values);
        }
    }

    // Stratified fold assignment.
    std::mt19937_64 rng(opts.seed);
    std::vector<int> fold(n);
    for (auto* group : {&pos, &neg}) {
        std::vector<std::size_t> idx = *group;
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t k = 0; k < idx.size(); ++k) fold[idx[k]] = static_cast<int>(k % opts.folds);
    }

    const long max_iter = opts.max_passes * static_cast<long>(std::max<std::size_t>(n, 1));
    SvmTrainResult result;
    CvReport& cv = result.cv;
    cv.best_accuracy = -1.0;
    for (double c : opts.grid.c_values) {
        for (double gamma : opts.grid.gamma_values) {
            std::size_t correct = 0;
            for (int f = 0; f < opts.folds; ++f) {
                std::vector<std::size_t> train, test;
                for (std::size_t i = 0; i < n; ++i) (fold[i] == f ? test : train).push_back(i);
                std::vector<int> ytrain(train.size());
                for (std::size_t i = 0; i < train.size(); ++i) ytrain[i] = y[train[i]];
                const auto ktrain = kernel_block(dist2, n, train, train, gamma);
                const SmoSolution sol = smo_solve(ktrain, ytrain, c, opts.tolerance, max_iter);
                const auto ktest = kernel_block(dist2, n, test, train, gamma);
                for (std::size_t t = 0; t < test.size(); ++t) {
                    double f_val = sol.bias;
                    for (std::size_t s = 0; s < train.size(); ++s) {
                        f_val += sol.alpha[s] * ytrain[s] * ktest[t * train.size() + s];
                    }
                    if ((f_val > 0.0 ? 1 : -1) == y[test[t]]) ++correct;
                }
            }
            const double acc = static_cast<double>(correct) / static_cast<double>(n);
            cv.entries.push_back({c, gamma, acc});
            if (acc > cv.best_accuracy) {
                cv.best_accuracy = acc;
                cv.best_c = c;
                cv.best_gamma = gamma;
            }
        }
    }

    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    const auto kall = kernel_block(dist2, n, all, all, cv.best_gamma);
    const SmoSolution sol = smo_solve(kall, y, cv.best_c, opts.tolerance, max_iter);

    SvmModel& model = result.model;
    model.gamma = cv.best_gamma;
    model.bias = sol.bias;
    model.config = config;
    for (std::size_t i = 0; i < n; ++i) {
        if (sol.alpha[i] > 0.0) {
            model.support_vectors.push_back(descriptors[i]);
            model.dual_coefs.push_back(sol.alpha[i] * y[i]);
        }
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double f_val = sol.bias;
        for (std::size_t s = 0; s < n; ++s) f_val += sol.alpha[s] * y[s] * kall[i * n + s];
        if ((f_val > 0.0 ? 1 : -1) == y[i]) ++correct;
    }
    result.training_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    return result;
}

SvmTrainResult train_svm(const std::vector<LabeledPatch>& patches, const SvmTrainOptions& opts,
                         const HogConfig& config) {
    config.validate();
    std::vector<HogDescriptor> descriptors;
    std::vector<PatchLabel> labels;
    descriptors.reserve(patches.size());
    for (const auto& p : patches) {
        descriptors.push_back(hog(equalize_histogram(p.image), config));
        labels.push_back(p.label);
    }
    return train_svm(descriptors, labels, opts, config);
}

}  // namespace defence
