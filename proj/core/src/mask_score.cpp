#include "defence/mask_score.hpp"

#include "defence/error.hpp"

namespace defence {

MaskScore mask_score(const FenceMask& pred, const FenceMask& truth, int tolerance) {
    if (!pred.same_shape(truth)) throw InvalidArgument("mask score: mask dimensions differ");
    if (tolerance < 0) throw InvalidArgument("mask score: tolerance must be >= 0");
    const FenceMask truth_near = dilate(truth, tolerance);
    const FenceMask pred_near = dilate(pred, tolerance);
    const auto p = pred.bits();
    const auto t = truth.bits();
    const auto tn = truth_near.bits();
    const auto pn = pred_near.bits();
    std::size_t pred_n = 0, pred_hit = 0, truth_n = 0, truth_hit = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!p[i]) {
            ++pred_n;
            if (!tn[i]) ++pred_hit;
        }
        if (!t[i]) {
            ++truth_n;
            if (!pn[i]) ++truth_hit;
        }
    }
    MaskScore s;
    s.precision = pred_n ? static_cast<double>(pred_hit) / pred_n : 1.0;
    s.recall = truth_n ? static_cast<double>(truth_hit) / truth_n : 1.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

}  // namespace defence
