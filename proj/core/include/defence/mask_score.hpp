#pragma once

#include "defence/fence_mask.hpp"

namespace defence {

struct MaskScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// A predicted fence pixel is a hit when a true fence pixel lies within
/// Chebyshev distance `tolerance`; recall is counted the same way in the
/// other direction. Empty sets score 1 for the side they leave undefined.
MaskScore mask_score(const FenceMask& pred, const FenceMask& truth, int tolerance);

}  // namespace defence
