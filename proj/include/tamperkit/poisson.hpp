#pragma once

#include "tamperkit/imaging.hpp"

#include <vector>

namespace tamperkit {

/// Forward-difference gradients of a patch, per pixel and channel.
/// gx(x,y,c) = patch(x+1,y,c) - patch(x,y,c) with the last column zero;
/// gy analogous with the last row zero. Both arrays span the full patch,
/// laid out like ImageBuf samples.
struct GuidanceField {
    int width = 0;
    int height = 0;
    std::vector<double> gx;
    std::vector<double> gy;
};

GuidanceField guidance_from_patch(const ImageBuf& patch);

struct PoissonOptions {
    /// Max-norm residual target, in 8-bit intensity units.
    double tol = 1e-3;
    /// Iteration cap per channel; 0 means 10x the number of unknowns.
    int max_iters = 0;
};

/// Real-valued solution over the paste-rectangle interior, before byte
/// rounding. `values` is interior_w x interior_h x 3, ImageBuf layout.
struct PoissonSolution {
    int interior_w = 0;
    int interior_h = 0;
    std::vector<double> values;
    double max_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Solves, per channel, 4 f(p) - sum_{q in N4(p)} f(q) = div g(p) on the
/// interior of the rectangle covered by `patch` placed at (dest_x, dest_y),
/// with the target's pixels on the rectangle's border ring as Dirichlet
/// values and g the patch's guidance field. Conjugate gradient on the
/// 5-point Laplacian, warm-started from the patch itself; the reported
/// residual is recomputed from the returned solution.
PoissonSolution solve_poisson_interior(const ImageBuf& target, const ImageBuf& patch,
                                       int dest_x, int dest_y,
                                       const PoissonOptions& opts = {});

/// Gradient-domain paste: interior replaced by the Poisson solution rounded
/// to bytes, ring and exterior untouched. Throws NonConvergence when the
/// residual stays above tolerance at the iteration cap.
ImageBuf poisson_blend(const ImageBuf& target, const ImageBuf& patch, int dest_x, int dest_y,
                       const PoissonOptions& opts = {});

} // namespace tamperkit
