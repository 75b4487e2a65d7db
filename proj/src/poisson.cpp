#include "tamperkit/poisson.hpp"

#include "tamperkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tamperkit {

namespace {

void check_placement(const ImageBuf& target, const ImageBuf& patch, int dest_x, int dest_y) {
    if (patch.width < 3 || patch.height < 3) {
        throw DimensionError("poisson blend needs a patch of at least 3x3, got " +
                             std::to_string(patch.width) + "x" + std::to_string(patch.height));
    }
    if (dest_x < 0 || dest_y < 0 || dest_x + patch.width > target.width ||
        dest_y + patch.height > target.height) {
        throw BoundsError("poisson blend destination exceeds target bounds");
    }
}

// 5-point stencil apply over the interior grid: out = 4*x - neighbors(x).
// Neighbors outside the interior are Dirichlet and excluded here; their
// contribution sits in the right-hand side.
void apply_laplacian(const std::vector<double>& x, std::vector<double>& out, int iw, int ih) {
    for (int y = 0; y < ih; ++y) {
        for (int xx = 0; xx < iw; ++xx) {
            const size_t i = static_cast<size_t>(y) * iw + xx;
            double v = 4.0 * x[i];
            if (xx > 0) v -= x[i - 1];
            if (xx + 1 < iw) v -= x[i + 1];
            if (y > 0) v -= x[i - iw];
            if (y + 1 < ih) v -= x[i + iw];
            out[i] = v;
        }
    }
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

struct ChannelSolve {
    std::vector<double> x;
    double max_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Conjugate gradient on the SPD system A x = b with A the interior 5-point
// Laplacian. Convergence is declared on the max-norm of the true residual.
ChannelSolve solve_channel(const std::vector<double>& b, const std::vector<double>& warm,
                           int iw, int ih, double tol, int max_iters) {
    const size_t n = b.size();
    ChannelSolve out;
    out.x = warm;

    std::vector<double> r(n), p(n), ap(n);
    apply_laplacian(out.x, ap, iw, ih);
    for (size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    p = r;
    double rr = 0.0;
    for (size_t i = 0; i < n; ++i) rr += r[i] * r[i];

    int k = 0;
    while (k < max_iters) {
        if (max_abs(r) <= tol) break;
        apply_laplacian(p, ap, iw, ih);
        double pap = 0.0;
        for (size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (pap <= 0.0) break; // numerically exhausted
        const double alpha = rr / pap;
        for (size_t i = 0; i < n; ++i) {
            out.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double rr_next = 0.0;
        for (size_t i = 0; i < n; ++i) rr_next += r[i] * r[i];
        const double beta = rr_next / rr;
        rr = rr_next;
        for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        ++k;
    }

    // Recurrence residuals drift; report the true one.
    apply_laplacian(out.x, ap, iw, ih);
    double true_max = 0.0;
    for (size_t i = 0; i < n; ++i) true_max = std::max(true_max, std::fabs(b[i] - ap[i]));
    out.max_residual = true_max;
    out.iterations = k;
    out.converged = true_max <= tol;
    return out;
}

} // namespace

GuidanceField guidance_from_patch(const ImageBuf& patch) {
    GuidanceField g;
    g.width = patch.width;
    g.height = patch.height;
    const size_t n = patch.pixel_count() * 3;
    g.gx.assign(n, 0.0);
    g.gy.assign(n, 0.0);
    for (int y = 0; y < patch.height; ++y) {
        for (int x = 0; x < patch.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                const size_t i = (static_cast<size_t>(y) * patch.width + x) * 3 + c;
                if (x + 1 < patch.width) {
                    g.gx[i] = static_cast<double>(patch.at(x + 1, y, c)) - patch.at(x, y, c);
                }
                if (y + 1 < patch.height) {
                    g.gy[i] = static_cast<double>(patch.at(x, y + 1, c)) - patch.at(x, y, c);
                }
            }
        }
    }
    return g;
}

PoissonSolution solve_poisson_interior(const ImageBuf& target, const ImageBuf& patch,
                                       int dest_x, int dest_y, const PoissonOptions& opts) {
    check_placement(target, patch, dest_x, dest_y);

    const GuidanceField g = guidance_from_patch(patch);
    const int iw = patch.width - 2;
    const int ih = patch.height - 2;
    const size_t n = static_cast<size_t>(iw) * ih;
    const int max_iters = opts.max_iters > 0 ? opts.max_iters : static_cast<int>(10 * n);

    PoissonSolution sol;
    sol.interior_w = iw;
    sol.interior_h = ih;
    sol.values.assign(n * 3, 0.0);
    sol.converged = true;

    std::vector<double> b(n), warm(n);
    const auto fill_channel = [&](int c) {
        for (int y = 0; y < ih; ++y) {
            for (int x = 0; x < iw; ++x) {
                const int px = x + 1; // patch coordinates of this interior pixel
                const int py = y + 1;
                const size_t gi = (static_cast<size_t>(py) * patch.width + px) * 3 + c;
                const size_t gix = (static_cast<size_t>(py) * patch.width + px - 1) * 3 + c;
                const size_t giy = (static_cast<size_t>(py - 1) * patch.width + px) * 3 + c;
                // div g in the stencil's sign convention: the patch itself
                // solves the system when the boundary matches the patch.
                double rhs = g.gx[gix] - g.gx[gi] + g.gy[giy] - g.gy[gi];
                if (px == 1) rhs += target.at(dest_x, dest_y + py, c);
                if (px == patch.width - 2)
                    rhs += target.at(dest_x + patch.width - 1, dest_y + py, c);
                if (py == 1) rhs += target.at(dest_x + px, dest_y, c);
                if (py == patch.height - 2)
                    rhs += target.at(dest_x + px, dest_y + patch.height - 1, c);
                b[static_cast<size_t>(y) * iw + x] = rhs;
                warm[static_cast<size_t>(y) * iw + x] = patch.at(px, py, c);
            }
        }
    };

    for (int c = 0; c < 3; ++c) {
        fill_channel(c);
        ChannelSolve ch = solve_channel(b, warm, iw, ih, opts.tol, max_iters);
        for (size_t i = 0; i < n; ++i) sol.values[i * 3 + c] = ch.x[i];
        sol.max_residual = std::max(sol.max_residual, ch.max_residual);
        sol.iterations = std::max(sol.iterations, ch.iterations);
        sol.converged = sol.converged && ch.converged;
    }
    return sol;
}

ImageBuf poisson_blend(const ImageBuf& target, const ImageBuf& patch, int dest_x, int dest_y,
                       const PoissonOptions& opts) {
    PoissonSolution sol = solve_poisson_interior(target, patch, dest_x, dest_y, opts);
    if (!sol.converged) {
        throw NonConvergence("poisson solve residual " + std::to_string(sol.max_residual) +
                                 " above tolerance " + std::to_string(opts.tol) + " after " +
                                 std::to_string(sol.iterations) + " iterations",
                             sol.max_residual, sol.iterations);
    }

    // The rectangle's border ring keeps the target's pixels (they are the
    // boundary values the interior was solved against); only the interior
    // takes the solution.
    ImageBuf out = target;
    for (int y = 0; y < sol.interior_h; ++y) {
        for (int x = 0; x < sol.interior_w; ++x) {
            for (int c = 0; c < 3; ++c) {
                const double v = sol.values[(static_cast<size_t>(y) * sol.interior_w + x) * 3 + c];
                const double r = static_cast<double>(std::lround(v));
                out.at(dest_x + 1 + x, dest_y + 1 + y, c) =
                    static_cast<uint8_t>(std::clamp(r, 0.0, 255.0));
            }
        }
    }
    return out;
}

} // namespace tamperkit
