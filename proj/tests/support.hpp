#pragma once

#include "phiconvex/phiconvex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace testing {

using namespace phiconvex;
using Vec = Samples<double>;

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Error function on [0, b - a] with `mult` error steps per grid step.
inline ErrorFunctiond error_for(const GridSpecd& grid, double p, double scale = 1.0, Index mult = 2)
{
    return scale * make_power_error(p, grid.length(), mult * (grid.size() + 1));
}

inline ErrorFunctiond zero_for(const GridSpecd& grid, Index mult = 2)
{
    return zero_error(grid.length(), mult * (grid.size() + 1));
}

template <typename F>
GridFunctiond sample(const GridSpecd& grid, F&& rule)
{
    Vec v(grid.size());
    for (Index k = 0; k < grid.size(); ++k)
        v[k] = rule(grid.node(k));
    return GridFunctiond(grid, std::move(v));
}

/// Convex piecewise-linear function with kinks at -0.3 and 0.6.
inline GridFunctiond convex_kinks(const GridSpecd& grid)
{
    return sample(grid, [](double x) { return std::abs(x + 0.3) + 0.25 * std::abs(x - 0.6); });
}

inline GridFunctiond with_values(const GridSpecd& grid, Vec v) { return GridFunctiond(grid, std::move(v)); }

// Brute-force reference implementations.  They work with node coordinates
// and interpolated error values instead of index strides.
namespace oracle {

inline double gamma_margin(const ErrorFunctiond& phi, Index i, Index j)
{
    const double x = phi.node(i);
    const double y = phi.node(j);
    return phi(x + y) - phi(x) - (2 * x + y) / y * phi(y);
}

inline double gamma_worst(const ErrorFunctiond& phi)
{
    double worst = -inf;
    for (Index i = 0; i <= phi.m() - 2; ++i)
        for (Index j = 1; i + j <= phi.m() - 1; ++j)
            worst = std::max(worst, gamma_margin(phi, i, j));
    return worst;
}

inline Vec gamma_transform(const ErrorFunctiond& phi)
{
    Vec out(phi.m() + 1);
    out[0] = 0;
    for (Index k = 1; k <= phi.m(); ++k) {
        double best = inf;
        const double u = phi.node(k);
        for (Index i = 0; i < k; ++i) {
            const double x = phi.node(i);
            const double y = u - x;
            best = std::min(best, phi(x) + (2 * x + y) / y * phi(y));
        }
        out[k] = best;
    }
    return out;
}

/// t (f(x) + Phi(u - x)) + (1 - t) (f(y) + Phi(y - u)) at nodes i <= k <= j.
inline double chord(const Vec& f, const GridSpecd& grid, const ErrorFunctiond& phi, Index i, Index k, Index j)
{
    if (i == j)
        return f[k] + phi(0.0);
    const double x = grid.node(i);
    const double u = grid.node(k);
    const double y = grid.node(j);
    const double t = (y - u) / (y - x);
    return t * (f[i] + phi((1 - t) * (y - x))) + (1 - t) * (f[j] + phi(t * (y - x)));
}

/// Worst value of f(u) - chord over all node triples.
inline double definitional_worst(const GridFunctiond& f, const ErrorFunctiond& phi)
{
    const Index n = f.size();
    double worst = -inf;
    for (Index i = 0; i < n; ++i)
        for (Index k = i; k < n; ++k)
            for (Index j = k; j < n; ++j)
                worst = std::max(worst, f[k] - chord(f.values(), f.grid(), phi, i, k, j));
    return worst;
}

inline Vec envelope_step(const GridFunctiond& f, const ErrorFunctiond& phi)
{
    const Index n = f.size();
    Vec out(n);
    for (Index k = 0; k < n; ++k) {
        double best = inf;
        for (Index i = 0; i <= k; ++i)
            for (Index j = k; j < n; ++j)
                best = std::min(best, chord(f.values(), f.grid(), phi, i, k, j));
        out[k] = best;
    }
    return out;
}

/// Lower convex hull of the points (x_k, f_k), evaluated at the nodes.
inline Vec lower_hull(const GridFunctiond& f)
{
    const Index n = f.size();
    std::vector<Index> hull;
    auto x = [&](Index k) { return f.grid().node(k); };
    for (Index k = 0; k < n; ++k) {
        while (hull.size() >= 2) {
            const Index a = hull[hull.size() - 2];
            const Index b = hull.back();
            const double cross = (x(b) - x(a)) * (f[k] - f[a]) - (f[b] - f[a]) * (x(k) - x(a));
            if (cross <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(k);
    }
    Vec out(n);
    std::size_t seg = 0;
    for (Index k = 0; k < n; ++k) {
        while (seg + 1 < hull.size() && hull[seg + 1] < k)
            ++seg;
        if (hull[seg] == k || seg + 1 == hull.size()) {
            out[k] = f[k];
            continue;
        }
        const Index a = hull[seg];
        const Index b = hull[seg + 1];
        const double t = (x(k) - x(a)) / (x(b) - x(a));
        out[k] = (1 - t) * f[a] + t * f[b];
    }
    return out;
}

} // namespace oracle

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    Index index(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(engine_); }
    bool coin() { return index(0, 1) == 1; }

private:
    std::mt19937_64 engine_;
};

/// Sum of kinks, a quadratic and an affine part; convex by construction.
inline GridFunctiond random_convex(const GridSpecd& grid, Rng& rng, double scale = 1.0)
{
    const double q = rng.uniform(0, scale);
    const double s = rng.uniform(-scale, scale);
    const double c = rng.uniform(-scale, scale);
    double kink_w[3], kink_c[3];
    for (int r = 0; r < 3; ++r) {
        kink_w[r] = rng.uniform(0, scale);
        kink_c[r] = rng.uniform(grid.a(), grid.b());
    }
    return sample(grid, [&](double x) {
        double v = q * x * x + s * x + c;
        for (int r = 0; r < 3; ++r)
            v += kink_w[r] * std::abs(x - kink_c[r]);
        return v;
    });
}

/// Random walk whose increments have slope at most `lip` in absolute value.
inline GridFunctiond random_lipschitz(const GridSpecd& grid, Rng& rng, double lip)
{
    Vec v(grid.size());
    v[0] = rng.uniform(-1, 1);
    for (Index k = 1; k < grid.size(); ++k)
        v[k] = v[k - 1] + rng.uniform(-lip, lip) * grid.step();
    return GridFunctiond(grid, std::move(v));
}

inline GridFunctiond random_rough(const GridSpecd& grid, Rng& rng, double amp = 1.0)
{
    Vec v(grid.size());
    for (Index k = 0; k < grid.size(); ++k)
        v[k] = rng.uniform(-amp, amp);
    return GridFunctiond(grid, std::move(v));
}

} // namespace testing
