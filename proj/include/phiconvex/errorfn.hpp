#pragma once

#include "phiconvex/grid.hpp"
#include "phiconvex/parallel.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <type_traits>
#include <span>
#include <vector>

namespace phiconvex {

/// A pair of error-grid nodes (x, y) = (t_i, t_j).
template <typename Scalar>
struct PairWitness {
    Index i;
    Index j;
    Scalar x;
    Scalar y;
};

/// Outcome of an exhaustive pairwise scan over the error grid.
template <typename Scalar>
struct GammaReport {
    bool holds = true;
    Scalar worst_margin = -std::numeric_limits<Scalar>::infinity();
    Scalar tolerance = 0;
    std::optional<PairWitness<Scalar>> witness;
    Index checked_count = 0;
};

/// Decreasing sequence Phi_1 = phi, Phi_{k+1} = gamma_transform(Phi_k).
template <typename Scalar>
struct EnvelopeTrace {
    std::vector<ErrorFunction<Scalar>> iterates;
    bool converged = false;
    std::vector<Scalar> sup_deltas;

    const ErrorFunction<Scalar>& final() const { return iterates.back(); }
};

enum class Trend { decreasing, increasing, constant, mixed };

inline const char* to_string(Trend t)
{
    switch (t) {
    case Trend::decreasing: return "decreasing";
    case Trend::increasing: return "increasing";
    case Trend::constant: return "constant";
    case Trend::mixed: return "mixed";
    }
    return "mixed";
}

/// Behaviour of t^-2 Phi(t) over the smallest decade of positive nodes.
template <typename Scalar>
struct SmallScaleTrend {
    Samples<Scalar> t;
    Samples<Scalar> ratios;
    Trend trend = Trend::mixed;
};

/// Phi_p(t) = t^p for t > 0 and Phi_p(0) = 0, on [0, length] with m steps.
template <typename Scalar>
ErrorFunction<Scalar> make_power_error(Scalar p, Scalar length, Index m)
{
    if (!(length > 0))
        throw PreconditionError("make_power_error: length must be positive");
    if (m < 2)
        throw PreconditionError("make_power_error: need m >= 2");
    Samples<Scalar> s(m + 1);
    s[0] = 0;
    const Scalar dt = length / Scalar(m);
    for (Index j = 1; j <= m; ++j) {
        s[j] = std::pow(Scalar(j) * dt, p);
        if (!std::isfinite(s[j]))
            throw DomainError("make_power_error: non-finite sample", j);
    }
    return ErrorFunction<Scalar>(length, std::move(s));
}

namespace detail {

/// Exhaustive scan over pairs (i, j) with i in [i_min, m-1], j >= 1 and
/// i + j <= m - 1.  `margin(i, j)` is evaluated on every pair; the first pair
/// in lexicographic order attaining the maximum is reported.
template <typename Scalar, typename Margin>
GammaReport<Scalar> pair_scan(const ErrorFunction<Scalar>& phi, Index i_min, Scalar tol, Margin&& margin)
{
    const Index m = phi.m();
    const Index rows = std::max<Index>(0, m - 1 - i_min);
    std::vector<Scalar> best(static_cast<std::size_t>(rows), -std::numeric_limits<Scalar>::infinity());
    std::vector<Index> best_j(static_cast<std::size_t>(rows), -1);
    parallel_for(rows, [&](Index r) {
        const Index i = i_min + r;
        for (Index j = 1; i + j <= m - 1; ++j) {
            const Scalar v = margin(i, j);
            if (v > best[static_cast<std::size_t>(r)]) {
                best[static_cast<std::size_t>(r)] = v;
                best_j[static_cast<std::size_t>(r)] = j;
            }
        }
    });

    GammaReport<Scalar> report;
    report.tolerance = tol;
    for (Index r = 0; r < rows; ++r) {
        const Index i = i_min + r;
        report.checked_count += m - 1 - i;
        const auto idx = static_cast<std::size_t>(r);
        if (best_j[idx] >= 0 && best[idx] > report.worst_margin) {
            report.worst_margin = best[idx];
            report.witness = PairWitness<Scalar>{i, best_j[idx], phi.node(i), phi.node(best_j[idx])};
        }
    }
    report.holds = !(report.worst_margin > tol);
    return report;
}

template <typename Scalar>
Scalar gamma_coefficient(Index i, Index j)
{
    return Scalar(2 * i + j) / Scalar(j);
}

} // namespace detail

/// Exhaustive test of Phi(x + y) <= Phi(x) + ((2x + y) / y) Phi(y) over all
/// node pairs x = t_i >= 0, y = t_j > 0 with x + y < length.
template <typename Scalar>
GammaReport<Scalar> check_gamma(const ErrorFunction<Scalar>& phi, std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    const auto& s = phi.samples();
    return detail::pair_scan(phi, 0, tol.value_or(default_tolerance(phi)), [&](Index i, Index j) {
        return s[i + j] - s[i] - detail::gamma_coefficient<Scalar>(i, j) * s[j];
    });
}

/// One-step improvement over two-part splits:
/// Phi^gamma(u) = min over u = x + y, x >= 0, y > 0 of Phi(x) + ((2x + y) / y) Phi(y),
/// restricted to splits on the sample grid.
template <typename Scalar>
ErrorFunction<Scalar> gamma_transform(const ErrorFunction<Scalar>& phi)
{
    if (!phi.zero_at_origin())
        throw PreconditionError("gamma_transform: requires Phi(0) = 0");
    const auto& s = phi.samples();
    const Index m = phi.m();
    Samples<Scalar> out(m + 1);
    out[0] = 0;
    parallel_for(m, [&](Index r) {
        const Index k = r + 1;
        Scalar best = s[k]; // x = 0 split
        for (Index i = 1; i < k; ++i) {
            const Index j = k - i;
            best = std::min(best, s[i] + detail::gamma_coefficient<Scalar>(i, j) * s[j]);
        }
        out[k] = best;
    });
    return ErrorFunction<Scalar>(phi.length(), std::move(out));
}

/// Iterates the gamma transform until the sup-norm step is at most `tol` or
/// `max_iter` transforms have been applied.  Non-convergence is reported via
/// the `converged` flag.
template <typename Scalar>
EnvelopeTrace<Scalar> gamma_envelope(const ErrorFunction<Scalar>& phi, Scalar tol, int max_iter = 64)
{
    if (!phi.zero_at_origin())
        throw PreconditionError("gamma_envelope: requires Phi(0) = 0");
    if (!(tol > 0))
        throw PreconditionError("gamma_envelope: tol must be positive");
    if (max_iter < 1)
        throw PreconditionError("gamma_envelope: max_iter must be at least 1");

    EnvelopeTrace<Scalar> trace;
    trace.iterates.push_back(phi);
    for (int it = 0; it < max_iter; ++it) {
        ErrorFunction<Scalar> next = gamma_transform(trace.iterates.back());
        const Scalar delta = (next.samples() - trace.iterates.back().samples()).abs().maxCoeff();
        trace.iterates.push_back(std::move(next));
        trace.sup_deltas.push_back(delta);
        if (delta <= tol) {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

/// Phi*(t) = 2 Phi(t) / t for t > 0, Phi*(0) = 0.
template <typename Scalar>
ErrorFunction<Scalar> star_transform(const ErrorFunction<Scalar>& phi)
{
    Samples<Scalar> out(phi.m() + 1);
    out[0] = 0;
    for (Index j = 1; j <= phi.m(); ++j)
        out[j] = Scalar(2) * phi[j] / phi.node(j);
    return ErrorFunction<Scalar>(phi.length(), std::move(out));
}

/// Subadditivity of sqrt(Phi) on positive node pairs.
template <typename Scalar>
GammaReport<Scalar> check_sqrt_subadditive(const ErrorFunction<Scalar>& phi,
                                           std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    const Samples<Scalar> r = phi.samples().sqrt();
    return detail::pair_scan(phi, 1, tol.value_or(default_tolerance(phi)),
                             [&](Index i, Index j) { return r[i + j] - r[i] - r[j]; });
}

/// Subadditivity of t -> Phi(t) / t on positive node pairs.
template <typename Scalar>
GammaReport<Scalar> check_ratio_subadditive(const ErrorFunction<Scalar>& phi,
                                            std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    Samples<Scalar> r(phi.m() + 1);
    r[0] = 0;
    for (Index j = 1; j <= phi.m(); ++j)
        r[j] = phi[j] / phi.node(j);
    return detail::pair_scan(phi, 1, tol.value_or(default_tolerance(phi)),
                             [&](Index i, Index j) { return r[i + j] - r[i] - r[j]; });
}

/// Sufficient condition for the Gamma property: t^-2 Phi(t) nonincreasing on
/// consecutive positive nodes below the length.  The witness is the
/// consecutive pair with the largest increase.
template <typename Scalar>
GammaReport<Scalar> check_t2_decreasing(const ErrorFunction<Scalar>& phi,
                                        std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    GammaReport<Scalar> report;
    report.tolerance = tol.value_or(default_tolerance(phi));
    auto ratio = [&](Index j) {
        const Scalar t = phi.node(j);
        return phi[j] / (t * t);
    };
    for (Index j = 1; j + 1 <= phi.m() - 1; ++j) {
        const Scalar v = ratio(j + 1) - ratio(j);
        ++report.checked_count;
        if (v > report.worst_margin) {
            report.worst_margin = v;
            report.witness = PairWitness<Scalar>{j, j + 1, phi.node(j), phi.node(j + 1)};
        }
    }
    report.holds = !(report.worst_margin > report.tolerance);
    return report;
}

/// Left side minus right side of the n-term chain inequality
/// Phi(u_1 + ... + u_n) <= Phi(u_1) + sum_{k>=2} ((2 (u_1 + ... + u_{k-1}) + u_k) / u_k) Phi(u_k).
/// Every u_k must be a sample node; there is no interpolation here.
template <typename Scalar>
Scalar check_chain_inequality(const ErrorFunction<Scalar>& phi, std::span<const Scalar> u)
{
    if (u.empty())
        throw PreconditionError("check_chain_inequality: need at least one term");
    std::vector<Index> idx;
    idx.reserve(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        const Scalar pos = u[k] / phi.step();
        const Scalar nearest = std::round(pos);
        if (std::abs(pos - nearest) > Scalar(1e-9) * std::max(Scalar(1), pos))
            throw GridMismatchError("check_chain_inequality: term " + std::to_string(k) +
                                    " is not on the sample grid");
        idx.push_back(static_cast<Index>(nearest));
        if (idx.back() < 0 || (k > 0 && idx.back() == 0))
            throw PreconditionError("check_chain_inequality: need u_1 >= 0 and u_k > 0 for k >= 2");
    }
    Index total = 0;
    for (Index i : idx)
        total += i;
    if (total > phi.m() - 1)
        throw PreconditionError("check_chain_inequality: sum must stay below the length");

    Scalar rhs = phi[idx[0]];
    Index partial = idx[0];
    for (std::size_t k = 1; k < idx.size(); ++k) {
        rhs += detail::gamma_coefficient<Scalar>(partial, idx[k]) * phi[idx[k]];
        partial += idx[k];
    }
    return phi[total] - rhs;
}

/// t^-2 Phi(t) on the nodes t_1..t_10 (or fewer on coarse grids).  Limits at
/// zero cannot be decided from samples, so only the observed trend is reported.
template <typename Scalar>
SmallScaleTrend<Scalar> small_scale_trend(const ErrorFunction<Scalar>& phi)
{
    const Index count = std::min<Index>(10, phi.m() - 1);
    SmallScaleTrend<Scalar> out;
    out.t.resize(count);
    out.ratios.resize(count);
    for (Index j = 0; j < count; ++j) {
        const Scalar t = phi.node(j + 1);
        out.t[j] = t;
        out.ratios[j] = phi[j + 1] / (t * t);
    }
    bool up = false;
    bool down = false;
    for (Index j = 0; j + 1 < count; ++j) {
        up = up || out.ratios[j + 1] > out.ratios[j];
        down = down || out.ratios[j + 1] < out.ratios[j];
    }
    out.trend = up ? (down ? Trend::mixed : Trend::increasing) : (down ? Trend::decreasing : Trend::constant);
    return out;
}

} // namespace phiconvex
