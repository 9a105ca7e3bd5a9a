#pragma once

#include "phiconvex/convexity.hpp"
#include "phiconvex/grid.hpp"
#include "phiconvex/parallel.hpp"

#include <optional>
#include <type_traits>
#include <vector>

namespace phiconvex {

template <typename Scalar>
struct EnvelopeResult {
    GridFunction<Scalar> input;
    std::vector<Scalar> iterates_sup_delta;
    GridFunction<Scalar> result;
    int iterations = 0;
    bool converged = false;
    bool is_phi_convex = false;
};

enum class SandwichStatus { exists, violated, hypothesis_not_met };

inline const char* to_string(SandwichStatus s)
{
    switch (s) {
    case SandwichStatus::exists: return "exists";
    case SandwichStatus::violated: return "violated";
    case SandwichStatus::hypothesis_not_met: return "hypothesis-not-met";
    }
    return "hypothesis-not-met";
}

template <typename Scalar>
struct SandwichReport {
    SandwichStatus status = SandwichStatus::violated;
    bool inequality_holds = false;
    Scalar worst_margin = 0;
    Scalar tolerance = 0;
    std::optional<NodeWitness<Scalar>> witness; // (x, u, y); t = (y - u) / (y - x)
    std::optional<bool> hypothesis_met;         // evaluated only when the inequality holds
    std::optional<GridFunction<Scalar>> h;
    int envelope_iterations = 0;
};

/// One application of the lower envelope operator restricted to node pairs:
///   C(f)(u) = min over x <= u <= y of t (f(x) + Phi(u - x)) + (1 - t) (f(y) + Phi(y - u)),
/// t = (y - u) / (y - x).  The pair x = y = u contributes f(u).
template <typename Scalar>
GridFunction<Scalar> envelope_step(const GridFunction<Scalar>& f, const ErrorFunction<Scalar>& phi)
{
    if (!phi.zero_at_origin())
        throw PreconditionError("envelope_step: requires Phi(0) = 0");
    detail::require_cubic_size(f.size(), "envelope_step");
    const auto d = detail::differences(f.grid(), phi);
    const auto& v = f.values();
    const Index n = f.size();
    Samples<Scalar> out(n);
    parallel_for(n, [&](Index k) {
        Scalar best = v[k];
        for (Index i = 0; i <= k; ++i)
            for (Index j = k; j < n; ++j)
                if (i != j)
                    best = std::min(best, detail::chord_bound(v, d, i, k, j));
        out[k] = best;
    });
    return GridFunction<Scalar>(f.grid(), std::move(out));
}

template <typename Scalar>
Scalar default_envelope_tolerance(const GridFunction<Scalar>& f)
{
    return Scalar(1e-10) * (Scalar(1) + f.sup_norm());
}

/// f_1 = f, f_{k+1} = envelope_step(f_k) until the sup-norm change is at most
/// `tol` (default 1e-10 (1 + |f|_inf)) or `max_iter` steps (default 10 n).
/// On a finite grid the iterates are bounded below by min f, so the sequence
/// always has a limit; `converged` reports whether it was reached.
template <typename Scalar>
EnvelopeResult<Scalar> envelope_fixed_point(const GridFunction<Scalar>& f, const ErrorFunction<Scalar>& phi,
                                            std::optional<std::type_identity_t<Scalar>> tol = std::nullopt,
                                            std::optional<int> max_iter = std::nullopt)
{
    const Scalar eps = tol.value_or(default_envelope_tolerance(f));
    const int limit = max_iter.value_or(static_cast<int>(10 * f.size()));
    if (!(eps > 0) || limit < 1)
        throw PreconditionError("envelope_fixed_point: need tol > 0 and max_iter >= 1");

    EnvelopeResult<Scalar> out{f, {}, f, 0, false, false};
    while (out.iterations < limit) {
        GridFunction<Scalar> next = envelope_step(out.result, phi);
        const Scalar delta = (next.values() - out.result.values()).abs().maxCoeff();
        out.iterates_sup_delta.push_back(delta);
        out.result = std::move(next);
        ++out.iterations;
        if (delta <= eps) {
            out.converged = true;
            break;
        }
    }
    out.is_phi_convex = check_phi_convex_definitional(out.result, phi, Scalar(2) * eps).holds;
    return out;
}

/// Grid on the difference interval (-half, half) with `n` interior nodes.
template <typename Scalar>
GridSpec<Scalar> difference_grid(Scalar half_length, Index n)
{
    return GridSpec<Scalar>(-half_length, half_length, n);
}

/// Psi(u) = -Phi(|u|) sampled on (-half, half); half defaults to the length
/// of Phi.
template <typename Scalar>
GridFunction<Scalar> psi_from_phi(const ErrorFunction<Scalar>& phi, Index n,
                                  std::optional<std::type_identity_t<Scalar>> half_length = std::nullopt)
{
    const Scalar half = half_length.value_or(phi.length());
    if (half > phi.length())
        throw PreconditionError("psi_from_phi: half length exceeds the error function's domain");
    const auto grid = difference_grid(half, n);
    Samples<Scalar> values(n);
    for (Index k = 0; k < n; ++k)
        values[k] = -phi(std::min(std::abs(grid.node(k)), phi.length()));
    return GridFunction<Scalar>(grid, std::move(values));
}

/// Phi-convexity of Psi(u) = -Phi(|u|) on the difference grid.
///
/// Phi is only known below its length, so triples whose outer points are
/// further apart than that are skipped; these are exactly the spreads that
/// occur when the hypothesis is used for points x - u, y - u with x, y, u in
/// an interval of that length.
template <typename Scalar>
ConvexityReport<Scalar> check_psi_convex(const ErrorFunction<Scalar>& phi, Index n,
                                         std::optional<std::type_identity_t<Scalar>> half_length = std::nullopt,
                                         std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    const auto psi = psi_from_phi(phi, n, half_length);
    const auto d = detail::differences(psi.grid(), phi, false);
    const Index max_spread = (phi.m() - 1) / d.stride;
    const Scalar eps = tol.value_or(default_tolerance(psi, phi));
    if (max_spread >= n - 1)
        return detail::three_point_separable(psi.grid(), psi.values(), d, eps);
    detail::require_cubic_size(n, "check_psi_convex");
    const Scalar h = psi.grid().step();
    return detail::node_triple_scan(psi.grid(), eps, true, max_spread, [&](Index i, Index k, Index j) {
        return detail::three_point_margin(psi.values(), d, h, i, k, j);
    });
}

/// Decides whether some Phi-convex h fits between g and f.
///
/// Phase 1 scans g(u) <= t (f(x) + Phi(u - x)) + (1 - t) (f(y) + Phi(y - u))
/// over node triples x <= u <= y.  If that holds, phase 2 takes h as the
/// limit of the envelope iteration of f and verifies g <= h <= f and the
/// Phi-convexity of h.  The hypothesis on Psi is reported alongside.
template <typename Scalar>
SandwichReport<Scalar> sandwich(const GridFunction<Scalar>& g, const GridFunction<Scalar>& f,
                                const ErrorFunction<Scalar>& phi, std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    require_same_grid(g, f);
    if (!phi.zero_at_origin())
        throw PreconditionError("sandwich: requires Phi(0) = 0");
    detail::require_cubic_size(f.size(), "sandwich");
    const auto d = detail::differences(f.grid(), phi);
    const auto& lower = g.values();
    const auto& upper = f.values();

    SandwichReport<Scalar> report;
    report.tolerance = tol.value_or(Scalar(1e-9) * (Scalar(1) + f.sup_norm() + g.sup_norm() + phi.sup_norm()));
    auto scan = detail::node_triple_scan(f.grid(), report.tolerance, false, f.size(),
                                         [&](Index i, Index k, Index j) {
                                             return lower[k] - detail::chord_bound(upper, d, i, k, j);
                                         });
    report.worst_margin = scan.worst_margin;
    report.witness = scan.witness;
    report.inequality_holds = scan.holds;
    if (!scan.holds) {
        report.status = SandwichStatus::violated;
        return report;
    }

    report.hypothesis_met = check_psi_convex(phi, 2 * f.size() + 1, f.grid().length()).holds;
    auto env = envelope_fixed_point(f, phi);
    report.envelope_iterations = env.iterations;
    const GridFunction<Scalar>& h = env.result;
    const bool ordered = (lower <= h.values() + report.tolerance).all() &&
                         (h.values() <= upper + report.tolerance).all();
    const bool convex = env.converged && check_phi_convex(h, phi).holds;
    if (ordered && convex) {
        report.status = SandwichStatus::exists;
        report.h = h;
    } else {
        report.status = SandwichStatus::hypothesis_not_met;
    }
    return report;
}

} // namespace phiconvex
