#pragma once

#include "phiconvex/errorfn.hpp"
#include "phiconvex/grid.hpp"
#include "phiconvex/parallel.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <type_traits>
#include <span>
#include <string>
#include <vector>

namespace phiconvex {

/// Grid nodes at which a check attains its worst margin: a pair (x, y) for
/// monotone and Hoelder scans, an ordered triple (x, u, y) for convexity.
template <typename Scalar>
struct NodeWitness {
    std::vector<Index> nodes;
    std::vector<Scalar> coordinates;
};

template <typename Scalar>
struct ConvexityReport {
    bool holds = true;
    Scalar worst_margin = -std::numeric_limits<Scalar>::infinity();
    Scalar tolerance = 0;
    std::optional<NodeWitness<Scalar>> witness;
    Index checked_count = 0;
};

enum class SlopeKind { slope, absolute_slope };

/// Per-node slope values certifying approximate convexity (kind = slope) or
/// approximate affinity (kind = absolute_slope) of some grid function.
template <typename Scalar>
class SlopeCertificate {
public:
    SlopeCertificate(GridSpec<Scalar> grid, Samples<Scalar> values, SlopeKind kind)
        : grid_(std::move(grid)), values_(std::move(values)), kind_(kind)
    {
        if (values_.size() != grid_.size() || !values_.isFinite().all())
            throw PreconditionError("SlopeCertificate: need one finite value per node");
    }

    const GridSpec<Scalar>& grid() const { return grid_; }
    const Samples<Scalar>& values() const { return values_; }
    SlopeKind kind() const { return kind_; }
    GridFunction<Scalar> as_function() const { return GridFunction<Scalar>(grid_, values_); }

private:
    GridSpec<Scalar> grid_;
    Samples<Scalar> values_;
    SlopeKind kind_;
};

/// Certificate construction was refused; carries the failing report.
template <typename Scalar>
class CertificateError : public PreconditionError {
public:
    CertificateError(const std::string& what, ConvexityReport<Scalar> report)
        : PreconditionError(what), report_(std::move(report))
    {
    }
    const ConvexityReport<Scalar>& report() const { return report_; }

private:
    ConvexityReport<Scalar> report_;
};

namespace detail {

/// Phi sampled at node differences: at(d) = Phi(d * h).
template <typename Scalar>
struct DifferenceView {
    const Samples<Scalar>* samples;
    Index stride;
    Scalar at(Index d) const { return (*samples)[d * stride]; }
};

template <typename Scalar>
DifferenceView<Scalar> differences(const GridSpec<Scalar>& grid, const ErrorFunction<Scalar>& phi,
                                   bool require_full_span = true)
{
    return {&phi.samples(), difference_stride(grid, phi, require_full_span)};
}

inline void require_cubic_size(Index n, const char* who)
{
    if (n > default_max_cubic_nodes && !large_scans_allowed())
        throw PreconditionError(std::string(who) + ": triple scans are limited to " +
                                std::to_string(default_max_cubic_nodes) +
                                " nodes unless large scans are enabled");
}

template <typename Scalar>
NodeWitness<Scalar> witness_at(const GridSpec<Scalar>& grid, std::initializer_list<Index> nodes)
{
    NodeWitness<Scalar> w;
    for (Index k : nodes) {
        w.nodes.push_back(k);
        w.coordinates.push_back(grid.node(k));
    }
    return w;
}

/// All pairs i < j.  Lexicographically first pair attaining the maximum.
template <typename Scalar, typename Margin>
ConvexityReport<Scalar> node_pair_scan(const GridSpec<Scalar>& grid, Scalar tol, Margin&& margin)
{
    const Index n = grid.size();
    ConvexityReport<Scalar> report;
    report.tolerance = tol;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const Scalar v = margin(i, j);
            if (v > report.worst_margin) {
                report.worst_margin = v;
                report.witness = witness_at(grid, {i, j});
            }
        }
    report.checked_count = n * (n - 1) / 2;
    report.holds = !(report.worst_margin > tol);
    return report;
}

struct TripleBest {
    Index i = -1;
    Index j = -1;
};

/// Cubic scan over triples i <= k <= j (strict when `strict`), optionally
/// restricted to spread j - i <= max_spread.  Parallel over the middle index;
/// the first triple in (i, k, j) order attaining the maximum is reported.
template <typename Scalar, typename Margin>
ConvexityReport<Scalar> node_triple_scan(const GridSpec<Scalar>& grid, Scalar tol, bool strict,
                                         Index max_spread, Margin&& margin)
{
    const Index n = grid.size();
    std::vector<Scalar> best(static_cast<std::size_t>(n), -std::numeric_limits<Scalar>::infinity());
    std::vector<TripleBest> arg(static_cast<std::size_t>(n));
    std::vector<Index> counts(static_cast<std::size_t>(n), 0);
    const Index gap = strict ? 1 : 0;
    parallel_for(n, [&](Index k) {
        const auto s = static_cast<std::size_t>(k);
        for (Index i = std::max<Index>(0, k - max_spread); i <= k - gap; ++i)
            for (Index j = k + gap; j < n && j - i <= max_spread; ++j) {
                const Scalar v = margin(i, k, j);
                ++counts[s];
                if (v > best[s]) {
                    best[s] = v;
                    arg[s] = {i, j};
                }
            }
    });

    ConvexityReport<Scalar> report;
    report.tolerance = tol;
    Index best_k = -1;
    for (Index k = 0; k < n; ++k) {
        const auto s = static_cast<std::size_t>(k);
        report.checked_count += counts[s];
        if (arg[s].i < 0)
            continue;
        const bool better = best[s] > report.worst_margin;
        const bool tie_earlier = best[s] == report.worst_margin && best_k >= 0 &&
                                 arg[s].i < arg[static_cast<std::size_t>(best_k)].i;
        if (better || tie_earlier) {
            report.worst_margin = best[s];
            best_k = k;
        }
    }
    if (best_k >= 0) {
        const auto& a = arg[static_cast<std::size_t>(best_k)];
        report.witness = witness_at(grid, {a.i, best_k, a.j});
    }
    report.holds = !(report.worst_margin > tol);
    return report;
}

/// Chord bound t (f(x) + Phi(u - x)) + (1 - t) (f(y) + Phi(y - u)) with
/// t = (y - u) / (y - x), all at grid nodes i <= k <= j.
template <typename Scalar>
Scalar chord_bound(const Samples<Scalar>& f, const DifferenceView<Scalar>& phi, Index i, Index k, Index j)
{
    if (i == j)
        return f[k] + phi.at(0);
    const Scalar t = Scalar(j - k) / Scalar(j - i);
    return t * (f[i] + phi.at(k - i)) + (Scalar(1) - t) * (f[j] + phi.at(j - k));
}

/// Three-point margin with all spreads available.  For fixed u the margin
/// L(x, u) - R(u, y) separates, so the exhaustive max over triples is the
/// max over u of (max_x L) - (min_y R).
template <typename Scalar>
ConvexityReport<Scalar> three_point_separable(const GridSpec<Scalar>& grid, const Samples<Scalar>& f,
                                              const DifferenceView<Scalar>& phi, Scalar tol)
{
    const Index n = grid.size();
    const Scalar h = grid.step();
    ConvexityReport<Scalar> report;
    report.tolerance = tol;
    report.checked_count = n * (n - 1) * (n - 2) / 6;
    Index best_i = -1, best_k = -1, best_j = -1;
    for (Index k = 1; k + 1 < n; ++k) {
        Scalar left = -std::numeric_limits<Scalar>::infinity();
        Index arg_i = -1;
        for (Index i = 0; i < k; ++i) {
            const Scalar v = (f[k] - f[i] - phi.at(k - i)) / (Scalar(k - i) * h);
            if (v > left) {
                left = v;
                arg_i = i;
            }
        }
        Scalar right = std::numeric_limits<Scalar>::infinity();
        Index arg_j = -1;
        for (Index j = k + 1; j < n; ++j) {
            const Scalar v = (f[j] - f[k] + phi.at(j - k)) / (Scalar(j - k) * h);
            if (v < right) {
                right = v;
                arg_j = j;
            }
        }
        const Scalar margin = left - right;
        if (margin > report.worst_margin || (margin == report.worst_margin && arg_i < best_i)) {
            report.worst_margin = margin;
            best_i = arg_i;
            best_k = k;
            best_j = arg_j;
        }
    }
    if (best_k >= 0)
        report.witness = witness_at(grid, {best_i, best_k, best_j});
    report.holds = !(report.worst_margin > tol);
    return report;
}

template <typename Scalar>
Scalar three_point_margin(const Samples<Scalar>& f, const DifferenceView<Scalar>& phi, Scalar h, Index i,
                          Index k, Index j)
{
    return (f[k] - f[i] - phi.at(k - i)) / (Scalar(k - i) * h) -
           (f[j] - f[k] + phi.at(j - k)) / (Scalar(j - k) * h);
}

} // namespace detail

/// f(x) <= f(y) + Phi(y - x) for all nodes x < y.
template <typename Scalar>
ConvexityReport<Scalar> check_phi_monotone(const GridFunction<Scalar>& f, const ErrorFunction<Scalar>& phi,
                                           std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    const auto d = detail::differences(f.grid(), phi);
    const auto& v = f.values();
    return detail::node_pair_scan(f.grid(), tol.value_or(default_tolerance(f, phi)),
                                  [&](Index i, Index j) { return v[i] - v[j] - d.at(j - i); });
}

/// |f(x) - f(y)| <= Phi(|x - y|) for all node pairs.
template <typename Scalar>
ConvexityReport<Scalar> check_phi_holder(const GridFunction<Scalar>& f, const ErrorFunction<Scalar>& phi,
                                         std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    const auto d = detail::differences(f.grid(), phi);
    const auto& v = f.values();
    return detail::node_pair_scan(f.grid(), tol.value_or(default_tolerance(f, phi)),
                                  [&](Index i, Index j) { return std::abs(v[i] - v[j]) - d.at(j - i); });
}

/// Three-point characterization of Phi-convexity:
///   (f(u) - f(x) - Phi(u - x)) / (u - x) <= (f(y) - f(u) + Phi(y - u)) / (y - u)
/// for every node triple x < u < y.  Runs in O(n^2).
template <typename Scalar>
ConvexityReport<Scalar> check_phi_convex(const GridFunction<Scalar>& f, const ErrorFunction<Scalar>& phi,
                                         std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    const auto d = detail::differences(f.grid(), phi);
    return detail::three_point_separable(f.grid(), f.values(), d, tol.value_or(default_tolerance(f, phi)));
}

/// The defining inequality itself, evaluated on every node triple
/// x <= u <= y with t = (y - u) / (y - x).  Cubic; serves as an independent
/// oracle for check_phi_convex.
template <typename Scalar>
ConvexityReport<Scalar> check_phi_convex_definitional(const GridFunction<Scalar>& f,
                                                      const ErrorFunction<Scalar>& phi,
                                                      std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    detail::require_cubic_size(f.size(), "check_phi_convex_definitional");
    const auto d = detail::differences(f.grid(), phi);
    const auto& v = f.values();
    return detail::node_triple_scan(f.grid(), tol.value_or(default_tolerance(f, phi)), false, f.size(),
                                    [&](Index i, Index k, Index j) {
                                        if (i == j)
                                            return v[k] - (v[k] + d.at(0));
                                        const Scalar t = Scalar(j - k) / Scalar(j - i);
                                        const Scalar rhs = t * v[i] + (Scalar(1) - t) * v[j] +
                                                           t * d.at(k - i) + (Scalar(1) - t) * d.at(j - k);
                                        return v[k] - rhs;
                                    });
}

/// Two-sided three-point inequality
///   |(f(u) - f(x)) / (u - x) - (f(y) - f(u)) / (y - u)| <= Phi(u - x) / (u - x) + Phi(y - u) / (y - u)
/// scanned over all node triples.
template <typename Scalar>
ConvexityReport<Scalar> check_phi_affine(const GridFunction<Scalar>& f, const ErrorFunction<Scalar>& phi,
                                         std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    detail::require_cubic_size(f.size(), "check_phi_affine");
    const auto d = detail::differences(f.grid(), phi);
    const auto& v = f.values();
    const Scalar h = f.grid().step();
    return detail::node_triple_scan(f.grid(), tol.value_or(default_tolerance(f, phi)), true, f.size(),
                                    [&](Index i, Index k, Index j) {
                                        const Scalar left_gap = Scalar(k - i) * h;
                                        const Scalar right_gap = Scalar(j - k) * h;
                                        const Scalar jump = (v[k] - v[i]) / left_gap - (v[j] - v[k]) / right_gap;
                                        return std::abs(jump) - (d.at(k - i) / left_gap + d.at(j - k) / right_gap);
                                    });
}

/// Checks f(u) + (x - u) phi(u) <= f(x) + Phi(|u - x|) at every node pair
/// (u, x), including x = u.  Witness nodes are (u, x).
template <typename Scalar>
ConvexityReport<Scalar> verify_slope_certificate(const GridFunction<Scalar>& f, const ErrorFunction<Scalar>& phi,
                                                 const SlopeCertificate<Scalar>& cert,
                                                 std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    if (!(cert.grid() == f.grid()))
        throw GridMismatchError("certificate and function live on different grids");
    const auto d = detail::differences(f.grid(), phi);
    const auto& v = f.values();
    const auto& s = cert.values();
    const Index n = f.size();
    ConvexityReport<Scalar> report;
    report.tolerance = tol.value_or(default_tolerance(f, phi) * (Scalar(1) + f.grid().length()));
    for (Index k = 0; k < n; ++k)
        for (Index i = 0; i < n; ++i) {
            const Scalar gap = f.grid().node(i) - f.grid().node(k);
            const Scalar margin = v[k] + gap * s[k] - v[i] - d.at(std::abs(k - i));
            if (margin > report.worst_margin) {
                report.worst_margin = margin;
                report.witness = detail::witness_at(f.grid(), {k, i});
            }
        }
    report.checked_count = n * n;
    report.holds = !(report.worst_margin > report.tolerance);
    return report;
}

/// Checks |f(u) - f(x) - (u - x) phi(u)| <= Phi(|u - x|) at every node pair.
template <typename Scalar>
ConvexityReport<Scalar> verify_absolute_slope_certificate(const GridFunction<Scalar>& f,
                                                          const ErrorFunction<Scalar>& phi,
                                                          const SlopeCertificate<Scalar>& cert,
                                                          std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    if (!(cert.grid() == f.grid()))
        throw GridMismatchError("certificate and function live on different grids");
    const auto d = detail::differences(f.grid(), phi);
    const auto& v = f.values();
    const auto& s = cert.values();
    const Index n = f.size();
    ConvexityReport<Scalar> report;
    report.tolerance = tol.value_or(default_tolerance(f, phi) * (Scalar(1) + f.grid().length()));
    for (Index k = 0; k < n; ++k)
        for (Index i = 0; i < n; ++i) {
            const Scalar gap = f.grid().node(k) - f.grid().node(i);
            const Scalar margin = std::abs(v[k] - v[i] - gap * s[k]) - d.at(std::abs(k - i));
            if (margin > report.worst_margin) {
                report.worst_margin = margin;
                report.witness = detail::witness_at(f.grid(), {k, i});
            }
        }
    report.checked_count = n * n;
    report.holds = !(report.worst_margin > report.tolerance);
    return report;
}

/// phi(u) = max over x < u of (f(u) - f(x) - Phi(u - x)) / (u - x).
///
/// At the leftmost node the supremum is empty and the value is taken from the
/// right-hand bound, min over y > u of (f(y) - f(u) + Phi(y - u)) / (y - u).
template <typename Scalar>
SlopeCertificate<Scalar> build_slope_certificate(const GridFunction<Scalar>& f, const ErrorFunction<Scalar>& phi,
                                                 std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    auto report = check_phi_convex(f, phi, tol);
    if (!report.holds)
        throw CertificateError<Scalar>("build_slope_certificate: function is not Phi-convex", std::move(report));

    const auto d = detail::differences(f.grid(), phi);
    const auto& v = f.values();
    const Scalar h = f.grid().step();
    const Index n = f.size();
    Samples<Scalar> slope(n);
    slope[0] = std::numeric_limits<Scalar>::infinity();
    for (Index j = 1; j < n; ++j)
        slope[0] = std::min(slope[0], (v[j] - v[0] + d.at(j)) / (Scalar(j) * h));
    for (Index k = 1; k < n; ++k) {
        slope[k] = -std::numeric_limits<Scalar>::infinity();
        for (Index i = 0; i < k; ++i)
            slope[k] = std::max(slope[k], (v[k] - v[i] - d.at(k - i)) / (Scalar(k - i) * h));
    }
    SlopeCertificate<Scalar> cert(f.grid(), std::move(slope), SlopeKind::slope);
    auto verified = verify_slope_certificate(f, phi, cert);
    if (!verified.holds)
        throw CertificateError<Scalar>("build_slope_certificate: constructed slopes fail verification",
                                       std::move(verified));
    return cert;
}

/// Node-wise inequality max(sup-left, sup-right) <= min(inf-left, inf-right)
/// between the one-sided lower and upper slope bounds.  Witness is the node.
template <typename Scalar>
ConvexityReport<Scalar> check_minmax(const GridFunction<Scalar>& f, const ErrorFunction<Scalar>& phi,
                                     std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    const auto d = detail::differences(f.grid(), phi);
    const auto& v = f.values();
    const Scalar h = f.grid().step();
    const Index n = f.size();
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    ConvexityReport<Scalar> report;
    report.tolerance = tol.value_or(default_tolerance(f, phi));
    for (Index k = 0; k < n; ++k) {
        Scalar lower = -inf;
        Scalar upper = inf;
        for (Index i = 0; i < k; ++i) {
            const Scalar gap = Scalar(k - i) * h;
            lower = std::max(lower, (v[k] - v[i] - d.at(k - i)) / gap);
            upper = std::min(upper, (v[k] - v[i] + d.at(k - i)) / gap);
        }
        for (Index j = k + 1; j < n; ++j) {
            const Scalar gap = Scalar(j - k) * h;
            lower = std::max(lower, (v[j] - v[k] - d.at(j - k)) / gap);
            upper = std::min(upper, (v[j] - v[k] + d.at(j - k)) / gap);
        }
        const Scalar margin = lower - upper;
        if (margin > report.worst_margin) {
            report.worst_margin = margin;
            report.witness = detail::witness_at(f.grid(), {k});
        }
    }
    report.checked_count = n;
    report.holds = !(report.worst_margin > report.tolerance);
    return report;
}

/// phi(u) = max(sup_{x<u} (f(u) - f(x) - Phi(u - x)) / (u - x),
///              sup_{y>u} (f(y) - f(u) - Phi(y - u)) / (y - u)).
/// Requires nondecreasing Phi samples and an approximately affine f.
template <typename Scalar>
SlopeCertificate<Scalar> build_absolute_slope_certificate(const GridFunction<Scalar>& f,
                                                          const ErrorFunction<Scalar>& phi,
                                                          std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    if (!phi.nondecreasing())
        throw PreconditionError("build_absolute_slope_certificate: Phi must be nondecreasing");
    auto report = check_phi_affine(f, phi, tol);
    if (!report.holds)
        throw CertificateError<Scalar>("build_absolute_slope_certificate: function is not Phi-affine",
                                       std::move(report));

    const auto d = detail::differences(f.grid(), phi);
    const auto& v = f.values();
    const Scalar h = f.grid().step();
    const Index n = f.size();
    Samples<Scalar> slope = Samples<Scalar>::Constant(n, -std::numeric_limits<Scalar>::infinity());
    for (Index k = 0; k < n; ++k) {
        for (Index i = 0; i < k; ++i)
            slope[k] = std::max(slope[k], (v[k] - v[i] - d.at(k - i)) / (Scalar(k - i) * h));
        for (Index j = k + 1; j < n; ++j)
            slope[k] = std::max(slope[k], (v[j] - v[k] - d.at(j - k)) / (Scalar(j - k) * h));
    }
    SlopeCertificate<Scalar> cert(f.grid(), std::move(slope), SlopeKind::absolute_slope);

    auto minmax = check_minmax(f, phi, tol);
    if (!minmax.holds)
        throw CertificateError<Scalar>("build_absolute_slope_certificate: slope bounds cross", std::move(minmax));
    auto verified = verify_absolute_slope_certificate(f, phi, cert);
    if (!verified.holds)
        throw CertificateError<Scalar>("build_absolute_slope_certificate: constructed slopes fail verification",
                                       std::move(verified));
    return cert;
}

/// Left side minus right side of the n-point inequality
///   f(sum t_i x_i) <= sum t_i (f(x_i) + Phi(|sum t_j x_j - x_i|)).
/// The barycenter must coincide with a grid node.
template <typename Scalar>
Scalar check_jensen(const GridFunction<Scalar>& f, const ErrorFunction<Scalar>& phi, std::span<const Index> nodes,
                    std::span<const Scalar> weights)
{
    if (nodes.empty() || nodes.size() != weights.size())
        throw PreconditionError("check_jensen: need matching, nonempty node and weight lists");
    const auto& grid = f.grid();
    Scalar total = 0;
    Scalar barycenter = 0;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        if (nodes[q] < 0 || nodes[q] >= grid.size())
            throw PreconditionError("check_jensen: node index out of range");
        if (weights[q] < 0)
            throw PreconditionError("check_jensen: weights must be nonnegative");
        total += weights[q];
        barycenter += weights[q] * grid.node(nodes[q]);
    }
    if (std::abs(total - Scalar(1)) > Scalar(1e-12))
        throw PreconditionError("check_jensen: weights must sum to 1");

    const Scalar pos = (barycenter - grid.a()) / grid.step() - Scalar(1);
    const Scalar nearest = std::round(pos);
    if (std::abs(pos - nearest) > Scalar(1e-9) * std::max(Scalar(1), std::abs(pos)))
        throw GridMismatchError("check_jensen: barycenter is not a grid node");
    const auto u = static_cast<Index>(nearest);

    const auto d = detail::differences(grid, phi);
    Scalar rhs = 0;
    for (std::size_t q = 0; q < nodes.size(); ++q)
        rhs += weights[q] * (f[nodes[q]] + d.at(std::abs(u - nodes[q])));
    return f[u] - rhs;
}

/// Slopes of a Phi-convex function are Phi*-monotone.
template <typename Scalar>
ConvexityReport<Scalar> check_slope_star_monotone(const SlopeCertificate<Scalar>& cert,
                                                  const ErrorFunction<Scalar>& phi,
                                                  std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    if (cert.kind() != SlopeKind::slope)
        throw PreconditionError("check_slope_star_monotone: needs a slope certificate");
    return check_phi_monotone(cert.as_function(), star_transform(phi), tol);
}

/// Absolute slopes of a Phi-affine function are Phi*-Hoelder.  Adding the two
/// certificate inequalities at x and y bounds (y - x)|phi(x) - phi(y)| by
/// 2 Phi(|y - x|), which is where the factor 2 in Phi* comes from.
template <typename Scalar>
ConvexityReport<Scalar> check_absolute_slope_star_holder(const SlopeCertificate<Scalar>& cert,
                                                         const ErrorFunction<Scalar>& phi,
                                                         std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    if (cert.kind() != SlopeKind::absolute_slope)
        throw PreconditionError("check_absolute_slope_star_holder: needs an absolute slope certificate");
    return check_phi_holder(cert.as_function(), star_transform(phi), tol);
}

/// Outer function g for the composition g o f.
template <typename Scalar>
struct OuterFunction {
    std::string name;
    std::function<Scalar(Scalar)> rule;
};

namespace outer {

template <typename Scalar>
OuterFunction<Scalar> positive_part(Scalar scale = Scalar(1))
{
    return {"positive-part", [scale](Scalar t) { return scale * std::max(t, Scalar(0)); }};
}

template <typename Scalar>
OuterFunction<Scalar> constant(Scalar c)
{
    return {"constant", [c](Scalar) { return c; }};
}

/// Nondecreasing and subadditive but concave, so not admissible.
template <typename Scalar>
OuterFunction<Scalar> sqrt_positive()
{
    return {"sqrt-positive", [](Scalar t) { return std::sqrt(std::max(t, Scalar(0))); }};
}

} // namespace outer

/// g failed validation; `s` and `t` are the lattice points of the violation.
template <typename Scalar>
class OuterFunctionError : public PreconditionError {
public:
    OuterFunctionError(const std::string& what, Scalar s, Scalar t) : PreconditionError(what), s_(s), t_(t) {}
    Scalar s() const { return s_; }
    Scalar t() const { return t_; }

private:
    Scalar s_;
    Scalar t_;
};

/// Samples g on a 65-point lattice spanning the values g will see and checks
/// that it is nonnegative, nondecreasing, subadditive and midpoint convex.
template <typename Scalar>
void validate_outer_function(const OuterFunction<Scalar>& g, Scalar lo, Scalar hi)
{
    constexpr Index points = 65;
    Samples<Scalar> lattice(points);
    for (Index q = 0; q < points; ++q)
        lattice[q] = lo + (hi - lo) * Scalar(q) / Scalar(points - 1);
    auto slack = [](Scalar a, Scalar b) { return Scalar(1e-12) * (Scalar(1) + std::abs(a) + std::abs(b)); };

    for (Index q = 0; q < points; ++q) {
        const Scalar s = lattice[q];
        if (!(g.rule(s) >= 0))
            throw OuterFunctionError<Scalar>(g.name + " is negative", s, s);
        if (q + 1 < points && g.rule(s) > g.rule(lattice[q + 1]) + slack(g.rule(s), 0))
            throw OuterFunctionError<Scalar>(g.name + " is not nondecreasing", s, lattice[q + 1]);
    }
    for (Index q = 0; q < points; ++q)
        for (Index r = q; r < points; ++r) {
            const Scalar s = lattice[q];
            const Scalar t = lattice[r];
            const Scalar gs = g.rule(s);
            const Scalar gt = g.rule(t);
            if (g.rule(s + t) > gs + gt + slack(gs, gt))
                throw OuterFunctionError<Scalar>(g.name + " is not subadditive", s, t);
            if (g.rule((s + t) / Scalar(2)) > (gs + gt) / Scalar(2) + slack(gs, gt))
                throw OuterFunctionError<Scalar>(g.name + " is not convex", s, t);
        }
}

/// For Phi-convex f and admissible g, checks that g o f is (g o Phi)-convex.
template <typename Scalar>
ConvexityReport<Scalar> compose_check(const GridFunction<Scalar>& f, const ErrorFunction<Scalar>& phi,
                                      const OuterFunction<Scalar>& g, std::optional<std::type_identity_t<Scalar>> tol = std::nullopt)
{
    const Scalar lo = std::min(Scalar(0), f.values().minCoeff());
    const Scalar hi = std::max(Scalar(0), f.values().maxCoeff()) + phi.sup_norm();
    validate_outer_function(g, lo, hi > lo ? hi : lo + Scalar(1));

    if (!check_phi_convex(f, phi).holds)
        throw PreconditionError("compose_check: f is not Phi-convex");
    Samples<Scalar> gf = f.values().unaryExpr(g.rule);
    Samples<Scalar> gphi = phi.samples().unaryExpr(g.rule);
    const GridFunction<Scalar> composed(f.grid(), std::move(gf));
    const ErrorFunction<Scalar> composed_error(phi.length(), std::move(gphi));
    return check_phi_convex(composed, composed_error, tol);
}

} // namespace phiconvex
