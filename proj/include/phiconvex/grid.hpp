#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace phiconvex {

using Index = Eigen::Index;

template <typename Scalar>
using Samples = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when two sampled objects do not live on compatible grids.
class GridMismatchError : public Error {
public:
    using Error::Error;
};

/// Raised when an input violates a documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A generator produced a non-finite value at a sampling node.
class DomainError : public Error {
public:
    DomainError(const std::string& what, Index node) : Error(what), node_(node) {}
    Index node() const { return node_; }

private:
    Index node_;
};

/// Uniform discretization of the open interval (a, b) by n interior nodes.
///
/// Node k (0-based) sits at a + (k + 1) * h with h = (b - a) / (n + 1); the
/// endpoints themselves are never sampled.
template <typename Scalar>
class GridSpec {
public:
    GridSpec(Scalar a, Scalar b, Index n) : a_(a), b_(b), n_(n)
    {
        if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
            throw PreconditionError("GridSpec: need finite a < b");
        if (n < 2)
            throw PreconditionError("GridSpec: need at least 2 interior nodes");
    }

    Scalar a() const { return a_; }
    Scalar b() const { return b_; }
    Index size() const { return n_; }
    Scalar length() const { return b_ - a_; }
    Scalar step() const { return (b_ - a_) / Scalar(n_ + 1); }
    Scalar node(Index k) const { return a_ + Scalar(k + 1) * step(); }

    Samples<Scalar> nodes() const
    {
        Samples<Scalar> x(n_);
        for (Index k = 0; k < n_; ++k)
            x[k] = node(k);
        return x;
    }

    friend bool operator==(const GridSpec& l, const GridSpec& r)
    {
        return l.a_ == r.a_ && l.b_ == r.b_ && l.n_ == r.n_;
    }

private:
    Scalar a_;
    Scalar b_;
    Index n_;
};

/// A real function sampled at the nodes of a GridSpec.
template <typename Scalar>
class GridFunction {
public:
    GridFunction(GridSpec<Scalar> grid, Samples<Scalar> values)
        : grid_(std::move(grid)), values_(std::move(values))
    {
        if (values_.size() != grid_.size())
            throw PreconditionError("GridFunction: value count does not match grid size");
        if (!values_.isFinite().all())
            throw PreconditionError("GridFunction: non-finite value");
    }

    const GridSpec<Scalar>& grid() const { return grid_; }
    const Samples<Scalar>& values() const { return values_; }
    Index size() const { return values_.size(); }
    Scalar operator[](Index k) const { return values_[k]; }
    Scalar sup_norm() const { return values_.abs().maxCoeff(); }

    GridFunction operator-() const { return GridFunction(grid_, -values_); }

private:
    GridSpec<Scalar> grid_;
    Samples<Scalar> values_;
};

/// An error function on [0, length), sampled at t_j = j * length / m for
/// j = 0..m.  The last sample is a closed right cap used for interpolation
/// only; checks never evaluate it.
template <typename Scalar>
class ErrorFunction {
public:
    ErrorFunction(Scalar length, Samples<Scalar> samples)
        : length_(length), samples_(std::move(samples))
    {
        if (!(length > 0) || !std::isfinite(length))
            throw PreconditionError("ErrorFunction: length must be positive and finite");
        if (samples_.size() < 3)
            throw PreconditionError("ErrorFunction: need m >= 2");
        if (!samples_.isFinite().all())
            throw PreconditionError("ErrorFunction: non-finite sample");
        if ((samples_ < Scalar(0)).any())
            throw PreconditionError("ErrorFunction: error functions are nonnegative");
    }

    Scalar length() const { return length_; }
    Index m() const { return samples_.size() - 1; }
    Scalar step() const { return length_ / Scalar(m()); }
    Scalar node(Index j) const { return Scalar(j) * step(); }
    const Samples<Scalar>& samples() const { return samples_; }
    Scalar operator[](Index j) const { return samples_[j]; }
    Scalar sup_norm() const { return samples_.maxCoeff(); }

    /// Membership in the class of error functions vanishing at the origin.
    bool zero_at_origin() const { return samples_[0] == Scalar(0); }

    /// Piecewise-linear evaluation; exact at sample nodes.
    Scalar operator()(Scalar t) const
    {
        if (t < 0 || t > length_)
            throw PreconditionError("ErrorFunction: argument outside [0, length]");
        const Scalar pos = t / step();
        const Scalar nearest = std::round(pos);
        if (std::abs(pos - nearest) <= Scalar(1e-9) * std::max(Scalar(1), pos))
            return samples_[static_cast<Index>(nearest)];
        const Index lo = std::min<Index>(static_cast<Index>(std::floor(pos)), m() - 1);
        const Scalar w = pos - Scalar(lo);
        return (Scalar(1) - w) * samples_[lo] + w * samples_[lo + 1];
    }

    bool nondecreasing() const
    {
        for (Index j = 0; j + 1 < samples_.size(); ++j)
            if (samples_[j + 1] < samples_[j])
                return false;
        return true;
    }

private:
    Scalar length_;
    Samples<Scalar> samples_;
};

template <typename Scalar>
ErrorFunction<Scalar> zero_error(Scalar length, Index m)
{
    return ErrorFunction<Scalar>(length, Samples<Scalar>::Zero(m + 1));
}

template <typename Scalar>
ErrorFunction<Scalar> operator*(Scalar alpha, const ErrorFunction<Scalar>& phi)
{
    if (alpha < 0)
        throw PreconditionError("error functions may only be scaled by nonnegative factors");
    return ErrorFunction<Scalar>(phi.length(), alpha * phi.samples());
}

namespace detail {
template <typename Scalar>
void require_same_sampling(const ErrorFunction<Scalar>& l, const ErrorFunction<Scalar>& r)
{
    if (l.m() != r.m() || l.length() != r.length())
        throw GridMismatchError("error functions sampled on different grids");
}
} // namespace detail

template <typename Scalar>
ErrorFunction<Scalar> operator+(const ErrorFunction<Scalar>& l, const ErrorFunction<Scalar>& r)
{
    detail::require_same_sampling(l, r);
    return ErrorFunction<Scalar>(l.length(), l.samples() + r.samples());
}

template <typename Scalar>
ErrorFunction<Scalar> pointwise_max(const ErrorFunction<Scalar>& l, const ErrorFunction<Scalar>& r)
{
    detail::require_same_sampling(l, r);
    return ErrorFunction<Scalar>(l.length(), l.samples().max(r.samples()));
}

/// Number of error-grid steps per function-grid step.
///
/// Every node difference (k - i) * h must land on the error grid, so h has to
/// be an integer multiple of the error step.  With `require_full_span` the
/// largest difference (n - 1) * h must also lie strictly below the error
/// function's length.
template <typename Scalar>
Index difference_stride(const GridSpec<Scalar>& grid, const ErrorFunction<Scalar>& phi,
                        bool require_full_span = true)
{
    const Scalar ratio = grid.step() / phi.step();
    const Scalar nearest = std::round(ratio);
    if (nearest < 1 || std::abs(ratio - nearest) > Scalar(1e-9) * ratio)
        throw GridMismatchError("function grid step " + std::to_string(double(grid.step())) +
                                " is not an integer multiple of the error step " +
                                std::to_string(double(phi.step())) +
                                " (choose m as a multiple of n + 1)");
    const auto stride = static_cast<Index>(nearest);
    if (require_full_span && (grid.size() - 1) * stride > phi.m() - 1)
        throw GridMismatchError("error function does not cover the node differences of the grid");
    return stride;
}

template <typename Scalar>
Scalar default_tolerance(const ErrorFunction<Scalar>& phi)
{
    return Scalar(1e-9) * (Scalar(1) + phi.sup_norm());
}

template <typename Scalar>
Scalar default_tolerance(const GridFunction<Scalar>& f, const ErrorFunction<Scalar>& phi)
{
    return Scalar(1e-9) * (Scalar(1) + f.sup_norm() + phi.sup_norm());
}

template <typename Scalar>
void require_same_grid(const GridFunction<Scalar>& l, const GridFunction<Scalar>& r)
{
    if (!(l.grid() == r.grid()))
        throw GridMismatchError("grid functions live on different grids");
}

} // namespace phiconvex
