#pragma once

#include "phiconvex/grid.hpp"

#include <optional>
#include <span>

namespace phiconvex {

template <typename Scalar>
GridFunction<Scalar> linear_combination(std::span<const Scalar> coeffs,
                                        std::span<const GridFunction<Scalar>> fns)
{
    if (fns.empty())
        throw PreconditionError("linear_combination: empty family");
    if (coeffs.size() != fns.size())
        throw PreconditionError("linear_combination: coefficient count does not match family size");
    Samples<Scalar> acc = Samples<Scalar>::Zero(fns.front().size());
    for (std::size_t i = 0; i < fns.size(); ++i) {
        require_same_grid(fns.front(), fns[i]);
        acc += coeffs[i] * fns[i].values();
    }
    return GridFunction<Scalar>(fns.front().grid(), std::move(acc));
}

template <typename Scalar>
GridFunction<Scalar> family_sup(std::span<const GridFunction<Scalar>> fns)
{
    if (fns.empty())
        throw PreconditionError("family_sup: empty family");
    Samples<Scalar> acc = fns.front().values();
    for (const auto& f : fns.subspan(1)) {
        require_same_grid(fns.front(), f);
        acc = acc.max(f.values());
    }
    return GridFunction<Scalar>(fns.front().grid(), std::move(acc));
}

template <typename Scalar>
GridFunction<Scalar> family_inf(std::span<const GridFunction<Scalar>> fns)
{
    if (fns.empty())
        throw PreconditionError("family_inf: empty family");
    Samples<Scalar> acc = fns.front().values();
    for (const auto& f : fns.subspan(1)) {
        require_same_grid(fns.front(), f);
        acc = acc.min(f.values());
    }
    return GridFunction<Scalar>(fns.front().grid(), std::move(acc));
}

/// Finite-data stand-in for the upper limit of a sequence.
///
/// Computes inf over the tail sups g_s = sup_{k >= s} f_k for every start s
/// whose tail still contains at least `window` elements; since the g_s
/// decrease in s this equals the sup over the final `window` elements.
/// The default window is the last half of the sequence (rounded up).
template <typename Scalar>
GridFunction<Scalar> limsup_sequence(std::span<const GridFunction<Scalar>> fns,
                                     std::optional<std::size_t> window = std::nullopt)
{
    if (fns.empty())
        throw PreconditionError("limsup_sequence: empty sequence");
    const std::size_t w = window.value_or((fns.size() + 1) / 2);
    if (w == 0 || w > fns.size())
        throw PreconditionError("limsup_sequence: window must be in [1, sequence length]");

    // Tail sups from the back, then the infimum over admissible starts.
    const std::size_t last_start = fns.size() - w;
    Samples<Scalar> tail = fns.back().values();
    for (std::size_t s = fns.size() - 1; s-- > last_start;) {
        require_same_grid(fns.back(), fns[s]);
        tail = tail.max(fns[s].values());
    }
    Samples<Scalar> result = tail;
    for (std::size_t s = last_start; s-- > 0;) {
        require_same_grid(fns.back(), fns[s]);
        tail = tail.max(fns[s].values());
        result = result.min(tail);
    }
    return GridFunction<Scalar>(fns.back().grid(), std::move(result));
}

} // namespace phiconvex
