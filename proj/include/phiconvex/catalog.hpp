#pragma once

#include "phiconvex/grid.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>

namespace phiconvex {

/// A named closed-form rule that can be sampled on any grid.
template <typename Scalar>
struct FunctionCatalogEntry {
    std::string name;
    std::function<Scalar(Scalar)> generator;
};

template <typename Scalar>
GridFunction<Scalar> sample_catalog(const FunctionCatalogEntry<Scalar>& entry,
                                    const GridSpec<Scalar>& grid)
{
    Samples<Scalar> values(grid.size());
    for (Index k = 0; k < grid.size(); ++k) {
        values[k] = entry.generator(grid.node(k));
        if (!std::isfinite(values[k]))
            throw DomainError(entry.name + " is undefined at node " + std::to_string(k), k);
    }
    return GridFunction<Scalar>(grid, std::move(values));
}

namespace catalog {

template <typename Scalar>
FunctionCatalogEntry<Scalar> power(Scalar p)
{
    return {"power:" + std::to_string(double(p)),
            [p](Scalar x) { return std::pow(std::abs(x), p); }};
}

/// -|x|^p, the reflected error profile.
template <typename Scalar>
FunctionCatalogEntry<Scalar> neg_power(Scalar p)
{
    return {"neg-power:" + std::to_string(double(p)),
            [p](Scalar x) { return -std::pow(std::abs(x), p); }};
}

template <typename Scalar>
FunctionCatalogEntry<Scalar> absolute()
{
    return {"abs", [](Scalar x) { return std::abs(x); }};
}

template <typename Scalar>
FunctionCatalogEntry<Scalar> quadratic()
{
    return {"quadratic", [](Scalar x) { return x * x; }};
}

template <typename Scalar>
FunctionCatalogEntry<Scalar> concave()
{
    return {"concave", [](Scalar x) { return -x * x; }};
}

template <typename Scalar>
FunctionCatalogEntry<Scalar> affine(Scalar slope, Scalar offset)
{
    return {"affine", [slope, offset](Scalar x) { return slope * x + offset; }};
}

template <typename Scalar>
FunctionCatalogEntry<Scalar> constant(Scalar c)
{
    return {"constant", [c](Scalar) { return c; }};
}

template <typename Scalar>
FunctionCatalogEntry<Scalar> exponential()
{
    return {"exp", [](Scalar x) { return std::exp(x); }};
}

template <typename Scalar>
FunctionCatalogEntry<Scalar> sine(Scalar frequency, Scalar amplitude = Scalar(1))
{
    return {"sine", [frequency, amplitude](Scalar x) { return amplitude * std::sin(frequency * x); }};
}

/// Triangle wave with slopes +-1 and the given period; 1-Lipschitz.
template <typename Scalar>
FunctionCatalogEntry<Scalar> sawtooth(Scalar period)
{
    return {"sawtooth", [period](Scalar x) {
                const Scalar s = x / period - std::floor(x / period);
                return period * std::min(s, Scalar(1) - s);
            }};
}

/// Non-convex piecewise-linear function with kinks at -0.3, 0.2 and 0.6.
template <typename Scalar>
FunctionCatalogEntry<Scalar> kinks()
{
    return {"kinks", [](Scalar x) {
                return std::abs(x + Scalar(0.3)) - Scalar(0.5) * std::abs(x - Scalar(0.2)) +
                       Scalar(0.25) * std::abs(x - Scalar(0.6));
            }};
}

/// x^2 plus a deterministic perturbation bounded by `amplitude`.
///
/// The perturbation is a function of the binary representation of x and the
/// seed, so the same node always receives the same offset.
template <typename Scalar>
FunctionCatalogEntry<Scalar> noisy_quadratic(Scalar amplitude, std::uint64_t seed)
{
    return {"noisy", [amplitude, seed](Scalar x) {
                const auto key = static_cast<std::uint64_t>(std::llround(double(x) * 1e12));
                std::mt19937_64 engine(seed ^ (key * 0x9E3779B97F4A7C15ull));
                const Scalar unit = Scalar(engine() >> 11) * Scalar(0x1.0p-53);
                return x * x + amplitude * (Scalar(2) * unit - Scalar(1));
            }};
}

} // namespace catalog
} // namespace phiconvex
