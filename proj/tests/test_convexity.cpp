#include "support.hpp"

#include <doctest.h>

#include <array>

using namespace testing;
using doctest::Approx;

namespace {

const GridSpecd unit(0, 1, 31);
const GridSpecd sym(-1, 1, 31);

std::vector<FunctionCatalogEntry<double>> catalog_suite()
{
    return {catalog::quadratic<double>(),
            catalog::concave<double>(),
            catalog::absolute<double>(),
            catalog::power(0.5),
            catalog::power(3.0),
            catalog::neg_power(0.5),
            catalog::neg_power(1.0),
            catalog::neg_power(2.0),
            catalog::affine(2.0, 1.0),
            catalog::constant(0.3),
            catalog::exponential<double>(),
            catalog::sine(3.0, 0.5),
            catalog::sine(6.0, 2.0),
            catalog::sawtooth(0.25),
            catalog::kinks<double>(),
            catalog::noisy_quadratic(0.05, 3)};
}

} // namespace

TEST_CASE("monotone check")
{
    const auto phi1 = error_for(unit, 1.0);
    const auto inc = sample(unit, [](double x) { return x * x * x; });
    CHECK(check_phi_monotone(inc, phi1).holds);
    CHECK(check_phi_monotone(inc, zero_for(unit)).holds);

    const auto neg = sample(unit, [](double x) { return -x; });
    const auto r = check_phi_monotone(neg, phi1);
    CHECK(r.holds);
    CHECK(std::abs(r.worst_margin) <= 1e-15);

    const auto steep = sample(unit, [](double x) { return -2 * x; });
    const auto s = check_phi_monotone(steep, phi1);
    CHECK_FALSE(s.holds);
    CHECK(s.worst_margin == Approx(1 - 2 * unit.step()));
    REQUIRE(s.witness);
    CHECK(s.witness->nodes == std::vector<Index>{0, 30});
    CHECK(s.checked_count == 31 * 30 / 2);
}

TEST_CASE("Hoelder check")
{
    const auto phi1 = error_for(unit, 1.0);
    CHECK(check_phi_holder(sample(unit, [](double) { return 4.0; }), error_for(unit, 2.0, 1e-3)).holds);
    const auto id = sample(unit, [](double x) { return x; });
    const auto r = check_phi_holder(id, phi1);
    CHECK(r.holds);
    CHECK(std::abs(r.worst_margin) <= 1e-15);
    const auto twice = sample(unit, [](double x) { return 2 * x; });
    CHECK_FALSE(check_phi_holder(twice, phi1).holds);
}

TEST_CASE("convexity check")
{
    CHECK(check_phi_convex(sample_catalog(catalog::quadratic<double>(), sym), zero_for(sym)).holds);

    const auto conc = check_phi_convex(sample_catalog(catalog::concave<double>(), unit), zero_for(unit));
    CHECK_FALSE(conc.holds);
    REQUIRE(conc.witness);
    const auto& w = conc.witness->nodes;
    REQUIRE(w.size() == 3);
    CHECK(w[0] < w[1]);
    CHECK(w[1] < w[2]);
    CHECK(w[1] > 0);
    CHECK(w[1] < 30);

    const auto psi = sample(sym, [](double x) { return -std::abs(x); });
    CHECK(check_phi_convex(psi, error_for(sym, 1.0)).holds);
}

TEST_CASE("convexity witness is a valid violation")
{
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const auto f = random_rough(unit, rng);
        const auto phi = error_for(unit, rng.uniform(0, 2), rng.uniform(0, 1));
        const auto r = check_phi_convex(f, phi);
        REQUIRE(r.witness);
        const auto& w = r.witness->nodes;
        const double chord = oracle::chord(f.values(), unit, phi, w[0], w[1], w[2]);
        if (!r.holds)
            CHECK(f[w[1]] > chord);
        CHECK(r.witness->coordinates[1] == unit.node(w[1]));
    }
}

TEST_CASE("definitional check")
{
    const auto f = convex_kinks(unit);
    CHECK(check_phi_convex_definitional(f, zero_for(unit)).holds);
    const auto shifted = sample(unit, [](double x) { return std::abs(x + 0.3) + 0.25 * std::abs(x - 0.6) + 17.0; });
    CHECK(check_phi_convex_definitional(shifted, zero_for(unit)).holds);

    // Degenerate chords (x = y) never violate.
    const auto rough = sample(unit, [](double x) { return std::sin(40 * x); });
    const auto phi = error_for(unit, 1.0);
    for (Index k = 0; k < unit.size(); ++k)
        CHECK(rough[k] - oracle::chord(rough.values(), unit, phi, k, k, k) <= 0);
    CHECK(check_phi_convex_definitional(rough, phi).worst_margin ==
          Approx(oracle::definitional_worst(rough, phi)).epsilon(1e-12));
}

TEST_CASE("three-point and definitional checks agree on random inputs")
{
    Rng rng(31);
    int holds = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const double lip = rng.uniform(0, 2);
        const auto f = with_values(unit, random_convex(unit, rng).values() + random_lipschitz(unit, rng, lip).values());
        const auto phi = error_for(unit, 1.0, rng.uniform(0, 2));
        const bool a = check_phi_convex(f, phi).holds;
        const bool b = check_phi_convex_definitional(f, phi).holds;
        CHECK(a == b);
        holds += a;
    }
    CHECK(holds > 5);
    CHECK(holds < 45);
}

TEST_CASE("affinity check")
{
    const auto lin = sample(unit, [](double x) { return 2 * x + 1; });
    const auto r = check_phi_affine(lin, zero_for(unit));
    CHECK(r.holds);
    CHECK(std::abs(r.worst_margin) <= 1e-12);
    CHECK_FALSE(check_phi_affine(sample_catalog(catalog::quadratic<double>(), unit), zero_for(unit)).holds);
    const auto saw = sample_catalog(catalog::sawtooth(0.2), sym);
    CHECK(check_phi_affine(saw, error_for(sym, 1.0, 2.0)).holds);
    CHECK(check_phi_affine(saw, error_for(sym, 1.0)).holds);
}

TEST_CASE("slope certificate for x^2")
{
    const auto f = sample_catalog(catalog::quadratic<double>(), sym);
    const auto phi = zero_for(sym);
    const auto cert = build_slope_certificate(f, phi);
    CHECK(cert.kind() == SlopeKind::slope);
    for (Index k = 1; k < sym.size(); ++k) {
        CHECK(cert.values()[k] == Approx(sym.node(k) + sym.node(k - 1)));
        CHECK(std::abs(cert.values()[k] - 2 * sym.node(k)) <= sym.step() + 1e-12);
    }
    const auto v = verify_slope_certificate(f, phi, cert);
    CHECK(v.holds);
    CHECK(v.checked_count == 31 * 31);
    CHECK(v.worst_margin <= 1e-14);
}

TEST_CASE("slope certificates of simple functions")
{
    const auto lin = sample(unit, [](double x) { return 3 * x; });
    const auto c1 = build_slope_certificate(lin, zero_for(unit));
    for (Index k = 1; k < unit.size(); ++k)
        CHECK(c1.values()[k] == Approx(3.0));

    const auto flat = sample(unit, [](double) { return 1.0; });
    const auto c2 = build_slope_certificate(flat, error_for(unit, 2.0));
    for (Index k = 1; k < unit.size(); ++k)
        CHECK(c2.values()[k] == Approx(-unit.step()));
    // Leftmost node takes the right-hand bound min_y Phi(y - u) / (y - u) = h.
    CHECK(c2.values()[0] == Approx(unit.step()));
}

TEST_CASE("slope certificate refuses non-convex input")
{
    const auto f = sample_catalog(catalog::concave<double>(), unit);
    try {
        build_slope_certificate(f, zero_for(unit));
        FAIL("expected refusal");
    } catch (const CertificateError<double>& e) {
        CHECK_FALSE(e.report().holds);
        CHECK(e.report().witness);
    }
}

TEST_CASE("absolute slope certificates")
{
    const auto lin = sample(unit, [](double x) { return 2 * x; });
    const auto c = build_absolute_slope_certificate(lin, zero_for(unit));
    CHECK(c.kind() == SlopeKind::absolute_slope);
    for (Index k = 0; k < unit.size(); ++k)
        CHECK(c.values()[k] == Approx(2.0));
    CHECK(verify_absolute_slope_certificate(lin, zero_for(unit), c).worst_margin <= 1e-12);

    const auto s = sample(sym, [](double x) { return 0.2 * std::sin(5 * x); });
    const auto phi = error_for(sym, 1.0, 2.0);
    const auto cs = build_absolute_slope_certificate(s, phi);
    CHECK(verify_absolute_slope_certificate(s, phi, cs).holds);
    CHECK(check_minmax(s, phi).holds);

    CHECK_THROWS_AS(build_absolute_slope_certificate(sample_catalog(catalog::quadratic<double>(), unit), zero_for(unit)),
                    CertificateError<double>);

    Vec bumpy = error_for(unit, 1.0).samples();
    bumpy[5] = 10;
    CHECK_THROWS_AS(build_absolute_slope_certificate(lin, ErrorFunctiond(1.0, bumpy)), PreconditionError);
}

TEST_CASE("Jensen-type inequality")
{
    const auto f = sample(unit, [](double x) { return std::cos(7 * x); });
    const auto phi = error_for(unit, 1.0, 0.5);
    // Two points with weights (j - k) / (j - i), (k - i) / (j - i).
    for (auto [i, k, j] : {std::array<Index, 3>{0, 10, 30}, std::array<Index, 3>{4, 5, 6}, std::array<Index, 3>{3, 9, 12}}) {
        const std::array<Index, 2> nodes{i, j};
        const double t = double(j - k) / double(j - i);
        const std::array<double, 2> weights{t, 1 - t};
        CHECK(check_jensen<double>(f, phi, nodes, weights) ==
              Approx(f[k] - oracle::chord(f.values(), unit, phi, i, k, j)).epsilon(1e-12));
    }
    const std::array<Index, 1> single{7};
    const std::array<double, 1> w1{1.0};
    CHECK(check_jensen<double>(f, phi, single, w1) == -phi[0]);

    const auto convex = sample_catalog(catalog::quadratic<double>(), sym);
    const auto phi2 = error_for(sym, 2.0);
    const std::array<Index, 4> four{5, 11, 19, 25};
    const std::array<double, 4> quarter{0.25, 0.25, 0.25, 0.25};
    CHECK(check_jensen<double>(convex, phi2, four, quarter) <= default_tolerance(convex, phi2));

    const std::array<Index, 2> odd{0, 1};
    const std::array<double, 2> halves{0.5, 0.5};
    CHECK_THROWS_AS(check_jensen<double>(f, phi, odd, halves), GridMismatchError);
    const std::array<double, 2> bad{0.7, 0.7};
    CHECK_THROWS_AS(check_jensen<double>(f, phi, odd, bad), PreconditionError);
}

TEST_CASE("slope regularity")
{
    const auto convex = convex_kinks(sym);
    const auto c0 = build_slope_certificate(convex, zero_for(sym));
    CHECK(check_slope_star_monotone(c0, zero_for(sym)).holds);

    const auto psi = sample(sym, [](double x) { return -std::abs(x); });
    const auto phi1 = error_for(sym, 1.0);
    const auto c1 = build_slope_certificate(psi, phi1);
    CHECK(check_slope_star_monotone(c1, phi1).holds);

    const auto saw = sample_catalog(catalog::sawtooth(0.2), sym);
    const auto ca = build_absolute_slope_certificate(saw, phi1);
    CHECK(check_absolute_slope_star_holder(ca, phi1).holds);

    const auto lin = sample(unit, [](double x) { return 5 * x - 1; });
    const auto cl = build_absolute_slope_certificate(lin, zero_for(unit));
    CHECK(check_absolute_slope_star_holder(cl, zero_for(unit)).holds);

    Vec jump = Vec::Zero(unit.size());
    jump.tail(10).setConstant(10);
    const SlopeCertificated fake(unit, jump, SlopeKind::absolute_slope);
    const auto r = check_absolute_slope_star_holder(fake, error_for(unit, 1.0, 1e-3));
    CHECK_FALSE(r.holds);
    CHECK(r.witness);

    CHECK_THROWS_AS(check_slope_star_monotone(fake, phi1), PreconditionError);
    CHECK_THROWS_AS(check_absolute_slope_star_holder(c0, phi1), PreconditionError);
}

TEST_CASE("composition with an outer function")
{
    const auto f = convex_kinks(sym);
    CHECK(compose_check(f, zero_for(sym), outer::positive_part<double>()).holds);
    const auto g = with_values(sym, f.values() - 1.0);
    CHECK(compose_check(g, error_for(sym, 1.0), outer::positive_part(2.0)).holds);
    CHECK(compose_check(f, error_for(sym, 2.0), outer::constant(0.5)).holds);

    CHECK_THROWS_AS(compose_check(sample_catalog(catalog::concave<double>(), sym), zero_for(sym),
                                  outer::positive_part<double>()),
                    PreconditionError);
    const OuterFunction<double> decreasing{"decreasing", [](double t) { return std::exp(-t); }};
    CHECK_THROWS_AS(compose_check(f, zero_for(sym), decreasing), OuterFunctionError<double>);
}

TEST_CASE("square root is rejected as an outer function")
{
    // f = 10x is Phi_2-convex, yet sqrt(f) is not Phi_1 = sqrt(Phi_2)-convex.
    const GridSpecd grid(0, 1, 31);
    const auto f = sample(grid, [](double x) { return 10 * x; });
    const auto phi2 = error_for(grid, 2.0);
    CHECK(check_phi_convex(f, phi2).holds);
    const auto root = sample(grid, [](double x) { return std::sqrt(10 * x); });
    CHECK_FALSE(check_phi_convex(root, error_for(grid, 1.0)).holds);
    CHECK_THROWS_AS(compose_check(f, phi2, outer::sqrt_positive<double>()), OuterFunctionError<double>);
}

TEST_CASE("cubic scans are bounded by default")
{
    const GridSpecd big(0, 1, 300);
    const auto f = sample_catalog(catalog::quadratic<double>(), big);
    const auto phi = zero_for(big);
    CHECK(check_phi_convex(f, phi).holds);
    CHECK_THROWS_AS(check_phi_convex_definitional(f, phi), PreconditionError);
    allow_large_scans(true);
    CHECK(check_phi_affine(sample(big, [](double x) { return x; }), phi).holds);
    allow_large_scans(false);
}

TEST_CASE("misaligned grids are rejected")
{
    const auto f = sample_catalog(catalog::quadratic<double>(), unit);
    const auto bad = make_power_error(1.0, 1.0, 47);
    CHECK_THROWS_AS(check_phi_convex(f, bad), GridMismatchError);
    CHECK_THROWS_AS(check_phi_monotone(f, bad), GridMismatchError);
    CHECK_THROWS_AS(check_phi_affine(f, bad), GridMismatchError);
}

TEST_CASE("catalog sweep: checks, oracles and certificates agree")
{
    for (const auto& entry : catalog_suite()) {
        const auto f = sample_catalog(entry, sym);
        for (double p : {0.0, 1.0, 2.0}) {
            const auto phi = error_for(sym, p);
            CAPTURE(entry.name);
            CAPTURE(p);
            const auto r = check_phi_convex(f, phi);
            CHECK(r.holds == check_phi_convex_definitional(f, phi).holds);
            CHECK(r.holds == (oracle::definitional_worst(f, phi) <= default_tolerance(f, phi)));
            CHECK(check_phi_affine(f, phi).holds == (r.holds && check_phi_convex(-f, phi).holds));
            if (r.holds) {
                const auto cert = build_slope_certificate(f, phi);
                CHECK(check_slope_star_monotone(cert, phi).holds);
            }
        }
    }
}
