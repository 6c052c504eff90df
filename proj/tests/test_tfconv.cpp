#include "doctest.h"
#include "oracles.hpp"

#include "tfnorm/error.hpp"
#include "tfnorm/stft.hpp"
#include "tfnorm/tfconv.hpp"

using namespace tfnorm;

namespace {

PhaseField random_field(const Grid& g, Rng& rng)
{
    CVec v(g.size() * g.size());
    for (auto& z : v) z = rng.complex_normal();
    return PhaseField(g, v);
}

} // namespace

TEST_CASE("theta = 0 convolution matches the direct oracle")
{
    Rng rng(1);
    for (double c : {0.0, 1.0}) {
        const Grid g = make_grid(1, 16, 0.5, {c});
        const PhaseField F = random_field(g, rng), G = random_field(g, rng);
        const PhaseField a = theta_conv(F, G, PhaseKernel::zero());
        const PhaseField b = oracle::theta_conv_x(F, G, [](double, double, double) { return 0.0; });
        CHECK(oracle::max_abs_diff(a.values, b.values) < 1e-10 * oracle::max_abs(b.values));
    }
}

TEST_CASE("general theta and the modulus bound")
{
    Rng rng(2);
    const Grid g = make_grid(1, 16, 0.5);
    const PhaseField F = random_field(g, rng), G = random_field(g, rng);
    const auto th = [](double x, double y, double z) { return x * y - 0.3 * z * z; };
    const PhaseKernel ker = PhaseKernel::custom(
        [th](std::span<const double> x, std::span<const double> y, std::span<const double> z) { return th(x[0], y[0], z[0]); },
        "quad");
    const PhaseField a = theta_conv(F, G, ker);
    const PhaseField b = oracle::theta_conv_x(F, G, th);
    CHECK(oracle::max_abs_diff(a.values, b.values) < 1e-10 * oracle::max_abs(b.values));
    PhaseField aF = F, aG = G;
    for (auto& z : aF.values) z = std::abs(z);
    for (auto& z : aG.values) z = std::abs(z);
    const PhaseField bound = theta_conv(aF, aG, PhaseKernel::zero());
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(std::abs(a.values[i]) <= bound.values[i].real() + 1e-12);
}

TEST_CASE("point mass is the identity of theta_conv")
{
    Rng rng(3);
    const Grid g = make_grid(1, 16, 0.5);
    const PhaseField F = random_field(g, rng);
    PhaseField G = PhaseField::zeros(g);
    for (std::size_t k = 0; k < g.n; ++k) G.at(g.n / 2, k) = 1.0 / g.h;
    const PhaseField a = theta_conv(F, G, PhaseKernel::zero());
    CHECK(oracle::max_abs_diff(a.values, F.values) < 1e-12);
}

TEST_CASE("twisted convolution forms and oracle")
{
    Rng rng(4);
    const Grid g = make_grid(1, 16, 0.5);
    const PhaseField F = random_field(g, rng), G = random_field(g, rng);
    for (auto bd : {FreqBoundary::zero_fill, FreqBoundary::periodic}) {
        const PhaseField a = twisted_conv(F, G, TwistedForm::kappa1, bd);
        const PhaseField b = twisted_conv(F, G, TwistedForm::kappa2, bd);
        const PhaseField o = oracle::twisted_kappa1(F, G, bd == FreqBoundary::periodic);
        CHECK(oracle::max_abs_diff(a.values, o.values) < 1e-10 * oracle::max_abs(o.values));
        CHECK(oracle::max_abs_diff(a.values, b.values) < 1e-10 * oracle::max_abs(o.values));
    }
    const cplx lambda(2.0, -1.5);
    const PhaseField s1 = twisted_conv(scaled(F, lambda), G);
    const PhaseField s2 = scaled(twisted_conv(F, G), lambda);
    CHECK(oracle::max_abs_diff(s1.values, s2.values) < 1e-12 * oracle::max_abs(s2.values));
}

TEST_CASE("twisted convolution with a mass at the origin")
{
    Rng rng(5);
    const Grid g = make_grid(1, 16, 0.5);
    const PhaseField F = random_field(g, rng);
    PhaseField G = PhaseField::zeros(g);
    G.at(g.n / 2, g.n / 2) = 1.0;
    const PhaseField a = twisted_conv(F, G);
    const PhaseField b = scaled(F, G.cell() / std::sqrt(oracle::two_pi));
    CHECK(oracle::max_abs_diff(a.values, b.values) < 1e-12);
}

TEST_CASE("convolve is the lattice convolution")
{
    const Grid g = make_grid(1, 32, 0.5);
    Rng rng(6);
    const Signal f = random_bandlimited(rng, 1, 2, 1.0).on(g);
    const Signal h = random_bandlimited(rng, 1, 2, 1.0).on(g);
    const Signal c = convolve(f, h);
    for (std::size_t t = 0; t < g.n; ++t) {
        cplx acc = 0.0;
        const double x = g.coord(0, t);
        for (std::size_t m = 0; m < g.n; ++m) {
            const long i = std::lround((x - g.coord(0, m) - g.offset[0]) / g.h);
            if (i >= 0 && i < static_cast<long>(g.n)) acc += f.values[static_cast<std::size_t>(i)] * h.values[m];
        }
        CHECK(std::abs(c.values[t] - g.h * acc) < 1e-12);
    }
}

TEST_CASE("assist identities for convolution and multiplication")
{
    const Grid g = make_grid(1, 96, 0.25);
    const Signal phi = gaussian(g);
    CHECK(conv_identity_defect(phi, phi, phi, phi) <= 1e-6);
    CHECK(mult_identity_defect(phi, phi, phi, phi) <= 1e-6);
    const Signal f = atom_source(Atom{{1.0}, {0.5}, 1.0, 1.0}, "f").on(g);
    const Signal h = atom_source(Atom{{-1.5}, {-1.0}, 1.0, 1.0}, "h").on(g);
    const Signal psi = window_source("gauss:dilate=0.8").on(g);
    CHECK(conv_identity_defect(f, h, phi, psi) <= 1e-6);
    CHECK(mult_identity_defect(f, h, phi, psi) <= 1e-6);
    CHECK(conv_identity_defect(f, Signal::zeros(g), phi, psi) == 0.0);
    CHECK(mult_identity_defect(f, Signal::zeros(g), phi, psi) == 0.0);
}

TEST_CASE("classical convolution certificate")
{
    const Grid g = make_grid(1, 64, 0.25);
    const std::vector<Source> fs{gaussian_source(1), atom_source(Atom{{1.0}, {0.5}, 1.0, 1.0}, "f")};
    const std::vector<Source> gs{window_source("gauss:shift=1")};
    const ClassicalExponents e{1, 1, 1, 1, 1, inf};
    const Weight u = unit_weight(2);
    const Certificate c = classical_conv_certificate(fs, gs, g, e, u, u, u);
    CHECK(c.hypotheses_ok);
    CHECK(c.weight_constant == doctest::Approx(1.0));
    CHECK(std::isfinite(c.constant));
    CHECK(c.relative_change < 0.05);
    const std::vector<Source> scaled_gs{gs[0].scaled(4.0)};
    CHECK(classical_conv_certificate(fs, scaled_gs, g, e, u, u, u).constant == doctest::Approx(c.constant).epsilon(1e-10));
    CHECK_THROWS_AS(classical_conv_certificate(fs, gs, g, ClassicalExponents{1, 1, 1, 1, 1, 1}, u, u, u), PreconditionError);
    CHECK_THROWS_AS(classical_conv_certificate(fs, gs, g, ClassicalExponents{2, 1, 1, 1, 1, inf}, u, u, u), PreconditionError);
}

TEST_CASE("modulation product certificates")
{
    const Grid g = make_grid(1, 64, 0.25);
    const std::vector<Source> fs{gaussian_source(1), atom_source(Atom{{-1.0}, {1.0}, 1.0, 1.0}, "f")};
    const std::vector<Source> gs{gaussian_source(1)};
    const ModulationProductSetup s{lebesgue(2, 2, 1), unit_weight(2), unit_weight(2), unit_weight(2)};
    for (const Certificate& c : {mod_conv_certificate(fs, gs, g, s), mod_mult_certificate(fs, gs, g, s)}) {
        CHECK(c.hypotheses_ok);
        CHECK(std::isfinite(c.constant));
        CHECK(c.constant > 0.0);
        CHECK(c.relative_change < 0.05);
    }
    const ModulationProductSetup bad{lebesgue(2, 2, 1), subexp_weight(1.0, 1.0, 2), unit_weight(2), unit_weight(2)};
    CHECK_FALSE(mod_conv_certificate(fs, gs, g, bad).hypotheses_ok);
}

TEST_CASE("Wiener-space Young certificate")
{
    const Grid g = make_grid(1, 32, 0.5);
    const auto field = [](const Source& s) { return [s](const Grid& gr) { return stft(s.on(gr), gaussian(gr)); }; };
    const std::vector<FieldSource> Fs{field(gaussian_source(1))};
    const std::vector<FieldSource> Gs{field(atom_source(Atom{{1.0}, {0.0}, 1.0, 1.0}, "g"))};
    WienerYoungSetup s{YoungExponents{1, 1, 1}, lebesgue(1, 1, 1), unit_weight(2), unit_weight(2), unit_weight(2)};
    const Certificate c = wiener_young_certificate(Fs, Gs, g, s);
    CHECK(c.hypotheses_ok);
    CHECK(std::isfinite(c.constant));
    CHECK(c.constant > 0.0);
    s.p = YoungExponents{1, 2, 2};
    CHECK_THROWS_AS(wiener_young_certificate(Fs, Gs, g, s), PreconditionError);
}
