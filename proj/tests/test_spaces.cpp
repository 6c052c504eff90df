#include "doctest.h"
#include "oracles.hpp"

#include "tfnorm/error.hpp"
#include "tfnorm/spaces.hpp"
#include "tfnorm/stft.hpp"

#include <cmath>

using namespace tfnorm;

namespace {

PhaseField random_field(const Grid& g, Rng& rng)
{
    PhaseField F = PhaseField::zeros(g);
    for (auto& v : F.values) v = rng.complex_normal();
    return F;
}

double nested_oracle(const std::vector<double>& m, std::size_t nx, std::size_t nk, double p, double q, double mux,
                     double muk)
{
    double outer = 0.0;
    for (std::size_t k = 0; k < nk; ++k) {
        double in = 0.0;
        for (std::size_t j = 0; j < nx; ++j) in += std::pow(m[j * nk + k], p) * mux;
        outer += std::pow(std::pow(in, 1.0 / p), q) * muk;
    }
    return std::pow(outer, 1.0 / q);
}

} // namespace

TEST_CASE("mixed norms of indicators")
{
    const Grid g = make_grid(1, 8, 0.5);
    PhaseField F = PhaseField::zeros(g);
    F.at(3, 5) = 1.0;
    for (double p : {0.5, 1.0, 2.0, inf})
        for (double q : {0.5, 1.0, 3.0, inf}) CHECK(mixed_norm(F, lebesgue(p, q, 1), SampleMeasure{1, 1}) == doctest::Approx(1.0));
    F.at(1, 2) = 1.0;
    CHECK(mixed_norm(F, lebesgue(2, 2, 1), SampleMeasure{1, 1}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(mixed_norm(PhaseField::zeros(g), lebesgue(0.5, 1, 1)) == 0.0);
}

TEST_CASE("mixed norm matches the nested-sum oracle")
{
    const Grid g = make_grid(1, 8, 0.5);
    Rng rng(4);
    const PhaseField F = random_field(g, rng);
    const Weight w = polynomial_weight(1.0, 2);
    const auto ws = w.sample_phase(g);
    std::vector<double> m(F.values.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::abs(F.values[i]) * ws[i];
    const double ref = nested_oracle(m, 8, 8, 0.5, 1.0, g.h, g.dual_step());
    CHECK(mixed_norm(F, QbfSpec(0.5, 1.0, w)) == doctest::Approx(ref).epsilon(1e-12));

    std::vector<double> mt(m.size());
    for (std::size_t j = 0; j < 8; ++j)
        for (std::size_t k = 0; k < 8; ++k) mt[k * 8 + j] = m[j * 8 + k];
    const double ref_star = nested_oracle(mt, 8, 8, 1.0, 0.5, g.dual_step(), g.h);
    CHECK(mixed_norm(F, QbfSpec(0.5, 1.0, w, Order::xi_inner)) == doctest::Approx(ref_star).epsilon(1e-12));
}

TEST_CASE("Gaussian STFT in L1 matches the closed form")
{
    const Grid g = make_grid(1, 128, 0.25);
    const PhaseField V = stft(gaussian(g), gaussian(g));
    CHECK(mixed_norm(V, lebesgue(1, 1, 1)) == doctest::Approx(2.0 * std::sqrt(oracle::two_pi)).epsilon(1e-8));
    CHECK(mixed_norm(V, lebesgue(2, 2, 1)) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(mixed_norm(V, lebesgue(inf, inf, 1)) == doctest::Approx(1.0 / std::sqrt(oracle::two_pi)).epsilon(1e-12));
}

TEST_CASE("exponent guards")
{
    const Grid g = make_grid(1, 8, 0.5);
    CHECK_THROWS_AS(mixed_norm(PhaseField::zeros(g), lebesgue(0.0, 1, 1)), PreconditionError);
    CHECK_THROWS_AS(mixed_norm(PhaseField::zeros(g), lebesgue(2, 2, 2)), PreconditionError);
    CHECK_THROWS_AS(make_partition(g, 0.3), GridMismatch);
}

TEST_CASE("sequence norms and step functions")
{
    const Grid g = make_grid(1, 16, 0.5);
    const Partition part = make_partition(g, 1.0);
    CHECK(part.ax == 2);
    const WienerSpec ws(1, 1, 1.0, unit_weight(2), lebesgue(1, 1, 1));
    CellSequence a = wiener_local(PhaseField::zeros(g), ws);
    const std::size_t nx = a.xcells.size(), nk = a.kcells.size();
    a.values[3 * nk + 2] = 1.0;
    CHECK(seq_norm(a, lebesgue(1, 1, 1)) == 1.0);
    a.values[5 * nk + 2] = 1.0;
    CHECK(seq_norm(a, lebesgue(1, 1, 1)) == 2.0);

    Rng rng(8);
    for (auto& v : a.values) v = rng.uniform();
    const PhaseField S = step_function(a, g, part);
    const SampleMeasure cell{1.0 / static_cast<double>(part.ax), 1.0 / static_cast<double>(part.b)};
    for (auto [p, q] : {std::pair{1.0, 1.0}, {0.5, 2.0}, {2.0, inf}})
        CHECK(mixed_norm(S, lebesgue(p, q, 1), cell) == doctest::Approx(seq_norm(a, lebesgue(p, q, 1))).epsilon(1e-12));
    CHECK(nx * part.ax == g.n);
}

TEST_CASE("Wiener norm of a cell indicator and the cube-scan oracle")
{
    const Grid g = make_grid(1, 8, 0.5);
    const Partition part = make_partition(g, 1.0);
    PhaseField F = PhaseField::zeros(g);
    for (std::size_t j = 2; j < 2 + part.ax; ++j)
        for (std::size_t k = 0; k < part.b; ++k) F.at(j, k) = 1.0;
    for (double r : {0.5, 1.0, inf}) CHECK(wiener_norm(F, WienerSpec(r, r, 1.0, unit_weight(2), lebesgue(1, 1, 1))) == doctest::Approx(1.0));

    Rng rng(21);
    const PhaseField R = random_field(g, rng);
    const std::size_t cx = g.n / part.ax, ck = g.n / part.b;
    double outer = 0.0;
    for (std::size_t ik = 0; ik < ck; ++ik) {
        double in = 0.0;
        for (std::size_t ix = 0; ix < cx; ++ix) {
            double loc = 0.0;
            for (std::size_t j = ix * part.ax; j < (ix + 1) * part.ax; ++j)
                for (std::size_t k = ik * part.b; k < (ik + 1) * part.b; ++k) loc += std::abs(R.at(j, k));
            loc /= static_cast<double>(part.ax * part.b);
            in += loc * loc;
        }
        outer += std::sqrt(in);
    }
    CHECK(wiener_norm(R, WienerSpec(1, 1, 1.0, unit_weight(2), lebesgue(2, 1, 1))) == doctest::Approx(outer).epsilon(1e-12));
}

TEST_CASE("Wiener norms increase with the local exponent")
{
    const Grid g = make_grid(1, 16, 0.5);
    Rng rng(99);
    const double rs[] = {0.5, 1.0, 2.0, inf};
    for (int t = 0; t < 50; ++t) {
        const PhaseField F = random_field(g, rng);
        const WienerSpec base(1, 1, 1.0, polynomial_weight(1.0, 2), lebesgue(t % 2 ? 1.0 : 0.5, 2.0, 1));
        double prev = 0.0;
        for (double r : rs) {
            const double v = wiener_norm(F, base.with_r(r, r));
            CHECK(v >= prev);
            prev = v;
        }
        CHECK(backend_norm_cells(F, base) <= wiener_norm(F, base.with_r(inf, inf)));
    }
}

TEST_CASE("sandwich constants")
{
    const Grid g = make_grid(1, 16, 0.5);
    const Partition part = make_partition(g, 1.0);
    PhaseField F = PhaseField::zeros(g);
    for (std::size_t j = 4; j < 4 + part.ax; ++j)
        for (std::size_t k = 0; k < part.b; ++k) F.at(j, k) = 1.0;
    const WienerSpec ws(1, 1, 1.0, unit_weight(2), lebesgue(1, 1, 1));
    const auto c = sandwich_constants({F}, ws);
    CHECK(c.c_low == doctest::Approx(1.0));
    CHECK(c.c_high == doctest::Approx(1.0));

    const Grid gg = make_grid(1, 64, 0.25);
    const WienerSpec w2(1, 1, 1.0, unit_weight(2), lebesgue(2, 1, 1));
    std::vector<PhaseField> ens, ens_r;
    Rng rng(3);
    std::vector<Source> src{gaussian_source(1)};
    for (int i = 0; i < 3; ++i) src.push_back(random_bandlimited(rng, 1, 3, 2.0));
    for (const auto& s : src) {
        ens.push_back(stft(s.on(gg), gaussian(gg)));
        ens_r.push_back(stft(s.on(gg.refined()), gaussian(gg.refined())));
    }
    const auto a = sandwich_constants(ens, w2), b = sandwich_constants(ens_r, w2);
    CHECK(std::isfinite(a.c_low));
    CHECK(a.c_high <= 1.0);
    CHECK(std::abs(b.c_low / a.c_low - 1.0) < 0.05);
    CHECK(std::abs(b.c_high / a.c_high - 1.0) < 0.05);
}

TEST_CASE("lattice Wiener norm")
{
    const Grid g = make_grid(1, 16, 0.5);
    Rng rng(5);
    const PhaseField F = random_field(g, rng);
    const WienerSpec ws(1, 2, 1.0, unit_weight(2), lebesgue(1, 1, 1));
    CHECK(wiener_norm_lattice(F, ws, 1.0, 1.0) == doctest::Approx(wiener_norm(F, ws)).epsilon(1e-12));
    CHECK(wiener_norm_lattice(PhaseField::zeros(g), ws, 1.0, 2.0) == 0.0);
    CHECK_THROWS_AS(wiener_norm_lattice(F, ws, 2.0, 1.0), PreconditionError);
}

TEST_CASE("discrete convolution bound")
{
    LatticeSeq delta = LatticeSeq::zeros({0, 0}, {1, 1});
    delta.values[0] = 1.0;
    LatticeSeq b = LatticeSeq::zeros({-2, -1}, {4, 3});
    Rng rng(2);
    for (auto& v : b.values) v = rng.complex_normal();
    const QbfSpec spec(0.5, 1.0, unit_weight(2));
    CHECK(discrete_conv_bound({delta}, {b}, spec) == doctest::Approx(1.0));

    LatticeSeq a1 = LatticeSeq::zeros({2, -1}, {1, 1});
    a1.values[0] = 1.0;
    LatticeSeq b1 = LatticeSeq::zeros({1, 3}, {1, 1});
    b1.values[0] = 1.0;
    const Weight w = polynomial_weight(1.0, 2);
    const QbfSpec ws(1.0, 1.0, w);
    const double ratio = w({3.0, 2.0}) / (w({2.0, -1.0}) * w({1.0, 3.0}));
    CHECK(discrete_conv_bound({a1}, {b1}, ws) == doctest::Approx(ratio));
    CHECK(ratio <= moderate_constant_on(w, w, make_box(2, 9, 4.0)));
}
