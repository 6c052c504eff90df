#include "doctest.h"

#include "tfnorm/error.hpp"
#include "tfnorm/io.hpp"
#include "tfnorm/modspace.hpp"

#include <cmath>
#include <sstream>

using namespace tfnorm;

TEST_CASE("format_double round-trips")
{
    for (double v : {0.0, 1.0, -2.5, 1.0 / 3.0, 6.02214076e23, 5e-324, inf, -inf}) CHECK(parse_double(format_double(v)) == v);
    CHECK(std::isnan(parse_double(format_double(std::nan("")))));
    CHECK_THROWS_AS(parse_double("1.5x"), ParseError);
    CHECK_THROWS_AS(parse_double(""), ParseError);
}

TEST_CASE("signal CSV round trip is exact")
{
    const Grid g = make_grid(1, 16, 0.25, {0.5});
    Rng rng(5);
    const Signal f = random_bandlimited(rng, 1, 3, 1.0).on(g);
    std::stringstream ss;
    write_signal_csv(ss, f);
    const Signal r = read_signal_csv(ss);
    CHECK(same_grid(r.grid, g));
    CHECK(r.values == f.values);
}

TEST_CASE("phase CSV round trip is exact")
{
    const Grid g = make_grid(1, 8, 0.5);
    PhaseField F = PhaseField::zeros(g);
    for (std::size_t i = 0; i < F.values.size(); ++i) F.values[i] = {std::sin(0.1 * i), 1.0 / (1.0 + i)};
    std::stringstream ss;
    write_phase_csv(ss, F);
    const PhaseField R = read_phase_csv(ss);
    CHECK(R.values == F.values);
}

TEST_CASE("malformed CSV input raises ParseError")
{
    auto read = [](const std::string& text) {
        std::istringstream is(text);
        return read_signal_csv(is);
    };
    CHECK_THROWS_AS(read("index,re,im\n0,1,0\n"), ParseError);
    CHECK_THROWS_AS(read("# grid d=1 n=2 h=1 center=0\nindex,re,im\n0,1,0\n"), ParseError);
    CHECK_THROWS_AS(read("# grid d=1 n=2 h=1 center=0\nindex,re,im\n0,1,0\n0,1,0\n"), ParseError);
    CHECK_THROWS_AS(read("# grid d=1 n=2 h=1 center=0\nindex,re,im\n0,1,0\n2,1,0\n"), ParseError);
    CHECK_THROWS_AS(read("# grid d=1 n=3 h=1 center=0\nindex,re,im\n0,1,0\n"), ParseError);
    CHECK_THROWS_AS(read("# grid d=1 n=2 h=1 center=0\nindex,re,im\n0,1\n1,0,0\n"), ParseError);
    CHECK_NOTHROW(read("# grid d=1 n=2 h=1 center=0\nindex,re,im\n1,1,0\n0,2,0\n"));
}

TEST_CASE("split_params respects nesting and key lookahead")
{
    const auto p = split_params("p=2,q=1,w=prod(poly:s=1,subexp:r=1,s=2)", {"p", "q", "w"}, {"w"});
    REQUIRE(p.size() == 3);
    CHECK(p[2].second == "prod(poly:s=1,subexp:r=1,s=2)");
    const auto m = split_params("w=subexp:r=1,s=2,B=Lpq:p=1,q=1", {"w", "B"}, {"B"});
    REQUIRE(m.size() == 2);
    CHECK(m[0].second == "subexp:r=1,s=2");
    CHECK(m[1].second == "Lpq:p=1,q=1");
    CHECK_THROWS_AS(split_params("z=1", {"p"}), ParseError);
    CHECK_THROWS_AS(split_params("p", {"p"}), ParseError);
}

TEST_CASE("weight grammar")
{
    CHECK(parse_weight("1", 2)({3.0, 4.0}) == 1.0);
    CHECK(parse_weight("poly:s=2", 2)({3.0, 4.0}) == doctest::Approx(26.0));
    CHECK(parse_weight("subexp:r=1,s=2", 1)({4.0}) == doctest::Approx(std::exp(2.0)));
    CHECK(parse_weight("prod(poly:s=1,poly:s=1)", 1)({1.0}) == doctest::Approx(2.0));
    CHECK(parse_weight("inv(poly:s=2)", 1)({1.0}) == doctest::Approx(0.5));
    CHECK(parse_weight("pow(poly:s=2,0.5)", 1)({1.0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(parse_weight("poly", 1), ParseError);
    CHECK_THROWS_AS(parse_weight("bogus:s=1", 1), ParseError);
    CHECK_THROWS_AS(parse_weight("subexp:r=1,s=0.5", 1), ParseError);
    CHECK_THROWS_AS(parse_weight("table:path=/nonexistent.csv", 1), ParseError);
}

TEST_CASE("backend and space grammar")
{
    const QbfSpec b = parse_backend("Lpq:p=1,q=2,order=star,w=poly:s=1", 2);
    CHECK(b.p == 1.0);
    CHECK(b.q == 2.0);
    CHECK(b.order == Order::xi_inner);
    CHECK(b.weight({1.0, 0.0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(parse_backend("Lpq:p=inf,q=1", 2).p == inf);
    CHECK_THROWS_AS(parse_backend("Lpq:p=0,q=1", 2), ParseError);
    CHECK_THROWS_AS(parse_backend("Lr:p=1", 2), ParseError);

    const Grid g = make_grid(1, 64, 0.25);
    const Signal f = gaussian(g);
    const Signal phi = gaussian(g);
    const SpaceSpec m2 = parse_space("M:w=1,B=Lpq:p=2,q=2", 1);
    CHECK(space_norm(f, phi, m2) == doctest::Approx(modulation_norm(f, phi, unit_weight(2), lebesgue(2, 2, 1))));
    const SpaceSpec w = parse_space("W:r=1,side=1,B=Lpq:p=1,q=1", 1);
    CHECK(w.kind == SpaceSpec::Kind::wiener_modulation);
    CHECK(space_norm(f, phi, w) > 0.0);
    CHECK(parse_space("wiener:r1=1,r2=2,seq=Lpq:p=1,q=1", 1).r2 == 2.0);
    CHECK_THROWS_AS(parse_space("Q:w=1", 1), ParseError);
}

TEST_CASE("symbol and quantization grammar")
{
    CHECK(parse_symbol("const:c=2")(1.0, 1.0) == cplx(2.0));
    CHECK(parse_symbol("gauss:a=0.5")(1.0, 1.0).real() == doctest::Approx(std::exp(-1.0)));
    CHECK(parse_symbol("mult:w=poly:s=-2")(1.0, 7.0).real() == doctest::Approx(0.5));
    CHECK(parse_symbol("fmult:w=poly:s=-2")(7.0, 1.0).real() == doctest::Approx(0.5));
    CHECK_THROWS_AS(parse_symbol("mult"), ParseError);
    CHECK(parse_quantization("weyl").A == 0.5);
    CHECK(parse_quantization("I").A == 1.0);
    CHECK(parse_quantization("1.5").A == 1.5);
    CHECK_THROWS_AS(parse_quantization("0.3"), ParseError);
}

TEST_CASE("config parsing")
{
    std::istringstream ok("# comment\nseed = 7\ngrid.n = 16 # trailing\ngrid.h=0.5\nensemble.count=3\n");
    const Config c = Config::parse(ok);
    CHECK(c.seed() == 7);
    CHECK(c.number("grid.h") == 0.5);
    CHECK(c.get_or("missing", "x") == "x");
    const Grid g = grid_from_config(c);
    CHECK(g.n == 16);
    CHECK(ensemble_from_config(c).count == 3);

    std::istringstream no_seed("grid.n = 16\n");
    CHECK_THROWS_AS(Config::parse(no_seed), ParseError);
    std::istringstream dup("seed=1\nseed=2\n");
    CHECK_THROWS_AS(Config::parse(dup), ParseError);
    std::istringstream bad_seed("seed=-1\n");
    CHECK_THROWS_AS(Config::parse(bad_seed), ParseError);
    std::istringstream bad_line("seed=1\njunk\n");
    CHECK_THROWS_AS(Config::parse(bad_line), ParseError);
    std::istringstream bad_grid("seed=1\ngrid.n=7\n");
    CHECK_THROWS_AS(grid_from_config(Config::parse(bad_grid)), ParseError);
    CHECK_THROWS_AS(Config::load("/nonexistent/file.cfg"), ParseError);
}

TEST_CASE("ensembles are deterministic in the seed")
{
    EnsembleSpec spec;
    spec.count = 4;
    spec.seed = 11;
    const Grid g = make_grid(1, 32, 0.5);
    const auto a = sample_all(generate_ensemble(spec), g);
    const auto b = sample_all(generate_ensemble(spec), g);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].values == b[i].values);
    CHECK(a[0].values == gaussian_source(1).on(g).values);
    spec.seed = 12;
    CHECK(sample_all(generate_ensemble(spec), g)[1].values != a[1].values);
    spec.count = 0;
    CHECK(generate_ensemble(spec).empty());
}
