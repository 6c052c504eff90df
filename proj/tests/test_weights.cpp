#include "doctest.h"

#include "tfnorm/error.hpp"
#include "tfnorm/weights.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace tfnorm;

namespace {

double scan_moderate(const Weight& w, const Weight& v, const Box& box)
{
    double c = 0.0;
    for (std::size_t i = 0; i < box.size(); ++i)
        for (std::size_t k = 0; k < box.size(); ++k) {
            const auto z = box.point(i), x = box.point(k);
            std::vector<double> y(z.size());
            for (std::size_t a = 0; a < y.size(); ++a) y[a] = z[a] - x[a];
            c = std::max(c, w(z) / (w(x) * v(y)));
        }
    return c;
}

} // namespace

TEST_CASE("polynomial and subexponential weights")
{
    CHECK(polynomial_weight(0.0, 3)({5.0, 1.0, 2.0}) == 1.0);
    CHECK(polynomial_weight(2.0, 3)({1.0, 0.0, 0.0}) == doctest::Approx(2.0));
    CHECK(subexp_weight(0.0, 1.0, 2)({3.0, 4.0}) == 1.0);
    CHECK(subexp_weight(1.0, 1.0, 2)({0.6, 0.8}) == doctest::Approx(std::exp(1.0)));
    CHECK(subexp_weight(1.0, 2.0, 1)({4.0}) == doctest::Approx(std::exp(2.0)));
    CHECK(unit_weight(2)({100.0, -3.0}) == 1.0);
    CHECK_THROWS(polynomial_weight(1.0, 2)({1.0}));
}

TEST_CASE("moderate constants against the exhaustive scan")
{
    const Box b1 = make_box(1, 33, 4.0);
    CHECK(moderate_constant(unit_weight(1), unit_weight(1), b1) == 1.0);
    const Weight e = subexp_weight(1.0, 1.0, 1);
    CHECK(moderate_constant(e, e, b1) == doctest::Approx(1.0));
    const Weight inv = polynomial_weight(-1.0, 2);
    const Weight mod = polynomial_weight(1.0, 2);
    const Box b2 = make_box(2, 9, 4.0);
    const double c = moderate_constant_on(inv, mod, b2);
    CHECK(c == doctest::Approx(scan_moderate(inv, mod, b2)).epsilon(1e-14));
    CHECK(c <= std::sqrt(2.0));
    const Weight p2 = polynomial_weight(2.0, 1);
    const Box b8 = make_box(1, 65, 8.0);
    const double c8 = moderate_constant_on(p2, p2, b8);
    CHECK(c8 == doctest::Approx(scan_moderate(p2, p2, b8)).epsilon(1e-14));
    CHECK(c8 <= 2.0);
    const double c8r = moderate_constant_on(p2, p2, make_box(1, 129, 8.0));
    CHECK(std::abs(c8r / c8 - 1.0) < 0.05);
}

TEST_CASE("unbounded moderation is reported as infinite")
{
    const Weight e = subexp_weight(1.0, 1.0, 1);
    CHECK(std::isinf(moderate_constant(e, polynomial_weight(1.0, 1), make_box(1, 33, 4.0))));
}

TEST_CASE("submultiplicativity scan")
{
    const Box b = make_box(2, 9, 3.0);
    auto rep = submultiplicative_check(unit_weight(2), b);
    CHECK(rep.max_violation == 0.0);
    CHECK(rep.symmetric);
    rep = submultiplicative_check(subexp_weight(1.0, 1.0, 2), b);
    CHECK(rep.max_violation <= 1e-12);
    CHECK(rep.symmetric);

    const Weight p = polynomial_weight(1.0, 1);
    const Box b1 = make_box(1, 33, 4.0);
    double oracle = -1.0;
    for (std::size_t i = 0; i < b1.size(); ++i)
        for (std::size_t k = 0; k < b1.size(); ++k) {
            const double z = b1.point(i)[0], x = b1.point(k)[0];
            oracle = std::max(oracle, p({z}) / (p({x}) * p({z - x})) - 1.0);
        }
    rep = submultiplicative_check(p, b1);
    CHECK(rep.max_violation == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(rep.max_violation > 0.0);
    CHECK(rep.max_violation <= std::sqrt(2.0) - 1.0);

    const Weight shifted = custom_weight(1, [](std::span<const double> x) { return std::exp(x[0]); }, "exp");
    CHECK_FALSE(submultiplicative_check(shifted, b1).symmetric);
}

TEST_CASE("tail ratios")
{
    const Box b = make_box(2, 33, 8.0);
    const double radii[3] = {2.0, 4.0, 8.0};
    const auto same = tail_sup_ratio(polynomial_weight(1.0, 2), polynomial_weight(1.0, 2), radii, b);
    for (double v : same) CHECK(v == doctest::Approx(1.0));
    const auto t = tail_sup_ratio(unit_weight(2), polynomial_weight(1.0, 2), radii, b);
    CHECK(t[0] == doctest::Approx(1.0 / std::sqrt(5.0)));
    CHECK(t[1] == doctest::Approx(1.0 / std::sqrt(17.0)));
    CHECK(t[2] == doctest::Approx(1.0 / std::sqrt(65.0)));
    const auto e = tail_sup_ratio(unit_weight(2), subexp_weight(1.0, 1.0, 2), radii, b);
    for (int i = 0; i < 3; ++i) CHECK(e[i] == doctest::Approx(std::exp(-radii[i])).epsilon(1e-12));
}

TEST_CASE("weight algebra")
{
    const Weight w = polynomial_weight(3.0, 2);
    const Weight one = weight_product(w, weight_reciprocal(w));
    for (double x : {-3.0, 0.0, 2.5}) CHECK(one({x, 1.0}) == doctest::Approx(1.0));
    CHECK(weight_product(polynomial_weight(1.0, 1), polynomial_weight(2.0, 1))({0.0}) == 1.0);
    CHECK(weight_power(w, 2.0)({1.0, 1.0}) == doctest::Approx(std::pow(w({1.0, 1.0}), 2.0)));

    const Weight prod = weight_product(polynomial_weight(1.0, 1), subexp_weight(0.5, 1.0, 1));
    REQUIRE(prod.moderator() != nullptr);
    const Box b = make_box(1, 33, 4.0);
    CHECK(moderate_constant_on(prod, *prod.moderator(), b) == doctest::Approx(scan_moderate(prod, *prod.moderator(), b)));
    CHECK(std::isfinite(moderate_constant(prod, *prod.moderator(), b)));
}

TEST_CASE("table weights interpolate multilinearly")
{
    const std::string path = "tfnorm_test_table.csv";
    {
        std::ofstream out(path);
        out << "x0,x1,w\n0,0,1\n0,1,2\n1,0,3\n1,1,4\n";
    }
    const Weight w = table_weight(path);
    CHECK(w.dim() == 2);
    CHECK(w({0.5, 0.5}) == doctest::Approx(2.5));
    CHECK(w({1.0, 0.25}) == doctest::Approx(3.25));
    {
        std::ofstream out(path);
        out << "x0,w\n0,1\n1,-2\n";
    }
    CHECK_THROWS_AS(table_weight(path), InvariantViolation);
    {
        std::ofstream out(path);
        out << "x0,w\n0,1\n1,abc\n";
    }
    CHECK_THROWS_AS(table_weight(path), ParseError);
    std::remove(path.c_str());
}
