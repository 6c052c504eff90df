#pragma once

#include "tfnorm/fft.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace tfnorm {

/// Uniform lattice {offset + m*h : 0 <= m < n} per axis, d axes, row-major order.
struct Grid {
    int dim = 1;
    std::size_t n = 2;
    double h = 1.0;
    std::vector<double> offset{0.0};

    std::size_t size() const;
    double weight() const; // h^d
    double coord(int axis, std::size_t i) const { return offset[static_cast<std::size_t>(axis)] + static_cast<double>(i) * h; }
    std::vector<double> point(std::size_t flat) const;
    std::vector<double> center() const;
    double dual_step() const;
    Grid dual() const;
    Grid refined() const; // half the step, twice the points, same center
};

/// Validating constructor: d in {1,2}, n even and >= 2, h > 0.
Grid make_grid(int d, std::size_t n, double h, std::vector<double> center = {});

/// Grids agree up to a relative rounding tolerance.
bool same_grid(const Grid& a, const Grid& b);

/// Throws GridMismatch unless same_grid(a, b).
void require_same_grid(const Grid& a, const Grid& b, const char* what);

/// Integer shift s such that the sample at lattice position (i - j)*h has index i - j + s
/// along every axis. Throws unless the grid center is a multiple of h.
long difference_shift(const Grid& g);

struct Signal {
    Grid grid;
    CVec values;

    Signal() = default;
    Signal(Grid g, CVec v);
    static Signal zeros(const Grid& g);
};

/// Phase-space samples F(x_j, xi_k) stored at values[j * N + k], N = n^d.
struct PhaseField {
    Grid time;
    Grid freq;
    CVec values;

    PhaseField() = default;
    PhaseField(Grid t, CVec v);
    static PhaseField zeros(const Grid& t);

    std::size_t points() const { return time.size(); }
    cplx& at(std::size_t ix, std::size_t ik) { return values[ix * freq.size() + ik]; }
    const cplx& at(std::size_t ix, std::size_t ik) const { return values[ix * freq.size() + ik]; }
    double cell() const { return time.weight() * freq.weight(); }
};

/// h^d (2 pi)^{-d/2} sum_m f(x_m) exp(-i <x_m, xi_k>) on the dual grid.
Signal dft(const Signal& f);

/// Inverse of dft. The result lives on `target` (same n and step as the dual of f.grid);
/// by default the origin-centred grid.
Signal inverse_dft(const Signal& F, const std::optional<Grid>& target = std::nullopt);

cplx inner(const Signal& f, const Signal& g);
double l2_norm(const Signal& f);
cplx inner(const PhaseField& F, const PhaseField& G);
double l2_norm(const PhaseField& F);

/// Samples of an arbitrary function on the grid.
Signal sample(const Grid& g, const std::function<cplx(std::span<const double>)>& fn);

/// pi^{-d/4} exp(-|x|^2 / 2).
Signal gaussian(const Grid& g);

/// exp(i <., xi0>) f(. - x0) with zero fill; x0 must be a lattice vector.
Signal tf_shift(const Signal& f, std::span<const double> x0, std::span<const double> xi0);

/// Largest modulus over samples on the boundary of the grid box.
double mass_outside_estimate(const Signal& f);
double mass_outside_estimate(const PhaseField& F);

/// Band-limited interpolation of a 1-d signal onto the half-step lattice
/// offset + q*h/2, 0 <= q < 2n (even q reproduce the samples).
CVec half_lattice(const Signal& f);
CVec half_lattice(std::span<const cplx> values);

Signal scaled(const Signal& f, cplx s);
Signal operator+(const Signal& a, const Signal& b);
Signal operator-(const Signal& a, const Signal& b);
PhaseField scaled(const PhaseField& F, cplx s);

} // namespace tfnorm
