#pragma once

#include "tfnorm/grid.hpp"
#include "tfnorm/weights.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tfnorm {

/// Seeded generator with platform-independent double conversion.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(); // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    cplx complex_normal() { return {normal(), normal()}; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// amplitude * pi^{-d/4} width^{-d/2} exp(-|x - x0|^2 / (2 width^2)) exp(i <x, xi0>)
struct Atom {
    std::vector<double> x0;
    std::vector<double> xi0;
    double width = 1.0;
    cplx amplitude = 1.0;

    cplx operator()(std::span<const double> x) const;
};

/// Closed-form signal: finite sum of Gaussian atoms. Can be sampled on any grid.
struct Source {
    std::vector<Atom> atoms;
    std::string label;

    Signal on(const Grid& g) const;
    Source scaled(cplx s) const;
};

Source gaussian_source(int d);
Source atom_source(const Atom& a, std::string label);

/// Sum of `terms` random atoms with centres in [-spread, spread]^d, frequencies in
/// [-spread, spread]^d and widths in [0.7, 1.4]; smooth and effectively band-limited.
Source random_bandlimited(Rng& rng, int d, int terms = 5, double spread = 3.0);

/// f_k = w1(X_k)^{-1} exp(i <., xi_k>) phi0(. - x_k) for X_k on a square lattice
/// with m points (m a perfect square for d = 1) filling [-half_width, half_width]^{2d}.
std::vector<Source> probe_family(const Weight& w1, int d, std::size_t m, double half_width);

/// Window from a spec string: gauss, gauss:dilate=2, gauss:shift=1, gauss:mod=1 (combinable).
Source window_source(const std::string& spec, int d = 1);

std::vector<Signal> sample_all(const std::vector<Source>& sources, const Grid& g);

} // namespace tfnorm
