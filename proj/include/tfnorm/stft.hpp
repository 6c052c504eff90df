#pragma once

#include "tfnorm/grid.hpp"
#include "tfnorm/source.hpp"

#include <vector>

namespace tfnorm {

/// V_phi f(x_j, xi_k) = (2 pi)^{-d/2} h^d sum_m f(x_m) conj(phi(x_m - x_j)) exp(-i <x_m, xi_k>).
/// f and phi share a grid whose centre is a lattice point; phi is zero outside its grid.
PhaseField stft(const Signal& f, const Signal& window);

/// Adjoint of stft with respect to the quadrature inner products.
Signal stft_adjoint(const PhaseField& F, const Signal& window);

/// ||phi||^{-2} V_phi^* V_phi f.
Signal reconstruct(const Signal& f, const Signal& window);

/// Relative L2 distance between f and reconstruct(f, window).
double reconstruction_defect(const Signal& f, const Signal& window);

/// |(V_{phi1} f, V_{phi2} g) - (phi2, phi1)(f, g)| / (||f|| ||g|| ||phi1|| ||phi2||).
double moyal_defect(const Signal& f, const Signal& g, const Signal& phi1, const Signal& phi2);

/// max |V_phi f(X) - exp(-i<x, xi>) conj(V_f phi(-X))| over points X, -X both on the phase grid.
double swap_window_defect(const Signal& f, const Signal& phi);

/// Same comparison for the moduli |V_phi f(X)| and |V_f phi(-X)|.
double swap_window_modulus_defect(const Signal& f, const Signal& phi);

struct ChangeWindowReport {
    double max_excess = 0.0;      // max of |V_{phi1} f| - ||phi2||^{-2} (|V_{phi2} f| * |V_{phi1} phi2|)
    double route_agreement = 0.0; // relative gap between FFT and direct convolution (d = 1)
};

ChangeWindowReport change_window_check(const Signal& f, const Signal& phi1, const Signal& phi2);

/// Empirical C in |V f(X0)| <= C ||V f||_{L^p(B_R(X0))} with the Gaussian window, over
/// points X0 whose ball fits in the phase grid and where |V f| >= 1e-6 max |V f|.
double local_sup_constant(const std::vector<Signal>& ensemble, double p, double R);

struct StabilityReport {
    double base = 0.0;
    double refined = 0.0;
    double relative_change = 0.0;
};

StabilityReport local_sup_report(const std::vector<Source>& ensemble, const Grid& grid, double p, double R);

enum class ProjectionRoute { adjoint, twisted };

/// (||phi1|| ||phi2||)^{-1} V_{phi2} V_{phi1}^* F, by the operator route or as a twisted
/// convolution with V_{phi2} phi1 (one-dimensional signals only).
PhaseField window_projection(const PhaseField& F, const Signal& phi1, const Signal& phi2,
                             ProjectionRoute route = ProjectionRoute::adjoint);

} // namespace tfnorm
