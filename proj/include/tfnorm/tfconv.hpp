#pragma once

#include "tfnorm/certificate.hpp"
#include "tfnorm/grid.hpp"
#include "tfnorm/source.hpp"
#include "tfnorm/spaces.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tfnorm {

/// Block of phase-space variables a partial convolution runs over.
enum class ConvAxis { time, freq };

/// Real phase theta(x, y, z): x the output variable of the convolved block, y the
/// spectator block, z the integration variable.
struct PhaseKernel {
    using Fn = std::function<double(std::span<const double>, std::span<const double>, std::span<const double>)>;

    Fn theta;
    bool is_zero = false;
    std::string label;

    static PhaseKernel zero();
    static PhaseKernel custom(Fn fn, std::string label);
};

/// (F *_theta G)(x, y) = int F(x - z, y) G(z, y) exp(i theta(x, y, z)) dz over the chosen
/// block, by quadrature with zero fill. theta = 0 runs through an FFT.
PhaseField theta_conv(const PhaseField& F, const PhaseField& G, const PhaseKernel& ker,
                      ConvAxis axis = ConvAxis::time);

/// Handling of frequency differences that leave the dual grid.
enum class FreqBoundary { zero_fill, periodic };

/// kappa1: phase <y, eta - xi> on F(X - Y) G(Y); kappa2: phase <y - x, eta> on F(Y) G(X - Y).
enum class TwistedForm { kappa1, kappa2 };

/// (2 pi)^{-d/2} int F(X - Y) G(Y) exp(i <y, eta - xi>) dY and its kappa2 rewriting.
PhaseField twisted_conv(const PhaseField& F, const PhaseField& G, TwistedForm form = TwistedForm::kappa1,
                        FreqBoundary boundary = FreqBoundary::zero_fill);

/// Ordinary convolution on phase space, zero fill, via FFT.
PhaseField phase_convolution(const PhaseField& F, const PhaseField& G);
/// Same by direct summation (one-dimensional signals).
PhaseField phase_convolution_direct(const PhaseField& F, const PhaseField& G);

/// f * g with Fourier transform (2 pi)^{d/2} f^ g^, evaluated on the grid of f.
Signal convolve(const Signal& f, const Signal& g);
Signal multiply(const Signal& f, const Signal& g);

/// max |V_{phi*psi}(f*g) - (2 pi)^{d/2} (V_phi f *_x V_psi g)| / max |V_{phi*psi}(f*g)|.
double conv_identity_defect(const Signal& f, const Signal& g, const Signal& phi, const Signal& psi);
/// max |V_{phi psi}(f g) - (2 pi)^{-d/2} (V_phi f *_xi V_psi g)| / max |V_{phi psi}(f g)|.
double mult_identity_defect(const Signal& f, const Signal& g, const Signal& phi, const Signal& psi);

/// Sampled phase-space function; resampled on refined grids by the certifiers.
using FieldSource = std::function<PhaseField(const Grid&)>;

/// Exponent data of the Wiener-space Young estimate.
struct YoungExponents {
    double p0 = 1.0;
    double p1 = 1.0;
    double p2 = 1.0;
};

struct WienerYoungSetup {
    YoungExponents p;
    QbfSpec backend; // B for the F and output norms
    Weight w0, w1, w2;
    std::optional<Weight> v; // v(x, y); defaults to the backend moderator at (x, 0)
    PhaseKernel theta = PhaseKernel::zero();
    double side = 1.0;
    Box box{3, 17, 4.0};
};

/// ||F *_theta G||_{W^{p0,r0}(w0,B)} <= C ||F||_{W^{p1,r0}(w1,B)} ||G||_{W^{p2,inf}_*(w2 v, l^{r0,inf}_*)}.
Certificate wiener_young_certificate(const std::vector<FieldSource>& Fs, const std::vector<FieldSource>& Gs,
                                     const Grid& grid, const WienerYoungSetup& setup);

struct ModulationProductSetup {
    QbfSpec backend;
    Weight w0, w1, w2;
    Box box{3, 17, 4.0};
};

/// ||f * g||_{M(w0,B)} <= C ||f||_{M(w1,B)} ||g||_{W^{r0,inf}_{(w2 v)}}, v(x, xi) = v0(x, 0).
Certificate mod_conv_certificate(const std::vector<Source>& fs, const std::vector<Source>& gs, const Grid& grid,
                                 const ModulationProductSetup& setup);
/// ||f g||_{M(w0,B)} <= C ||f||_{M(w1,B)} ||g||_{M^{inf,r0}_{(w2 v)}}, v(x, xi) = v0(0, xi).
Certificate mod_mult_certificate(const std::vector<Source>& fs, const std::vector<Source>& gs, const Grid& grid,
                                 const ModulationProductSetup& setup);

struct ClassicalExponents {
    double p0, q0, p1, q1, p2, q2;
};

/// ||f1 * f2||_{M^{p0,q0}_{(w0)}} <= C ||f1||_{M^{p1,q1}_{(w1)}} ||f2||_{M^{p2,q2}_{(w2)}} with
/// 1/p0 = 1/p1 + 1/p2 - max(1, 1/p1, 1/p2) and 1/q0 = 1/q1 + 1/q2.
Certificate classical_conv_certificate(const std::vector<Source>& fs, const std::vector<Source>& gs, const Grid& grid,
                                       const ClassicalExponents& e, const Weight& w0, const Weight& w1,
                                       const Weight& w2, const Box& box = Box{3, 17, 4.0});

} // namespace tfnorm
