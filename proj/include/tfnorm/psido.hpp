#pragma once

#include "tfnorm/certificate.hpp"
#include "tfnorm/grid.hpp"
#include "tfnorm/source.hpp"
#include "tfnorm/spaces.hpp"
#include "tfnorm/weights.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tfnorm {

/// Quantization parameter A (one-dimensional signals: a real number with 2A an integer).
struct Quantization {
    double A = 0.0;

    static Quantization kohn_nirenberg() { return {0.0}; }
    static Quantization weyl() { return {0.5}; }
    static Quantization anti() { return {1.0}; }

    /// 2A as an integer; throws PreconditionError for off-lattice A.
    long twice() const;
    std::string label() const;
};

Quantization make_quantization(double A);

/// Closed-form symbol a(x, xi).
using SymbolSource = std::function<cplx(double, double)>;

/// Samples of a symbol on the phase grid of `field.time`, optionally with exact samples on
/// the half-step rows offset + q h / 2, 0 <= q < 2n, stored at half[q * n + k].
struct SymbolField {
    PhaseField field;
    Quantization quant;
    std::optional<CVec> half;

    SymbolField(PhaseField f, Quantization q, std::optional<CVec> half_rows = std::nullopt);
};

/// Samples a closed-form symbol, including its exact half-step rows.
SymbolField sample_symbol(const Grid& time, const SymbolSource& a, Quantization q);

/// Dense matrix acting on samples: (M f)_j = sum_m M(j, m) f_m (quadrature included).
struct OperatorMatrix {
    Grid grid;
    CVec m;

    std::size_t n() const { return grid.n; }
    cplx& operator()(std::size_t j, std::size_t k) { return m[j * grid.n + k]; }
    const cplx& operator()(std::size_t j, std::size_t k) const { return m[j * grid.n + k]; }
    static OperatorMatrix zeros(const Grid& g);
};

Signal apply(const OperatorMatrix& M, const Signal& f);
/// ||A - B||_F / ||B||_F (absolute when B = 0).
double frobenius_gap(const OperatorMatrix& A, const OperatorMatrix& B);

/// M(j, m) = (2 pi)^{-1} h dxi sum_k a(x_j - A (x_j - y_m), xi_k) exp(i (x_j - y_m) xi_k) for
/// |j - m| < n / 2; half-step positions use the stored or interpolated half rows.
OperatorMatrix kernel_from_symbol(const SymbolField& a);
Signal apply_op(const SymbolField& a, const Signal& f);

/// Symbol of the same operator in quantization `to`.
SymbolField quantization_convert(const SymbolField& a, Quantization to);

/// W^A_{f1,f2}(x, xi) = (2 pi)^{-1/2} int f1(x + A y) conj(f2(x - (1 - A) y)) exp(-i y xi) dy.
PhaseField wigner(const Signal& f1, const Signal& f2, Quantization A);
/// Same, with its half-step rows, ready for kernel_from_symbol.
SymbolField wigner_symbol(const Signal& f1, const Signal& f2, Quantization A);

/// (2 pi)^{-1/2} h f1(x_j) conj(f2(x_m)).
OperatorMatrix rank_one_matrix(const Signal& f1, const Signal& f2);
double rank_one_defect(const Signal& f1, const Signal& f2, Quantization A);

/// V_{phi2}^* (a V_{phi1} f).
Signal toeplitz_direct(const PhaseField& a, const Signal& phi1, const Signal& phi2, const Signal& f);
OperatorMatrix toeplitz_matrix(const PhaseField& a, const Signal& phi1, const Signal& phi2);

/// Weyl symbol a * u with u(X) = (2 pi)^{-1/2} W_{phi2,phi1}(X), periodic in xi.
SymbolField toeplitz_weyl_symbol(const PhaseField& a, const Signal& phi1, const Signal& phi2);

/// Max over probe points of |V_Phi K - (2 pi)^{-1/2} e^{i<y-x, A(xi+eta)-eta>} V_Psi a(T_A)| relative
/// to max |V_Phi K|, with Phi = phia (x) phib and Psi(w, z) = (2 pi)^{-1/2} int Phi(w + A s, w - (1-A) s) e^{-i s z} ds.
double kernel_stft_relation_defect(const SymbolField& a, const Signal& phia, const Signal& phib,
                                   std::size_t probes = 32, std::uint64_t seed = 1);

/// ||V_Psi a w||_{L^{p,q}} over R^{4d} with the normalized Gaussian window on R^{2d}: inner L^p over
/// window positions at least `margin` from the box edges, outer L^q over the dual variables.
/// Weight arguments are (x, xi, dual of x, dual of xi).
double symbol_norm(const PhaseField& a, const Weight& w, double p, double q, double margin = 4.0);

struct PsidoSetup {
    Quantization quant;
    Weight w0; // on R^{4d}
    Weight w1, w2;
    QbfSpec backend;
    Box box{4, 13, 4.0};
    double margin = 4.0;
};

/// ||Op_A(a) f||_{M(w2,B)} <= C ||a||_{M^{inf,r0}_{(w0)}} ||f||_{M(w1,B)}.
Certificate psido_bound_certificate(const SymbolSource& a, const std::vector<Source>& ensemble, const Grid& grid,
                                    const PsidoSetup& setup);

struct ToeplitzSetup {
    Source phi1, phi2;
    Weight w; // on R^{4d}
    Weight w1, w2, theta1, theta2;
    QbfSpec backend;
    double q = 1.0;
    double r = 1.0;
    Box box{6, 7, 3.0};
    double margin = 4.0;
};

/// ||Tp(a) f||_{M(w2,B)} <= C ||a||_{M^{inf,q}_{(w)}} ||f||_{M(w1,B)} ||phi1||_{M^r_{(theta1)}} ||phi2||_{M^r_{(theta2)}}.
Certificate toeplitz_bound_certificate(const SymbolSource& a, const std::vector<Source>& ensemble, const Grid& grid,
                                       const ToeplitzSetup& setup);

struct LiftingReport {
    double matrix_cond = 0.0;
    double forward = 0.0; // sup ||Tp f||_{M(w/theta,B)} / ||f||_{M(theta w,B)}
    double inverse = 0.0; // sup ||Tp^{-1} g||_{M(theta w,B)} / ||g||_{M(w/theta,B)}
    double refined_matrix_cond = 0.0;
    double refined_forward = 0.0;
    double refined_inverse = 0.0;
    bool singular = false;
    double moderate_w0 = 0.0; // box constant of w0 against its moderator
    double moderate_w = 0.0;  // box constant of w against its moderator

    double forward_change() const;
    double inverse_change() const;
    double product_change() const;
};

/// Tp_phi(w0) from M(theta w, B) to M(w / theta, B), theta = w0^{1/2}.
LiftingReport lifting_check(const Weight& w0, const Source& phi, const Weight& w, const QbfSpec& backend,
                            const std::vector<Source>& ensemble, const Grid& grid);

/// ||W^A_{phi2,phi1}||_{M^p_{(w)}} / (||phi1||_{M^p_{(theta1)}} ||phi2||_{M^p_{(theta2)}}) with
/// w(x, xi, eta, y) = theta1(x + (1-A) y, xi - A eta) theta2(x - A y, xi + (1-A) eta).
double wigner_norm_ratio(const Signal& phi1, const Signal& phi2, Quantization A, double p, const Weight& theta1,
                         const Weight& theta2, double margin = 0.0);

} // namespace tfnorm
