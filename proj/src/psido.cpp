#include "tfnorm/psido.hpp"

#include "tfnorm/error.hpp"
#include "tfnorm/modspace.hpp"
#include "tfnorm/parallel.hpp"
#include "tfnorm/stft.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace tfnorm {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require_line(const Grid& g, const char* what)
{
    if (g.dim != 1) throw PreconditionError(std::string(what) + ": only one-dimensional signals are supported");
}

long to_long(std::size_t i) { return static_cast<long>(i); }

// Centered alias of a DFT bin.
long centered(std::size_t bin, std::size_t n)
{
    const long b = to_long(bin);
    const long nn = to_long(n);
    return b < nn / 2 ? b : b - nn;
}

CVec half_rows(const SymbolField& a)
{
    if (a.half) return *a.half;
    const std::size_t n = a.field.time.n;
    CVec out(2 * n * n);
    CVec col(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) col[j] = a.field.at(j, k);
        const CVec hc = half_lattice(col);
        for (std::size_t q = 0; q < 2 * n; ++q) out[q * n + k] = hc[q];
    }
    return out;
}

// Half-step index of the physical position 0, so that position p h / 2 sits at index p + O.
long origin_half_index(const Grid& g)
{
    const double o = -2.0 * g.offset[0] / g.h;
    const long O = std::lround(o);
    if (std::abs(o - static_cast<double>(O)) > 1e-9) throw PreconditionError("grid centre must be a multiple of h / 2");
    return O;
}

cplx at_or_zero(const CVec& v, long i)
{
    if (i < 0 || i >= to_long(v.size())) return 0.0;
    return v[static_cast<std::size_t>(i)];
}

Eigen::MatrixXcd to_eigen(const OperatorMatrix& M)
{
    const auto n = static_cast<Eigen::Index>(M.n());
    Eigen::MatrixXcd E(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index m = 0; m < n; ++m) E(j, m) = M(static_cast<std::size_t>(j), static_cast<std::size_t>(m));
    return E;
}

double m_norm(const Signal& f, const Weight& w, const QbfSpec& backend)
{
    return modulation_norm(f, gaussian(f.grid), w, backend);
}

PhaseField sample_phase_field(const Grid& g, const SymbolSource& a)
{
    PhaseField F = PhaseField::zeros(g);
    for (std::size_t j = 0; j < g.n; ++j)
        for (std::size_t k = 0; k < g.n; ++k) F.at(j, k) = a(g.coord(0, j), F.freq.coord(0, k));
    return F;
}

double relative_change(double base, double refined)
{
    if (base > 0.0) return std::abs(refined / base - 1.0);
    return refined > 0.0 ? inf : 0.0;
}

double max_ratio(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) {
        if (std::isnan(x)) throw InvariantViolation("certificate ratio is not a number");
        m = std::max(m, x);
    }
    return m;
}

} // namespace

long Quantization::twice() const
{
    const double t = 2.0 * A;
    const long i = std::lround(t);
    if (!std::isfinite(t) || std::abs(t - static_cast<double>(i)) > 1e-12)
        throw PreconditionError("quantization parameter must be a multiple of 1/2");
    return i;
}

std::string Quantization::label() const
{
    if (A == 0.0) return "kn";
    if (A == 0.5) return "weyl";
    if (A == 1.0) return "anti";
    std::ostringstream os;
    os << "A=" << A;
    return os.str();
}

Quantization make_quantization(double A)
{
    Quantization q{A};
    (void)q.twice();
    return q;
}

SymbolField::SymbolField(PhaseField f, Quantization q, std::optional<CVec> half_rows)
    : field(std::move(f)), quant(q), half(std::move(half_rows))
{
    require_line(field.time, "SymbolField");
    (void)quant.twice();
    for (const auto& z : field.values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InvariantViolation("symbol samples must be finite");
    if (half && half->size() != 2 * field.values.size()) throw GridMismatch("half-step rows do not match the symbol grid");
}

SymbolField sample_symbol(const Grid& time, const SymbolSource& a, Quantization q)
{
    require_line(time, "sample_symbol");
    const std::size_t n = time.n;
    PhaseField F = sample_phase_field(time, a);
    CVec half(2 * n * n);
    for (std::size_t r = 0; r < 2 * n; ++r) {
        const double x = time.offset[0] + 0.5 * static_cast<double>(r) * time.h;
        for (std::size_t k = 0; k < n; ++k) half[r * n + k] = a(x, F.freq.coord(0, k));
    }
    return SymbolField(std::move(F), q, std::move(half));
}

OperatorMatrix OperatorMatrix::zeros(const Grid& g)
{
    return OperatorMatrix{g, CVec(g.n * g.n, 0.0)};
}

Signal apply(const OperatorMatrix& M, const Signal& f)
{
    require_same_grid(M.grid, f.grid, "apply");
    const std::size_t n = M.n();
    CVec out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        cplx acc = 0.0;
        for (std::size_t m = 0; m < n; ++m) acc += M(j, m) * f.values[m];
        out[j] = acc;
    }
    return Signal(f.grid, std::move(out));
}

double frobenius_gap(const OperatorMatrix& A, const OperatorMatrix& B)
{
    require_same_grid(A.grid, B.grid, "frobenius_gap");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < A.m.size(); ++i) {
        num += std::norm(A.m[i] - B.m[i]);
        den += std::norm(B.m[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

OperatorMatrix kernel_from_symbol(const SymbolField& a)
{
    const Grid& g = a.field.time;
    require_line(g, "kernel_from_symbol");
    const long A2 = a.quant.twice();
    const std::size_t n = g.n;
    const long nn = to_long(n);
    const CVec H = half_rows(a);
    const Grid& fr = a.field.freq;

    // E[t + n/2][k] = exp(i t h xi_k) for |t| < n / 2
    std::vector<CVec> E(n, CVec(n));
    for (long t = -nn / 2 + 1; t < nn / 2; ++t)
        for (std::size_t k = 0; k < n; ++k)
            E[static_cast<std::size_t>(t + nn / 2)][k] = std::polar(1.0, static_cast<double>(t) * g.h * fr.coord(0, k));

    const double c = g.h * fr.h / two_pi;
    OperatorMatrix M = OperatorMatrix::zeros(g);
    parallel_for(n, [&](std::size_t j) {
        for (std::size_t m = 0; m < n; ++m) {
            const long t = to_long(j) - to_long(m);
            if (std::abs(t) >= nn / 2) continue;
            const long q = 2 * to_long(j) - A2 * t;
            if (q < 0 || q >= 2 * nn) continue;
            const cplx* row = &H[static_cast<std::size_t>(q) * n];
            const CVec& e = E[static_cast<std::size_t>(t + nn / 2)];
            cplx acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += row[k] * e[k];
            M(j, m) = c * acc;
        }
    });
    return M;
}

Signal apply_op(const SymbolField& a, const Signal& f)
{
    return apply(kernel_from_symbol(a), f);
}

SymbolField quantization_convert(const SymbolField& a, Quantization to)
{
    const double dA = a.quant.A - to.A;
    (void)to.twice();
    const std::size_t n = a.field.time.n;
    CVec H = half_rows(a);
    if (dA != 0.0) {
        const int dims[2] = {static_cast<int>(2 * n), static_cast<int>(n)};
        fft::forward(H, dims);
        const double nd = static_cast<double>(n);
        for (std::size_t p = 0; p < 2 * n; ++p) {
            const double eta = static_cast<double>(centered(p, 2 * n));
            for (std::size_t r = 0; r < n; ++r) {
                const double s = static_cast<double>(centered(r, n));
                // exp(i dA s eta) with eta in units of dxi and s in units of h
                H[p * n + r] *= std::polar(1.0 / (2.0 * nd * nd), dA * two_pi * s * eta / nd);
            }
        }
        fft::backward(H, dims);
    }
    PhaseField F = PhaseField::zeros(a.field.time);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) F.at(j, k) = H[2 * j * n + k];
    return SymbolField(std::move(F), to, std::move(H));
}

namespace {

// W(q, k) for half-step rows q in [0, 2n).
CVec wigner_half(const Signal& f1, const Signal& f2, Quantization A)
{
    require_line(f1.grid, "wigner");
    require_same_grid(f1.grid, f2.grid, "wigner");
    const long A2 = A.twice();
    const Grid& g = f1.grid;
    const std::size_t n = g.n;
    const long nn = to_long(n);
    const CVec h1 = half_lattice(f1);
    const CVec h2 = half_lattice(f2);
    const Grid dual = g.dual();
    std::vector<CVec> E(n, CVec(n));
    for (long l = -nn / 2; l < nn / 2; ++l)
        for (std::size_t k = 0; k < n; ++k)
            E[static_cast<std::size_t>(l + nn / 2)][k] = std::polar(1.0, -static_cast<double>(l) * g.h * dual.coord(0, k));
    const double c = g.h / std::sqrt(two_pi);
    CVec W(2 * n * n, 0.0);
    parallel_for(2 * n, [&](std::size_t qq) {
        const long q = to_long(qq);
        cplx* row = &W[qq * n];
        for (long l = -nn / 2; l < nn / 2; ++l) {
            const cplx z = at_or_zero(h1, q + A2 * l) * std::conj(at_or_zero(h2, q - (2 - A2) * l));
            if (z == cplx(0.0)) continue;
            const CVec& e = E[static_cast<std::size_t>(l + nn / 2)];
            for (std::size_t k = 0; k < n; ++k) row[k] += z * e[k];
        }
        for (std::size_t k = 0; k < n; ++k) row[k] *= c;
    });
    return W;
}

} // namespace

SymbolField wigner_symbol(const Signal& f1, const Signal& f2, Quantization A)
{
    CVec W = wigner_half(f1, f2, A);
    const std::size_t n = f1.grid.n;
    PhaseField F = PhaseField::zeros(f1.grid);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) F.at(j, k) = W[2 * j * n + k];
    return SymbolField(std::move(F), A, std::move(W));
}

PhaseField wigner(const Signal& f1, const Signal& f2, Quantization A)
{
    return wigner_symbol(f1, f2, A).field;
}

OperatorMatrix rank_one_matrix(const Signal& f1, const Signal& f2)
{
    require_same_grid(f1.grid, f2.grid, "rank_one_matrix");
    OperatorMatrix M = OperatorMatrix::zeros(f1.grid);
    const double c = f1.grid.weight() / std::sqrt(two_pi);
    for (std::size_t j = 0; j < M.n(); ++j)
        for (std::size_t m = 0; m < M.n(); ++m) M(j, m) = c * f1.values[j] * std::conj(f2.values[m]);
    return M;
}

double rank_one_defect(const Signal& f1, const Signal& f2, Quantization A)
{
    return frobenius_gap(kernel_from_symbol(wigner_symbol(f1, f2, A)), rank_one_matrix(f1, f2));
}

Signal toeplitz_direct(const PhaseField& a, const Signal& phi1, const Signal& phi2, const Signal& f)
{
    require_same_grid(a.time, f.grid, "toeplitz_direct");
    PhaseField V = stft(f, phi1);
    for (std::size_t i = 0; i < V.values.size(); ++i) V.values[i] *= a.values[i];
    return stft_adjoint(V, phi2);
}

OperatorMatrix toeplitz_matrix(const PhaseField& a, const Signal& phi1, const Signal& phi2)
{
    const Grid& g = a.time;
    require_line(g, "toeplitz_matrix");
    const std::size_t n = g.n;
    std::vector<Signal> cols(n);
    parallel_for(n, [&](std::size_t m) {
        Signal e = Signal::zeros(g);
        e.values[m] = 1.0;
        cols[m] = toeplitz_direct(a, phi1, phi2, e);
    });
    OperatorMatrix M = OperatorMatrix::zeros(g);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t m = 0; m < n; ++m) M(j, m) = cols[m].values[j];
    return M;
}

SymbolField toeplitz_weyl_symbol(const PhaseField& a, const Signal& phi1, const Signal& phi2)
{
    const Grid& g = a.time;
    require_line(g, "toeplitz_weyl_symbol");
    require_same_grid(g, phi1.grid, "toeplitz_weyl_symbol");
    require_same_grid(g, phi2.grid, "toeplitz_weyl_symbol");
    const std::size_t n = g.n;
    const long nn = to_long(n);
    const long O = origin_half_index(g);
    const CVec h1 = half_lattice(phi1);
    const CVec h2 = half_lattice(phi2);
    const Grid dual = g.dual();

    // u at half-step positions p h / 2, p in [-2n + 1, 2n), and centred frequencies (k - n/2) dxi
    const std::size_t P = 4 * n - 1;
    CVec u(P * n, 0.0);
    const double cu = g.h / two_pi;
    parallel_for(P, [&](std::size_t pi) {
        const long p = to_long(pi) - 2 * nn + 1;
        cplx* row = &u[pi * n];
        for (long l = -nn / 2; l < nn / 2; ++l) {
            const cplx z = at_or_zero(h2, p + l + O) * std::conj(at_or_zero(h1, p - l + O));
            if (z == cplx(0.0)) continue;
            for (std::size_t k = 0; k < n; ++k)
                row[k] += z * std::polar(1.0, -static_cast<double>(l) * g.h * dual.coord(0, k));
        }
        for (std::size_t k = 0; k < n; ++k) row[k] *= cu;
    });

    CVec B(2 * n * n, 0.0);
    const double cell = g.h * dual.h;
    parallel_for(2 * n, [&](std::size_t qq) {
        const long q = to_long(qq);
        cplx* row = &B[qq * n];
        for (std::size_t m = 0; m < n; ++m) {
            const long p = q - 2 * to_long(m);
            const cplx* urow = &u[static_cast<std::size_t>(p + 2 * nn - 1) * n];
            for (std::size_t l = 0; l < n; ++l) {
                const cplx am = a.at(m, l);
                if (am == cplx(0.0)) continue;
                for (std::size_t k = 0; k < n; ++k) {
                    const long idx = ((to_long(k) - to_long(l) + nn / 2) % nn + nn) % nn;
                    row[k] += am * urow[idx];
                }
            }
        }
        for (std::size_t k = 0; k < n; ++k) row[k] *= cell;
    });
    PhaseField F = PhaseField::zeros(g);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) F.at(j, k) = B[2 * j * n + k];
    return SymbolField(std::move(F), Quantization::weyl(), std::move(B));
}

double kernel_stft_relation_defect(const SymbolField& a, const Signal& phia, const Signal& phib, std::size_t probes,
                                   std::uint64_t seed)
{
    const Grid& g = a.field.time;
    require_line(g, "kernel_stft_relation_defect");
    require_same_grid(g, phia.grid, "kernel_stft_relation_defect");
    require_same_grid(g, phib.grid, "kernel_stft_relation_defect");
    if (probes == 0) throw PreconditionError("kernel_stft_relation_defect: need at least one probe");
    const double A = a.quant.A;
    const std::size_t n = g.n;
    const long nn = to_long(n);
    const double h = g.h;
    const Grid& fr = a.field.freq;
    const long s = difference_shift(g);
    const long O = origin_half_index(g);
    const CVec ha = half_lattice(phia);
    const CVec hb = half_lattice(phib);
    const OperatorMatrix M = kernel_from_symbol(a);

    Rng rng(seed);
    const auto pick = [&] { return static_cast<std::size_t>(nn / 4 + static_cast<long>(rng.uniform() * static_cast<double>(nn / 2))); };
    struct Probe {
        std::size_t i, ip, k, kp;
    };
    std::vector<Probe> pts(probes);
    for (auto& p : pts) p = {pick(), pick(), pick(), pick()};

    std::vector<cplx> lhs(probes), rhs(probes);
    parallel_for(probes, [&](std::size_t pi) {
        const Probe& pr = pts[pi];
        const double x = g.coord(0, pr.i), y = g.coord(0, pr.ip);
        const double xi = fr.coord(0, pr.k), eta = fr.coord(0, pr.kp);

        // V_Phi K with K = M / h
        cplx acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const cplx wa = std::conj(at_or_zero(phia.values, to_long(j) - to_long(pr.i) + s));
            if (wa == cplx(0.0)) continue;
            const double xj = g.coord(0, j);
            for (std::size_t m = 0; m < n; ++m) {
                const cplx K = M(j, m);
                if (K == cplx(0.0)) continue;
                const cplx wb = std::conj(at_or_zero(phib.values, to_long(m) - to_long(pr.ip) + s));
                acc += K * wa * wb * std::polar(1.0, -(xj * xi + g.coord(0, m) * eta));
            }
        }
        lhs[pi] = acc * h / two_pi;

        // V_Psi a at T_A(x, xi, eta, y)
        const long di = to_long(pr.ip) - to_long(pr.i);
        const long A2 = std::lround(2.0 * A);
        const long zhalf = 2 * to_long(pr.i) + A2 * di; // half index of z = x + A (y - x)
        const double zeta = A * (xi + eta) - eta;
        const double alpha = xi + eta;
        const double beta = y - x;
        // Psi(x_j - z, xi_k - zeta) = (2 pi)^{-1/2} h sum_l phia(w + A l h) phib(w - (1 - A) l h) e^{-i l h (xi_k - zeta)}
        cplx total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const long w2 = 2 * to_long(j) - zhalf; // half index of w = x_j - z
            std::vector<std::pair<long, cplx>> terms;
            for (long l = -nn; l <= nn; ++l) {
                const cplx v = at_or_zero(ha, w2 + A2 * l + O) * at_or_zero(hb, w2 - (2 - A2) * l + O);
                if (v != cplx(0.0)) terms.emplace_back(l, v);
            }
            if (terms.empty()) continue;
            const double xj = g.coord(0, j);
            for (std::size_t k = 0; k < n; ++k) {
                const cplx av = a.field.at(j, k);
                if (av == cplx(0.0)) continue;
                const double xk = fr.coord(0, k);
                cplx psi = 0.0;
                for (const auto& [l, v] : terms) psi += v * std::polar(1.0, -static_cast<double>(l) * h * (xk - zeta));
                psi *= h / std::sqrt(two_pi);
                total += av * std::conj(psi) * std::polar(1.0, -(xj * alpha + xk * beta));
            }
        }
        const cplx vpsi = total * h * fr.h / two_pi;
        rhs[pi] = vpsi * std::polar(1.0 / std::sqrt(two_pi), beta * zeta);
    });
    double num = 0.0, den = 0.0, alt = 0.0;
    for (std::size_t i = 0; i < probes; ++i) {
        num = std::max(num, std::abs(lhs[i] - rhs[i]));
        den = std::max(den, std::abs(lhs[i]));
        alt = std::max(alt, std::abs(rhs[i]));
    }
    if (den > 0.0) return num / den;
    return alt > 0.0 ? num / alt : 0.0;
}

double symbol_norm(const PhaseField& a, const Weight& w, double p, double q, double margin)
{
    const Grid& g = a.time;
    require_line(g, "symbol_norm");
    if (w.dim() != 4) throw PreconditionError("symbol weight must live on R^{4d}");
    if (!(p > 0.0) || !(q > 0.0)) throw PreconditionError("symbol_norm: exponents must be positive");
    const std::size_t n = g.n;
    const Grid& fr = a.freq;
    const double h = g.h, dxi = fr.h;

    const auto interior = [n, margin](const Grid& axis) {
        std::vector<std::size_t> idx;
        const double lo = axis.coord(0, 0), hi = axis.coord(0, n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double c = axis.coord(0, i);
            if (c - lo >= margin - 1e-12 && hi - c >= margin - 1e-12) idx.push_back(i);
        }
        if (idx.empty()) idx.push_back(n / 2);
        return idx;
    };
    const auto ix = interior(g);
    const auto ik = interior(fr);

    const double c = h * dxi / two_pi;
    const double gauss_norm = 1.0 / std::sqrt(std::numbers::pi);
    const int dims[2] = {static_cast<int>(n), static_cast<int>(n)};
    const bool sup_pos = std::isinf(p);

    // acc[row][f]: per position row, sup or sum of |V w|^p over the dual grid bin f
    std::vector<std::vector<double>> acc(ix.size(), std::vector<double>(n * n, 0.0));
    parallel_for(ix.size(), [&](std::size_t r) {
        const std::size_t jz = ix[r];
        const double z = g.coord(0, jz);
        CVec buf(n * n);
        std::vector<double> wx(n), wk(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double d = g.coord(0, j) - z;
            wx[j] = std::exp(-0.5 * d * d);
        }
        std::vector<double>& out = acc[r];
        double pt[4];
        for (std::size_t kz : ik) {
            const double zeta = fr.coord(0, kz);
            for (std::size_t k = 0; k < n; ++k) {
                const double d = fr.coord(0, k) - zeta;
                wk[k] = std::exp(-0.5 * d * d);
            }
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) buf[j * n + k] = a.at(j, k) * (gauss_norm * wx[j] * wk[k]);
            fft::forward(buf, dims);
            pt[0] = z;
            pt[1] = zeta;
            for (std::size_t pb = 0; pb < n; ++pb) {
                pt[2] = static_cast<double>(centered(pb, n)) * dxi;
                for (std::size_t rb = 0; rb < n; ++rb) {
                    pt[3] = static_cast<double>(centered(rb, n)) * h;
                    const double m = c * std::abs(buf[pb * n + rb]) * w(std::span<const double>(pt, 4));
                    double& slot = out[pb * n + rb];
                    if (sup_pos)
                        slot = std::max(slot, m);
                    else
                        slot += std::pow(m, p);
                }
            }
        }
    });

    std::vector<double> inner(n * n, 0.0);
    for (const auto& row : acc)
        for (std::size_t f = 0; f < inner.size(); ++f) inner[f] = sup_pos ? std::max(inner[f], row[f]) : inner[f] + row[f];
    if (!sup_pos)
        for (double& v : inner) v = std::pow(v * h * dxi, 1.0 / p);

    if (std::isinf(q)) return *std::max_element(inner.begin(), inner.end());
    double s = 0.0;
    for (double v : inner) s += std::pow(v, q);
    return std::pow(s * dxi * h, 1.0 / q);
}

Certificate psido_bound_certificate(const SymbolSource& a, const std::vector<Source>& ensemble, const Grid& grid,
                                    const PsidoSetup& s)
{
    require_line(grid, "psido_bound_certificate");
    if (ensemble.empty()) throw PreconditionError("psido_bound_certificate: empty ensemble");
    if (s.w0.dim() != 4 || s.w1.dim() != 2 || s.w2.dim() != 2)
        throw PreconditionError("psido_bound_certificate: weight dimensions must be 4, 2 and 2");
    (void)s.quant.twice();
    Certificate c;
    c.name = "pseudo-differential bound (" + s.quant.label() + ")";
    const Weight v0 = s.backend.v0();
    const double A = s.quant.A;
    Box box = s.box;
    box.dim = 4;
    const auto ratio = [&](std::span<const double> P) {
        const double x = P[0], y = P[1], xi = P[2], eta = P[3];
        return s.w2({x, xi}) * v0({x - y, xi - eta}) /
               (s.w1({y, eta}) * s.w0({x + A * (y - x), eta + A * (xi - eta), xi - eta, y - x}));
    };
    c.weight_constant = hypothesis_constant(ratio, box);
    c.hypotheses_ok = std::isfinite(c.weight_constant);
    const double r0 = s.backend.r0();

    struct Run {
        double op_ratio, symbol_norm;
    };
    const auto run = [&](const Grid& g) {
        const SymbolField sf = sample_symbol(g, a, s.quant);
        const OperatorMatrix M = kernel_from_symbol(sf);
        std::vector<double> ratios(ensemble.size());
        for (std::size_t i = 0; i < ensemble.size(); ++i) {
            const Signal f = ensemble[i].on(g);
            const double den = m_norm(f, s.w1, s.backend);
            ratios[i] = den > 0.0 ? m_norm(apply(M, f), s.w2, s.backend) / den : 0.0;
        }
        return Run{max_ratio(ratios), symbol_norm(sf.field, s.w0, inf, r0, s.margin)};
    };
    const Run base = run(grid);
    const Run fine = run(grid.refined());
    const auto normalized = [](const Run& r) { return r.symbol_norm > 0.0 ? r.op_ratio / r.symbol_norm : 0.0; };
    c.constant = normalized(base);
    c.refined = normalized(fine);
    c.relative_change = relative_change(c.constant, c.refined);
    c.add("r0", r0);
    c.add("op_ratio", base.op_ratio);
    c.add("symbol_norm", base.symbol_norm);
    c.add("refined_op_ratio", fine.op_ratio);
    c.add("refined_symbol_norm", fine.symbol_norm);
    return c;
}

Certificate toeplitz_bound_certificate(const SymbolSource& a, const std::vector<Source>& ensemble, const Grid& grid,
                                       const ToeplitzSetup& s)
{
    require_line(grid, "toeplitz_bound_certificate");
    if (ensemble.empty()) throw PreconditionError("toeplitz_bound_certificate: empty ensemble");
    if (s.w.dim() != 4 || s.w1.dim() != 2 || s.w2.dim() != 2 || s.theta1.dim() != 2 || s.theta2.dim() != 2)
        throw PreconditionError("toeplitz_bound_certificate: weight dimensions must be 4, 2, 2, 2 and 2");
    const double r0 = s.backend.r0();
    if (!(s.q > 0.0) || !(s.r > 0.0)) throw PreconditionError("toeplitz exponents must be positive");
    const double iq = 1.0 / s.q, ir = 1.0 / s.r, ir0 = 1.0 / r0;
    constexpr double tol = 1e-12;
    const bool first = ir >= 1.0 - tol && ir <= ir0 + tol && std::abs(ir0 - (iq + ir)) <= tol;
    const bool second = ir >= 0.5 - tol && std::abs(ir - ir0) <= tol && std::abs(ir0 - (1.0 - 0.5 * iq)) <= tol;
    if (!first && !second) throw PreconditionError("toeplitz exponents violate the admissible relation between q, r and r0");

    Certificate c;
    c.name = "toeplitz bound";
    const Weight v0 = s.backend.v0();
    Box box = s.box;
    box.dim = 6;
    const auto ratio = [&](std::span<const double> P) {
        const double x = P[0], y = P[1], z = P[2], xi = P[3], eta = P[4], zeta = P[5];
        return s.w2({x - z, xi - zeta}) * v0({y - z, eta - zeta}) /
               (s.w1({x - y, xi - eta}) * s.w({x, xi, eta - zeta, z - y}) * s.theta1({y, eta}) * s.theta2({z, zeta}));
    };
    c.weight_constant = hypothesis_constant(ratio, box);
    c.hypotheses_ok = std::isfinite(c.weight_constant);

    struct Run {
        double op_ratio, symbol_norm, phi1_norm, phi2_norm;
    };
    const auto run = [&](const Grid& g) {
        const PhaseField F = sample_phase_field(g, a);
        const Signal p1 = s.phi1.on(g), p2 = s.phi2.on(g);
        const OperatorMatrix T = toeplitz_matrix(F, p1, p2);
        std::vector<double> ratios(ensemble.size());
        for (std::size_t i = 0; i < ensemble.size(); ++i) {
            const Signal f = ensemble[i].on(g);
            const double den = m_norm(f, s.w1, s.backend);
            ratios[i] = den > 0.0 ? m_norm(apply(T, f), s.w2, s.backend) / den : 0.0;
        }
        const Signal phi0 = gaussian(g);
        return Run{max_ratio(ratios), symbol_norm(F, s.w, inf, s.q, s.margin),
                   mixed_norm(stft(p1, phi0), QbfSpec(s.r, s.r, s.theta1)),
                   mixed_norm(stft(p2, phi0), QbfSpec(s.r, s.r, s.theta2))};
    };
    const auto normalized = [](const Run& r) {
        const double den = r.symbol_norm * r.phi1_norm * r.phi2_norm;
        return den > 0.0 ? r.op_ratio / den : 0.0;
    };
    const Run base = run(grid);
    const Run fine = run(grid.refined());
    c.constant = normalized(base);
    c.refined = normalized(fine);
    c.relative_change = relative_change(c.constant, c.refined);
    c.add("r0", r0);
    c.add("op_ratio", base.op_ratio);
    c.add("symbol_norm", base.symbol_norm);
    c.add("phi1_norm", base.phi1_norm);
    c.add("phi2_norm", base.phi2_norm);
    c.add("refined_op_ratio", fine.op_ratio);
    return c;
}

double LiftingReport::forward_change() const { return relative_change(forward, refined_forward); }
double LiftingReport::inverse_change() const { return relative_change(inverse, refined_inverse); }
double LiftingReport::product_change() const { return relative_change(forward * inverse, refined_forward * refined_inverse); }

LiftingReport lifting_check(const Weight& w0, const Source& phi, const Weight& w, const QbfSpec& backend,
                            const std::vector<Source>& ensemble, const Grid& grid)
{
    require_line(grid, "lifting_check");
    if (ensemble.empty()) throw PreconditionError("lifting_check: empty ensemble");
    if (w0.dim() != 2 || w.dim() != 2) throw PreconditionError("lifting_check: weights must live on R^{2d}");
    const Weight theta = weight_power(w0, 0.5);
    const Weight src = weight_product(theta, w);
    const Weight dst = weight_product(w, weight_reciprocal(theta));

    LiftingReport rep;
    struct Run {
        double cond, fwd, inv;
        bool singular;
    };
    const auto run = [&](const Grid& g) {
        PhaseField a = PhaseField::zeros(g);
        const std::vector<double> s0 = w0.sample_phase(g);
        for (std::size_t i = 0; i < s0.size(); ++i) a.values[i] = s0[i];
        const Signal p = phi.on(g);
        const OperatorMatrix T = toeplitz_matrix(a, p, p);
        const Eigen::MatrixXcd E = to_eigen(T);
        const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(E);
        const auto& sv = svd.singularValues();
        const double smin = sv(sv.size() - 1);
        Run r{smin > 0.0 ? sv(0) / smin : inf, 0.0, 0.0, false};
        r.singular = !(r.cond < 1e12);
        const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(E);
        std::vector<double> fw(ensemble.size()), iv(ensemble.size());
        for (std::size_t i = 0; i < ensemble.size(); ++i) {
            const Signal f = ensemble[i].on(g);
            const double nf_src = m_norm(f, src, backend);
            fw[i] = nf_src > 0.0 ? m_norm(apply(T, f), dst, backend) / nf_src : 0.0;
            if (r.singular) {
                iv[i] = inf;
                continue;
            }
            Eigen::VectorXcd b(static_cast<Eigen::Index>(g.n));
            for (std::size_t j = 0; j < g.n; ++j) b(static_cast<Eigen::Index>(j)) = f.values[j];
            const Eigen::VectorXcd u = lu.solve(b);
            Signal us = Signal::zeros(g);
            for (std::size_t j = 0; j < g.n; ++j) us.values[j] = u(static_cast<Eigen::Index>(j));
            const double nf_dst = m_norm(f, dst, backend);
            iv[i] = nf_dst > 0.0 ? m_norm(us, src, backend) / nf_dst : 0.0;
        }
        r.fwd = max_ratio(fw);
        r.inv = max_ratio(iv);
        return r;
    };
    const Run base = run(grid);
    const Run fine = run(grid.refined());
    rep.matrix_cond = base.cond;
    rep.forward = base.fwd;
    rep.inverse = base.inv;
    rep.refined_matrix_cond = fine.cond;
    rep.refined_forward = fine.fwd;
    rep.refined_inverse = fine.inv;
    rep.singular = base.singular || fine.singular;
    const Box box{2, 17, 4.0};
    const auto moderator = [](const Weight& x) { return x.moderator() ? *x.moderator() : unit_weight(x.dim()); };
    rep.moderate_w0 = moderate_constant(w0, moderator(w0), box);
    rep.moderate_w = moderate_constant(w, moderator(w), box);
    return rep;
}

double wigner_norm_ratio(const Signal& phi1, const Signal& phi2, Quantization A, double p, const Weight& theta1,
                         const Weight& theta2, double margin)
{
    require_line(phi1.grid, "wigner_norm_ratio");
    if (theta1.dim() != 2 || theta2.dim() != 2) throw PreconditionError("wigner_norm_ratio: weights must live on R^{2d}");
    const double a = A.A;
    const Weight omega = custom_weight(
        4,
        [theta1, theta2, a](std::span<const double> P) {
            const double x = P[0], xi = P[1], eta = P[2], y = P[3];
            return theta1({x + (1.0 - a) * y, xi - a * eta}) * theta2({x - a * y, xi + (1.0 - a) * eta});
        },
        "wigner-weight");
    const PhaseField W = wigner(phi2, phi1, A);
    const Signal phi0 = gaussian(phi1.grid);
    const double n1 = mixed_norm(stft(phi1, phi0), QbfSpec(p, p, theta1));
    const double n2 = mixed_norm(stft(phi2, phi0), QbfSpec(p, p, theta2));
    const double den = n1 * n2;
    if (den == 0.0) throw PreconditionError("wigner_norm_ratio: windows must be nonzero");
    return symbol_norm(W, omega, p, p, margin) / den;
}

} // namespace tfnorm
