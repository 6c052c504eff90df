#include "tfnorm/tfconv.hpp"

#include "lattice.hpp"
#include "tfnorm/error.hpp"
#include "tfnorm/modspace.hpp"
#include "tfnorm/parallel.hpp"
#include "tfnorm/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tfnorm {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Linear (or cyclic) convolution out[t] = sum_m a[t - m + s] b[m] of row-major arrays
// with `rank` axes of extent n, through zero-padded FFTs.
class BlockConv {
public:
    BlockConv(int rank, std::size_t n, std::vector<long> shift, bool periodic)
        : rank_(rank), n_(n), shift_(std::move(shift)), periodic_(periodic), len_(periodic ? n : 2 * n)
    {
        dims_.assign(static_cast<std::size_t>(rank_), static_cast<int>(len_));
        total_ = 1;
        for (int a = 0; a < rank_; ++a) total_ *= len_;
        if (!periodic_)
            for (long s : shift_)
                if (s < 0 || s > static_cast<long>(n_)) throw PreconditionError("convolution shift outside the padded range");
    }

    static bool fits(const std::vector<long>& shift, std::size_t n)
    {
        return std::all_of(shift.begin(), shift.end(), [n](long s) { return s >= 0 && s <= static_cast<long>(n); });
    }

    std::size_t size() const { return total_; }

    CVec transform_a(std::span<const cplx> a) const { return place(a, true); }
    CVec transform_b(std::span<const cplx> b) const { return place(b, false); }

    // Inverse transform of a product; writes scale * c[t] for all t in [0, n)^rank.
    void finish(CVec& prod, std::span<cplx> out, cplx scale) const
    {
        fft::backward(prod, dims_);
        const double norm = 1.0 / static_cast<double>(total_);
        std::vector<std::size_t> idx(static_cast<std::size_t>(rank_));
        for (std::size_t t = 0; t < out.size(); ++t) {
            detail::unflatten(t, rank_, n_, idx.data());
            std::size_t u = 0;
            for (int a = 0; a < rank_; ++a) {
                const std::size_t v = periodic_ ? idx[static_cast<std::size_t>(a)]
                                                : idx[static_cast<std::size_t>(a)] + static_cast<std::size_t>(shift_[static_cast<std::size_t>(a)]);
                u = u * len_ + v;
            }
            out[t] = scale * norm * prod[u];
        }
    }

private:
    CVec place(std::span<const cplx> x, bool is_a) const
    {
        CVec buf(total_);
        std::vector<std::size_t> idx(static_cast<std::size_t>(rank_));
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == cplx(0.0)) continue;
            detail::unflatten(i, rank_, n_, idx.data());
            std::size_t u = 0;
            for (int a = 0; a < rank_; ++a) {
                long v = static_cast<long>(idx[static_cast<std::size_t>(a)]);
                if (is_a && periodic_) {
                    const long nn = static_cast<long>(n_);
                    v = ((v - shift_[static_cast<std::size_t>(a)]) % nn + nn) % nn;
                }
                u = u * len_ + static_cast<std::size_t>(v);
            }
            buf[u] = x[i];
        }
        fft::forward(buf, dims_);
        return buf;
    }

    int rank_;
    std::size_t n_;
    std::vector<long> shift_;
    bool periodic_;
    std::size_t len_;
    std::vector<int> dims_;
    std::size_t total_ = 1;
};

void require_same_field(const PhaseField& F, const PhaseField& G, const char* what)
{
    require_same_grid(F.time, G.time, what);
    if (F.values.size() != G.values.size()) throw GridMismatch(std::string(what) + ": field sizes differ");
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

CVec row(const PhaseField& F, std::size_t j)
{
    const std::size_t N = F.points();
    return CVec(F.values.begin() + static_cast<std::ptrdiff_t>(j * N), F.values.begin() + static_cast<std::ptrdiff_t>((j + 1) * N));
}

double max_abs(const CVec& v)
{
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

double relative_gap(const PhaseField& lhs, const PhaseField& rhs)
{
    double num = 0.0;
    for (std::size_t i = 0; i < lhs.values.size(); ++i) num = std::max(num, std::abs(lhs.values[i] - rhs.values[i]));
    const double den = max_abs(lhs.values);
    return den > 0.0 ? num / den : num;
}

} // namespace

PhaseKernel PhaseKernel::zero()
{
    return PhaseKernel{[](std::span<const double>, std::span<const double>, std::span<const double>) { return 0.0; }, true,
                       "0"};
}

PhaseKernel PhaseKernel::custom(Fn fn, std::string label)
{
    if (!fn) throw PreconditionError("phase kernel needs a function");
    return PhaseKernel{std::move(fn), false, std::move(label)};
}

PhaseField theta_conv(const PhaseField& F, const PhaseField& G, const PhaseKernel& ker, ConvAxis axis)
{
    require_same_field(F, G, "theta_conv");
    const Grid& tg = F.time;
    const Grid& fg = F.freq;
    const int d = tg.dim;
    const std::size_t n = tg.n;
    const std::size_t N = F.points();
    const bool on_time = axis == ConvAxis::time;
    const Grid& cg = on_time ? tg : fg; // convolved block
    const Grid& sg = on_time ? fg : tg; // spectator block
    const long s = difference_shift(cg);
    const double w = cg.weight();
    // element (c, p) of the field with c in the convolved block and p in the spectator block
    const auto flat = [&](std::size_t c, std::size_t p) { return on_time ? c * N + p : p * N + c; };
    PhaseField out = PhaseField::zeros(tg);

    if (ker.is_zero && BlockConv::fits(std::vector<long>(static_cast<std::size_t>(d), s), n)) {
        const BlockConv bc(d, n, std::vector<long>(static_cast<std::size_t>(d), s), false);
        parallel_for(N, [&](std::size_t p) {
            CVec a(N), b(N);
            for (std::size_t c = 0; c < N; ++c) {
                a[c] = F.values[flat(c, p)];
                b[c] = G.values[flat(c, p)];
            }
            CVec prod = bc.transform_a(a);
            const CVec fb = bc.transform_b(b);
            for (std::size_t i = 0; i < prod.size(); ++i) prod[i] *= fb[i];
            CVec res(N);
            bc.finish(prod, res, w);
            for (std::size_t c = 0; c < N; ++c) out.values[flat(c, p)] = res[c];
        });
        return out;
    }

    parallel_for(N, [&](std::size_t p) {
        const auto y = sg.point(p);
        std::size_t tt[2] = {0, 0}, mm[2] = {0, 0};
        for (std::size_t t = 0; t < N; ++t) {
            detail::unflatten(t, d, n, tt);
            const auto x = cg.point(t);
            cplx acc = 0.0;
            for (std::size_t m = 0; m < N; ++m) {
                detail::unflatten(m, d, n, mm);
                std::size_t idx = 0;
                if (!detail::difference_index(tt, mm, s, d, n, idx)) continue;
                const cplx term = F.values[flat(idx, p)] * G.values[flat(m, p)];
                if (term == cplx(0.0)) continue;
                const double th = ker.is_zero ? 0.0 : ker.theta(x, y, cg.point(m));
                if (!std::isfinite(th)) throw InvariantViolation("theta_conv: phase is not finite");
                acc += term * std::polar(1.0, th);
            }
            out.values[flat(t, p)] = w * acc;
        }
    });
    return out;
}

PhaseField twisted_conv(const PhaseField& F, const PhaseField& G, TwistedForm form, FreqBoundary boundary)
{
    require_same_field(F, G, "twisted_conv");
    const Grid& tg = F.time;
    const Grid& fg = F.freq;
    const int d = tg.dim;
    const std::size_t n = tg.n;
    const std::size_t N = F.points();
    const long sx = difference_shift(tg);
    const long sk = difference_shift(fg);
    const bool periodic = boundary == FreqBoundary::periodic;
    const BlockConv bc(d, n, std::vector<long>(static_cast<std::size_t>(d), sk), periodic);
    const double scale = std::pow(two_pi, -0.5 * d) * tg.weight() * fg.weight();

    std::vector<std::vector<double>> xs(N), ks(N);
    for (std::size_t i = 0; i < N; ++i) {
        xs[i] = tg.point(i);
        ks[i] = fg.point(i);
    }
    PhaseField out = PhaseField::zeros(tg);

    if (form == TwistedForm::kappa1) {
        // rows of F in transformed form; G rows carry exp(i <y, eta>)
        std::vector<CVec> fa(N), gb(N);
        parallel_for(N, [&](std::size_t m) {
            fa[m] = bc.transform_a(row(F, m));
            CVec g = row(G, m);
            for (std::size_t l = 0; l < N; ++l) g[l] *= std::polar(1.0, dot(xs[m], ks[l]));
            gb[m] = bc.transform_b(g);
        });
        parallel_for(N, [&](std::size_t j) {
            std::size_t jj[2] = {0, 0}, mm[2] = {0, 0};
            detail::unflatten(j, d, n, jj);
            CVec acc(N), res(N), prod(bc.size());
            for (std::size_t m = 0; m < N; ++m) {
                detail::unflatten(m, d, n, mm);
                std::size_t i = 0;
                if (!detail::difference_index(jj, mm, sx, d, n, i)) continue;
                for (std::size_t u = 0; u < prod.size(); ++u) prod[u] = fa[i][u] * gb[m][u];
                bc.finish(prod, res, 1.0);
                for (std::size_t k = 0; k < N; ++k) acc[k] += std::polar(1.0, -dot(xs[m], ks[k])) * res[k];
            }
            for (std::size_t k = 0; k < N; ++k) out.at(j, k) = scale * acc[k];
        });
        return out;
    }

    std::vector<CVec> ga(N);
    parallel_for(N, [&](std::size_t i) { ga[i] = bc.transform_a(row(G, i)); });
    parallel_for(N, [&](std::size_t j) {
        std::size_t jj[2] = {0, 0}, mm[2] = {0, 0};
        detail::unflatten(j, d, n, jj);
        CVec acc(N), res(N), h(N);
        for (std::size_t m = 0; m < N; ++m) {
            detail::unflatten(m, d, n, mm);
            std::size_t i = 0;
            if (!detail::difference_index(jj, mm, sx, d, n, i)) continue;
            for (std::size_t l = 0; l < N; ++l) {
                double ph = 0.0;
                for (int a = 0; a < d; ++a)
                    ph += (xs[m][static_cast<std::size_t>(a)] - xs[j][static_cast<std::size_t>(a)]) * ks[l][static_cast<std::size_t>(a)];
                h[l] = F.at(m, l) * std::polar(1.0, ph);
            }
            CVec prod = bc.transform_b(h);
            for (std::size_t u = 0; u < prod.size(); ++u) prod[u] *= ga[i][u];
            bc.finish(prod, res, 1.0);
            for (std::size_t k = 0; k < N; ++k) acc[k] += res[k];
        }
        for (std::size_t k = 0; k < N; ++k) out.at(j, k) = scale * acc[k];
    });
    return out;
}

PhaseField phase_convolution(const PhaseField& F, const PhaseField& G)
{
    require_same_field(F, G, "phase_convolution");
    const int d = F.time.dim;
    std::vector<long> shift(static_cast<std::size_t>(2 * d));
    for (int a = 0; a < d; ++a) {
        shift[static_cast<std::size_t>(a)] = difference_shift(F.time);
        shift[static_cast<std::size_t>(a + d)] = difference_shift(F.freq);
    }
    if (!BlockConv::fits(shift, F.time.n)) throw PreconditionError("phase_convolution: grid centre too far from the origin");
    const BlockConv bc(2 * d, F.time.n, shift, false);
    CVec prod = bc.transform_a(F.values);
    const CVec fb = bc.transform_b(G.values);
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] *= fb[i];
    PhaseField out = PhaseField::zeros(F.time);
    bc.finish(prod, out.values, F.cell());
    return out;
}

PhaseField phase_convolution_direct(const PhaseField& F, const PhaseField& G)
{
    require_same_field(F, G, "phase_convolution_direct");
    if (F.time.dim != 1) throw PreconditionError("phase_convolution_direct: one-dimensional signals only");
    const long n = static_cast<long>(F.time.n);
    const long sx = difference_shift(F.time);
    const long sk = difference_shift(F.freq);
    PhaseField out = PhaseField::zeros(F.time);
    const double cell = F.cell();
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t js) {
        const long j = static_cast<long>(js);
        for (long k = 0; k < n; ++k) {
            cplx acc = 0.0;
            for (long m = 0; m < n; ++m) {
                const long i = j - m + sx;
                if (i < 0 || i >= n) continue;
                for (long l = 0; l < n; ++l) {
                    const long q = k - l + sk;
                    if (q < 0 || q >= n) continue;
                    acc += F.at(static_cast<std::size_t>(i), static_cast<std::size_t>(q)) *
                           G.at(static_cast<std::size_t>(m), static_cast<std::size_t>(l));
                }
            }
            out.at(js, static_cast<std::size_t>(k)) = cell * acc;
        }
    });
    return out;
}

Signal convolve(const Signal& f, const Signal& g)
{
    require_same_grid(f.grid, g.grid, "convolve");
    const Grid& gr = f.grid;
    const int d = gr.dim;
    const std::size_t n = gr.n;
    const auto c = gr.center();
    const Grid padded = make_grid(d, 2 * n, gr.h, c);
    std::vector<double> c2(c);
    for (auto& v : c2) v *= 2.0;
    const Grid target = make_grid(d, 2 * n, gr.h, c2);
    const auto embed = [&](const Signal& s) {
        CVec out(padded.size());
        std::size_t idx[2] = {0, 0};
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            detail::unflatten(i, d, n, idx);
            std::size_t u = 0;
            for (int a = 0; a < d; ++a) u = u * 2 * n + idx[a] + n / 2;
            out[u] = s.values[i];
        }
        return Signal(padded, std::move(out));
    };
    Signal F = dft(embed(f));
    const Signal Gh = dft(embed(g));
    const double k = std::pow(two_pi, 0.5 * d);
    for (std::size_t i = 0; i < F.values.size(); ++i) F.values[i] *= k * Gh.values[i];
    const Signal full = inverse_dft(F, target);
    // sample x_t of the input grid sits at index t + n/2 - c/h of the target grid
    const long sh = difference_shift(gr);
    CVec out(gr.size());
    std::size_t idx[2] = {0, 0};
    for (std::size_t t = 0; t < out.size(); ++t) {
        detail::unflatten(t, d, n, idx);
        std::size_t u = 0;
        bool inside = true;
        for (int a = 0; a < d; ++a) {
            const long v = static_cast<long>(idx[a]) + sh;
            if (v < 0 || v >= static_cast<long>(2 * n)) inside = false;
            u = u * 2 * n + static_cast<std::size_t>(std::max(0L, v));
        }
        if (inside) out[t] = full.values[u];
    }
    return Signal(gr, std::move(out));
}

Signal multiply(const Signal& f, const Signal& g)
{
    require_same_grid(f.grid, g.grid, "multiply");
    CVec out(f.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.values[i] * g.values[i];
    return Signal(f.grid, std::move(out));
}

double conv_identity_defect(const Signal& f, const Signal& g, const Signal& phi, const Signal& psi)
{
    const PhaseField lhs = stft(convolve(f, g), convolve(phi, psi));
    const PhaseField rhs =
        scaled(theta_conv(stft(f, phi), stft(g, psi), PhaseKernel::zero(), ConvAxis::time), std::pow(two_pi, 0.5 * f.grid.dim));
    return relative_gap(lhs, rhs);
}

double mult_identity_defect(const Signal& f, const Signal& g, const Signal& phi, const Signal& psi)
{
    const PhaseField lhs = stft(multiply(f, g), multiply(phi, psi));
    const PhaseField rhs =
        scaled(theta_conv(stft(f, phi), stft(g, psi), PhaseKernel::zero(), ConvAxis::freq), std::pow(two_pi, -0.5 * f.grid.dim));
    return relative_gap(lhs, rhs);
}

namespace {

// sup of w0(x1 + x2, y) / (w1(x1, y) w2(x2, y)) when `on_first`, else of
// w0(x, y1 + y2) / (w1(x, y1) w2(x, y2)); points are (a, b, c) blocks of d coordinates.
double product_weight_constant(const Weight& w0, const Weight& w1, const Weight& w2, int d, bool on_first, Box box)
{
    box.dim = 3 * d;
    const auto ratio = [&, d, on_first](std::span<const double> P) {
        const auto a = P.subspan(0, static_cast<std::size_t>(d));
        const auto b = P.subspan(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
        const auto c = P.subspan(static_cast<std::size_t>(2 * d), static_cast<std::size_t>(d));
        std::vector<double> sum(static_cast<std::size_t>(d));
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = a[i] + b[i];
        if (on_first) return w0(phase_point(sum, c)) / (w1(phase_point(a, c)) * w2(phase_point(b, c)));
        return w0(phase_point(c, sum)) / (w1(phase_point(c, a)) * w2(phase_point(c, b)));
    };
    return hypothesis_constant(ratio, box);
}

// v(x, xi) = v0(x, 0) (first block) or v0(0, xi).
Weight restricted_moderator(const Weight& v0, int d, bool keep_first)
{
    return custom_weight(
        2 * d,
        [v0, d, keep_first](std::span<const double> X) {
            std::vector<double> P(X.begin(), X.end());
            for (int a = 0; a < d; ++a) P[static_cast<std::size_t>(keep_first ? a + d : a)] = 0.0;
            return v0(P);
        },
        keep_first ? "v0(x,0)" : "v0(0,xi)");
}

void check_unit_exponent(double p, const char* what)
{
    if (!(p >= 1.0)) throw PreconditionError(std::string(what) + " must lie in [1, inf]");
}

// Largest ratio over (f, g) pairs on one grid.
template <class F>
double pair_max(std::size_t nf, std::size_t ng, F&& ratio)
{
    std::vector<double> best(nf * ng, 0.0);
    for (std::size_t i = 0; i < nf; ++i)
        for (std::size_t j = 0; j < ng; ++j) best[i * ng + j] = ratio(i, j);
    double m = 0.0;
    for (double v : best) {
        if (std::isnan(v)) throw InvariantViolation("certificate ratio is not a number");
        m = std::max(m, v);
    }
    return m;
}

void finish_refinement(Certificate& c)
{
    c.relative_change = c.constant > 0.0 ? std::abs(c.refined / c.constant - 1.0) : (c.refined > 0.0 ? inf : 0.0);
}

double quotient(double num, double a, double b)
{
    const double den = a * b;
    if (den == 0.0) return 0.0;
    return num / den;
}

} // namespace

Certificate wiener_young_certificate(const std::vector<FieldSource>& Fs, const std::vector<FieldSource>& Gs,
                                     const Grid& grid, const WienerYoungSetup& s)
{
    for (double p : {s.p.p0, s.p.p1, s.p.p2}) check_unit_exponent(p, "Young exponent");
    const double lhs = 1.0 / s.p.p1 + 1.0 / s.p.p2;
    const double rhs = 1.0 + 1.0 / s.p.p0;
    if (std::abs(lhs - rhs) > 1e-12) throw PreconditionError("Young exponents violate 1/p1 + 1/p2 = 1 + 1/p0");
    const int d = grid.dim;
    const double r0 = s.backend.r0();
    const Weight v = s.v ? *s.v : restricted_moderator(s.backend.v0(), d, true);

    Certificate c;
    c.name = "wiener-young";
    c.weight_constant = product_weight_constant(s.w0, s.w1, s.w2, d, true, s.box);
    c.hypotheses_ok = std::isfinite(c.weight_constant);

    const WienerSpec out_spec(s.p.p0, r0, s.side, s.w0, s.backend);
    const WienerSpec f_spec(s.p.p1, r0, s.side, s.w1, s.backend);
    const WienerSpec g_spec(s.p.p2, inf, s.side, weight_product(s.w2, v), QbfSpec(r0, inf, unit_weight(2 * d), Order::xi_inner),
                            Order::xi_inner);
    const auto run = [&](const Grid& g) {
        std::vector<PhaseField> F, G;
        for (const auto& src : Fs) F.push_back(src(g));
        for (const auto& src : Gs) G.push_back(src(g));
        std::vector<double> nf(F.size()), ng(G.size());
        for (std::size_t i = 0; i < F.size(); ++i) nf[i] = wiener_norm(F[i], f_spec);
        for (std::size_t j = 0; j < G.size(); ++j) ng[j] = wiener_norm(G[j], g_spec);
        return pair_max(F.size(), G.size(), [&](std::size_t i, std::size_t j) {
            return quotient(wiener_norm(theta_conv(F[i], G[j], s.theta, ConvAxis::time), out_spec), nf[i], ng[j]);
        });
    };
    c.constant = run(grid);
    c.refined = run(grid.refined());
    finish_refinement(c);
    c.add("r0", r0);
    return c;
}

namespace {

double m_norm(const Signal& f, const Weight& w, const QbfSpec& backend)
{
    return modulation_norm(f, gaussian(f.grid), w, backend);
}

Certificate product_certificate(const std::vector<Source>& fs, const std::vector<Source>& gs, const Grid& grid,
                                const ModulationProductSetup& s, bool conv)
{
    const int d = grid.dim;
    const double r0 = s.backend.r0();
    const Weight v = restricted_moderator(s.backend.v0(), d, conv);
    const QbfSpec g_space = conv ? QbfSpec(r0, inf, weight_product(s.w2, v), Order::xi_inner)
                                 : QbfSpec(inf, r0, weight_product(s.w2, v), Order::x_inner);
    Certificate c;
    c.name = conv ? "mod-conv" : "mod-mult";
    c.weight_constant = product_weight_constant(s.w0, s.w1, s.w2, d, conv, s.box);
    c.hypotheses_ok = std::isfinite(c.weight_constant);
    const auto run = [&](const Grid& g) {
        const auto F = sample_all(fs, g);
        const auto G = sample_all(gs, g);
        const Signal phi = gaussian(g);
        std::vector<double> nf(F.size()), ng(G.size());
        for (std::size_t i = 0; i < F.size(); ++i) nf[i] = m_norm(F[i], s.w1, s.backend);
        for (std::size_t j = 0; j < G.size(); ++j) ng[j] = mixed_norm(stft(G[j], phi), g_space);
        return pair_max(F.size(), G.size(), [&](std::size_t i, std::size_t j) {
            const Signal out = conv ? convolve(F[i], G[j]) : multiply(F[i], G[j]);
            return quotient(m_norm(out, s.w0, s.backend), nf[i], ng[j]);
        });
    };
    c.constant = run(grid);
    c.refined = run(grid.refined());
    finish_refinement(c);
    c.add("r0", r0);
    return c;
}

} // namespace

Certificate mod_conv_certificate(const std::vector<Source>& fs, const std::vector<Source>& gs, const Grid& grid,
                                 const ModulationProductSetup& setup)
{
    return product_certificate(fs, gs, grid, setup, true);
}

Certificate mod_mult_certificate(const std::vector<Source>& fs, const std::vector<Source>& gs, const Grid& grid,
                                 const ModulationProductSetup& setup)
{
    return product_certificate(fs, gs, grid, setup, false);
}

Certificate classical_conv_certificate(const std::vector<Source>& fs, const std::vector<Source>& gs, const Grid& grid,
                                       const ClassicalExponents& e, const Weight& w0, const Weight& w1,
                                       const Weight& w2, const Box& box)
{
    for (double p : {e.p0, e.q0, e.p1, e.q1, e.p2, e.q2})
        if (!(p > 0.0)) throw PreconditionError("exponents must be positive");
    const double ip1 = 1.0 / e.p1, ip2 = 1.0 / e.p2;
    if (std::abs(1.0 / e.p0 - (ip1 + ip2 - std::max({1.0, ip1, ip2}))) > 1e-12)
        throw PreconditionError("exponents violate 1/p0 = 1/p1 + 1/p2 - max(1, 1/p1, 1/p2)");
    if (std::abs(1.0 / e.q0 - (1.0 / e.q1 + 1.0 / e.q2)) > 1e-12)
        throw PreconditionError("exponents violate 1/q0 = 1/q1 + 1/q2");
    const int d = grid.dim;
    Certificate c;
    c.name = "classical-conv";
    c.weight_constant = product_weight_constant(w0, w1, w2, d, true, box);
    c.hypotheses_ok = std::isfinite(c.weight_constant);
    const QbfSpec s0(e.p0, e.q0, w0), s1(e.p1, e.q1, w1), s2(e.p2, e.q2, w2);
    const auto run = [&](const Grid& g) {
        const auto F = sample_all(fs, g);
        const auto G = sample_all(gs, g);
        const Signal phi = gaussian(g);
        std::vector<double> nf(F.size()), ng(G.size());
        for (std::size_t i = 0; i < F.size(); ++i) nf[i] = mixed_norm(stft(F[i], phi), s1);
        for (std::size_t j = 0; j < G.size(); ++j) ng[j] = mixed_norm(stft(G[j], phi), s2);
        return pair_max(F.size(), G.size(), [&](std::size_t i, std::size_t j) {
            return quotient(mixed_norm(stft(convolve(F[i], G[j]), phi), s0), nf[i], ng[j]);
        });
    };
    c.constant = run(grid);
    c.refined = run(grid.refined());
    finish_refinement(c);
    return c;
}

} // namespace tfnorm
