#include "tfnorm/spaces.hpp"

#include "lattice.hpp"
#include "tfnorm/error.hpp"
#include "tfnorm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tfnorm {
namespace {

void check_exponent(double e, const char* what)
{
    if (!(e > 0.0)) throw PreconditionError(std::string(what) + " must be positive");
}

std::string exp_label(double e)
{
    if (std::isinf(e)) return "inf";
    std::ostringstream os;
    os << e;
    return os.str();
}

// L^e accumulation of non-negative values with a common measure.
struct Acc {
    double e;
    double mu;
    double value = 0.0;

    void add(double v)
    {
        if (std::isinf(e)) value = std::max(value, v);
        else if (v > 0.0) value += std::pow(v, e) * mu;
    }
    double result() const { return std::isinf(e) ? value : std::pow(value, 1.0 / e); }
};

std::size_t ipow(std::size_t b, int e)
{
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// Flat sample indices of the product region prod_a [start_a, end_a).
std::vector<std::size_t> region(const std::vector<std::size_t>& start, const std::vector<std::size_t>& end, std::size_t n)
{
    std::vector<std::size_t> out;
    const int d = static_cast<int>(start.size());
    std::vector<std::size_t> cur(start);
    if (d == 0) return out;
    for (int a = 0; a < d; ++a)
        if (start[static_cast<std::size_t>(a)] >= end[static_cast<std::size_t>(a)]) return out;
    for (;;) {
        std::size_t flat = 0;
        for (int a = 0; a < d; ++a) flat = flat * n + cur[static_cast<std::size_t>(a)];
        out.push_back(flat);
        int a = d - 1;
        while (a >= 0) {
            auto& c = cur[static_cast<std::size_t>(a)];
            if (++c < end[static_cast<std::size_t>(a)]) break;
            c = start[static_cast<std::size_t>(a)];
            --a;
        }
        if (a < 0) break;
    }
    return out;
}

// Regions of the anchors a*stride, extent `width`, along each of d axes.
std::vector<std::vector<std::size_t>> anchor_regions(int d, std::size_t n, std::size_t stride, std::size_t width,
                                                     std::size_t& per_axis)
{
    per_axis = (n + stride - 1) / stride;
    const std::size_t total = ipow(per_axis, d);
    std::vector<std::vector<std::size_t>> out(total);
    for (std::size_t A = 0; A < total; ++A) {
        std::vector<std::size_t> start(static_cast<std::size_t>(d)), end(static_cast<std::size_t>(d));
        std::size_t rest = A;
        for (int a = d - 1; a >= 0; --a) {
            const std::size_t c = rest % per_axis;
            rest /= per_axis;
            start[static_cast<std::size_t>(a)] = c * stride;
            end[static_cast<std::size_t>(a)] = std::min(n, c * stride + width);
        }
        out[A] = region(start, end, n);
    }
    return out;
}

Grid cell_grid(int d, std::size_t count, double side, const std::vector<double>& offset)
{
    Grid g;
    g.dim = d;
    g.n = count;
    g.h = side;
    g.offset = offset;
    return g;
}

CellSequence lattice_local(const PhaseField& F, const WienerSpec& ws, const Partition& part, std::size_t sx,
                           std::size_t sk, std::size_t ox, std::size_t ok)
{
    const Grid& tg = F.time;
    const int d = tg.dim;
    const std::size_t n = tg.n;
    const std::size_t N = F.points();
    if (ws.weight.dim() != 2 * d) throw PreconditionError("wiener weight must live on R^{2d}");
    const std::vector<double> w = ws.weight.sample_phase(tg);
    std::size_t cx = 0, ck = 0;
    const auto rx = anchor_regions(d, n, sx, ox, cx);
    const auto rk = anchor_regions(d, n, sk, ok, ck);
    const double mux = 1.0 / static_cast<double>(ipow(part.ax, d));
    const double muk = 1.0 / static_cast<double>(ipow(part.b, d));
    CellSequence out{cell_grid(d, cx, static_cast<double>(sx) * tg.h, tg.offset),
                     cell_grid(d, ck, static_cast<double>(sk) * F.freq.h, F.freq.offset),
                     std::vector<double>(rx.size() * rk.size(), 0.0)};
    if (ws.local == Order::xi_inner) {
        parallel_for(rx.size(), [&](std::size_t A) {
            for (std::size_t B = 0; B < rk.size(); ++B) {
                Acc outer{ws.r1, mux};
                for (std::size_t j : rx[A]) {
                    Acc acc{ws.r2, muk};
                    for (std::size_t k : rk[B]) acc.add(std::abs(F.values[j * N + k]) * w[j * N + k]);
                    outer.add(acc.result());
                }
                out.values[A * rk.size() + B] = outer.result();
            }
        });
        return out;
    }
    parallel_for(rx.size(), [&](std::size_t A) {
        std::vector<double> inner(N);
        for (std::size_t k = 0; k < N; ++k) {
            Acc acc{ws.r1, mux};
            for (std::size_t j : rx[A]) acc.add(std::abs(F.values[j * N + k]) * w[j * N + k]);
            inner[k] = acc.result();
        }
        for (std::size_t B = 0; B < rk.size(); ++B) {
            Acc acc{ws.r2, muk};
            for (std::size_t k : rk[B]) acc.add(inner[k]);
            out.values[A * rk.size() + B] = acc.result();
        }
    });
    return out;
}

} // namespace

QbfSpec::QbfSpec(double p_, double q_, Weight w, Order o) : p(p_), q(q_), order(o), weight(std::move(w))
{
    check_exponent(p, "exponent p");
    check_exponent(q, "exponent q");
    if (weight.dim() % 2 != 0) throw PreconditionError("backend weight must live on R^{2d}");
}

double QbfSpec::r0() const { return std::min({1.0, p, q}); }

Weight QbfSpec::v0() const
{
    if (const Weight* m = weight.moderator()) return *m;
    return unit_weight(weight.dim());
}

QbfSpec QbfSpec::normality_witness() const
{
    const double r = r0();
    return QbfSpec(p / r, q / r, weight_power(weight, r), order);
}

QbfSpec QbfSpec::with_weight(Weight w) const { return QbfSpec(p, q, std::move(w), order); }

std::string QbfSpec::label() const
{
    std::string s = "Lpq:p=" + exp_label(p) + ",q=" + exp_label(q);
    if (order == Order::xi_inner) s += ",order=star";
    s += ",w=" + weight.label();
    return s;
}

QbfSpec lebesgue(double p, double q, int d, Order o) { return QbfSpec(p, q, unit_weight(2 * d), o); }

SampleMeasure physical_measure(const PhaseField& F) { return {F.time.weight(), F.freq.weight()}; }

double lpq_raw(std::span<const double> m, std::size_t nx, std::size_t nk, double p, double q, Order order,
               SampleMeasure mu)
{
    check_exponent(p, "exponent p");
    check_exponent(q, "exponent q");
    if (m.size() != nx * nk) throw PreconditionError("lpq_raw: size mismatch");
    if (order == Order::x_inner) {
        Acc outer{q, mu.xi};
        for (std::size_t k = 0; k < nk; ++k) {
            Acc in{p, mu.x};
            for (std::size_t j = 0; j < nx; ++j) in.add(m[j * nk + k]);
            outer.add(in.result());
        }
        return outer.result();
    }
    Acc outer{p, mu.x};
    for (std::size_t j = 0; j < nx; ++j) {
        Acc in{q, mu.xi};
        for (std::size_t k = 0; k < nk; ++k) in.add(m[j * nk + k]);
        outer.add(in.result());
    }
    return outer.result();
}

double mixed_norm(const PhaseField& F, const QbfSpec& spec, std::optional<SampleMeasure> mu)
{
    if (spec.phase_dim() != 2 * F.time.dim) throw PreconditionError("mixed_norm: weight dimension mismatch");
    const std::vector<double> w = spec.weight.sample_phase(F.time);
    std::vector<double> m(F.values.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::abs(F.values[i]) * w[i];
    const std::size_t N = F.points();
    return lpq_raw(m, N, N, spec.p, spec.q, spec.order, mu.value_or(physical_measure(F)));
}

double seq_norm(const CellSequence& a, const QbfSpec& spec, SampleMeasure cell_measure)
{
    const std::size_t nx = a.xcells.size();
    const std::size_t nk = a.kcells.size();
    if (a.values.size() != nx * nk) throw PreconditionError("seq_norm: sequence size mismatch");
    if (spec.phase_dim() != a.xcells.dim + a.kcells.dim) throw PreconditionError("seq_norm: weight dimension mismatch");
    std::vector<double> m(a.values.size());
    for (std::size_t j = 0; j < nx; ++j) {
        const auto x = a.xcells.point(j);
        for (std::size_t k = 0; k < nk; ++k) {
            const auto X = phase_point(x, a.kcells.point(k));
            m[j * nk + k] = std::abs(a.values[j * nk + k]) * spec.weight(X);
        }
    }
    return lpq_raw(m, nx, nk, spec.p, spec.q, spec.order, cell_measure);
}

Partition make_partition(const Grid& time, double side)
{
    if (!(side > 0.0)) throw PreconditionError("cell side must be positive");
    const double r = side / time.h;
    const double ri = std::round(r);
    if (ri < 1.0 || std::abs(r - ri) > 1e-9 * std::max(1.0, r))
        throw GridMismatch("cell side is not an integer multiple of the grid step");
    Partition p;
    p.side = side;
    p.ax = static_cast<std::size_t>(ri);
    if (time.n % p.ax != 0) throw GridMismatch("cells do not tile the grid box");
    const double target = side / time.dual_step();
    double best = inf;
    for (std::size_t b = 1; b <= time.n; ++b) {
        if (time.n % b != 0) continue;
        const double gap = std::abs(static_cast<double>(b) - target);
        if (gap < best - 1e-12) {
            best = gap;
            p.b = b;
        }
    }
    return p;
}

PhaseField step_function(const CellSequence& a, const Grid& time, const Partition& part)
{
    const int d = time.dim;
    const std::size_t n = time.n;
    const std::size_t N = time.size();
    const std::size_t cx = n / part.ax;
    const std::size_t ck = n / part.b;
    if (a.xcells.size() != ipow(cx, d) || a.kcells.size() != ipow(ck, d))
        throw GridMismatch("step_function: sequence does not match the partition");
    PhaseField F = PhaseField::zeros(time);
    std::vector<std::size_t> xcell(N), kcell(N);
    for (std::size_t i = 0; i < N; ++i) {
        std::size_t idx[2] = {0, 0};
        detail::unflatten(i, d, n, idx);
        std::size_t fx = 0, fk = 0;
        for (int ax = 0; ax < d; ++ax) {
            fx = fx * cx + idx[ax] / part.ax;
            fk = fk * ck + idx[ax] / part.b;
        }
        xcell[i] = fx;
        kcell[i] = fk;
    }
    const std::size_t nk = a.kcells.size();
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t k = 0; k < N; ++k) F.at(j, k) = a.values[xcell[j] * nk + kcell[k]];
    return F;
}

WienerSpec::WienerSpec(double r1_, double r2_, double side_, Weight w, QbfSpec s, Order local_)
    : r1(r1_), r2(r2_), side(side_), weight(std::move(w)), seq(std::move(s)), local(local_)
{
    check_exponent(r1, "exponent r1");
    check_exponent(r2, "exponent r2");
    if (!(side > 0.0)) throw PreconditionError("cell side must be positive");
    if (weight.dim() != seq.phase_dim()) throw PreconditionError("wiener weight and backend dimensions differ");
}

WienerSpec WienerSpec::with_r(double r1_, double r2_) const { return WienerSpec(r1_, r2_, side, weight, seq, local); }

std::string WienerSpec::label() const
{
    std::ostringstream os;
    os << "wiener:r1=" << exp_label(r1) << ",r2=" << exp_label(r2) << ",side=" << side << (local == Order::xi_inner ? ",local=star" : "") << ",w=" << weight.label()
       << ",seq=(" << seq.label() << ")";
    return os.str();
}

CellSequence wiener_local(const PhaseField& F, const WienerSpec& wspec)
{
    const Partition part = make_partition(F.time, wspec.side);
    return lattice_local(F, wspec, part, part.ax, part.b, part.ax, part.b);
}

double wiener_norm(const PhaseField& F, const WienerSpec& wspec)
{
    return seq_norm(wiener_local(F, wspec), wspec.seq);
}

double wiener_norm_lattice(const PhaseField& F, const WienerSpec& wspec, double lattice_scale, double omega)
{
    if (!(lattice_scale > 0.0) || omega + 1e-12 < lattice_scale)
        throw PreconditionError("wiener_norm_lattice: need 0 < lattice_scale <= omega");
    const Partition part = make_partition(F.time, wspec.side);
    const auto cnt = [](double s, std::size_t base) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(s * static_cast<double>(base))));
    };
    const std::size_t sx = cnt(lattice_scale, part.ax), sk = cnt(lattice_scale, part.b);
    const std::size_t ox = std::max(sx, cnt(omega, part.ax)), ok = std::max(sk, cnt(omega, part.b));
    const CellSequence a = lattice_local(F, wspec, part, sx, sk, ox, ok);
    const int d = F.time.dim;
    SampleMeasure mu{std::pow(static_cast<double>(sx) / static_cast<double>(part.ax), d),
                     std::pow(static_cast<double>(sk) / static_cast<double>(part.b), d)};
    return seq_norm(a, wspec.seq, mu);
}

double backend_norm_cells(const PhaseField& F, const WienerSpec& wspec)
{
    const Partition part = make_partition(F.time, wspec.side);
    const int d = F.time.dim;
    const QbfSpec spec = wspec.seq.with_weight(weight_product(wspec.weight, wspec.seq.weight));
    return mixed_norm(F, spec,
                      SampleMeasure{1.0 / static_cast<double>(ipow(part.ax, d)), 1.0 / static_cast<double>(ipow(part.b, d))});
}

SandwichConstants sandwich_constants(const std::vector<PhaseField>& ensemble, const WienerSpec& wspec)
{
    SandwichConstants c;
    const double r0 = wspec.seq.r0();
    const WienerSpec low = wspec.with_r(r0, r0);
    const WienerSpec high = wspec.with_r(inf, inf);
    for (const auto& F : ensemble) {
        const double b = backend_norm_cells(F, wspec);
        if (b == 0.0) continue;
        c.c_low = std::max(c.c_low, wiener_norm(F, low) / b);
        c.c_high = std::max(c.c_high, b / wiener_norm(F, high));
    }
    return c;
}

LatticeSeq LatticeSeq::zeros(std::vector<long> lo, std::vector<std::size_t> ext)
{
    if (lo.size() != ext.size() || lo.empty() || lo.size() % 2 != 0)
        throw PreconditionError("lattice sequence must have 2d axes");
    std::size_t total = 1;
    for (auto e : ext) total *= e;
    return LatticeSeq{std::move(lo), std::move(ext), CVec(total)};
}

double lattice_norm(const LatticeSeq& a, const QbfSpec& spec)
{
    const std::size_t r = a.rank();
    if (static_cast<std::size_t>(spec.phase_dim()) != r) throw PreconditionError("lattice_norm: weight dimension mismatch");
    const std::size_t d = r / 2;
    std::size_t nx = 1, nk = 1;
    for (std::size_t i = 0; i < d; ++i) nx *= a.ext[i];
    for (std::size_t i = d; i < r; ++i) nk *= a.ext[i];
    std::vector<double> m(a.values.size());
    std::vector<double> X(r);
    for (std::size_t flat = 0; flat < m.size(); ++flat) {
        std::size_t rest = flat;
        for (std::size_t i = r; i-- > 0;) {
            X[i] = static_cast<double>(a.lo[i] + static_cast<long>(rest % a.ext[i]));
            rest /= a.ext[i];
        }
        m[flat] = std::abs(a.values[flat]) * spec.weight(X);
    }
    return lpq_raw(m, nx, nk, spec.p, spec.q, spec.order, SampleMeasure{});
}

LatticeSeq lattice_convolve(const LatticeSeq& a, const LatticeSeq& b)
{
    if (a.rank() != b.rank()) throw PreconditionError("lattice_convolve: rank mismatch");
    const std::size_t r = a.rank();
    std::vector<long> lo(r);
    std::vector<std::size_t> ext(r);
    for (std::size_t i = 0; i < r; ++i) {
        lo[i] = a.lo[i] + b.lo[i];
        ext[i] = a.ext[i] + b.ext[i] - 1;
    }
    LatticeSeq c = LatticeSeq::zeros(lo, ext);
    std::vector<std::size_t> ia(r), ib(r);
    for (std::size_t fa = 0; fa < a.values.size(); ++fa) {
        if (a.values[fa] == cplx(0.0)) continue;
        std::size_t rest = fa;
        for (std::size_t i = r; i-- > 0;) {
            ia[i] = rest % a.ext[i];
            rest /= a.ext[i];
        }
        for (std::size_t fb = 0; fb < b.values.size(); ++fb) {
            std::size_t rb = fb;
            std::size_t fc = 0;
            for (std::size_t i = r; i-- > 0;) {
                ib[i] = rb % b.ext[i];
                rb /= b.ext[i];
            }
            for (std::size_t i = 0; i < r; ++i) fc = fc * ext[i] + ia[i] + ib[i];
            c.values[fc] += a.values[fa] * b.values[fb];
        }
    }
    return c;
}

double discrete_conv_bound(const std::vector<LatticeSeq>& as, const std::vector<LatticeSeq>& bs, const QbfSpec& spec)
{
    const double r0 = spec.r0();
    const QbfSpec small(r0, r0, spec.v0(), Order::x_inner);
    double best = 0.0;
    for (const auto& a : as) {
        const double na = lattice_norm(a, small);
        if (na == 0.0) continue;
        for (const auto& b : bs) {
            const double nb = lattice_norm(b, spec);
            if (nb == 0.0) continue;
            best = std::max(best, lattice_norm(lattice_convolve(a, b), spec) / (na * nb));
        }
    }
    return best;
}

} // namespace tfnorm
