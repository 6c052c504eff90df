#include "tfnorm/grid.hpp"

#include "tfnorm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tfnorm {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

bool close(double a, double b)
{
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<int> extents(const Grid& g)
{
    return std::vector<int>(static_cast<std::size_t>(g.dim), static_cast<int>(g.n));
}

// Per-axis indices of a row-major flat index.
void unflatten(std::size_t flat, const Grid& g, std::size_t* idx)
{
    for (int a = g.dim - 1; a >= 0; --a) {
        idx[a] = flat % g.n;
        flat /= g.n;
    }
}

double parity_sign(std::size_t flat, const Grid& g)
{
    std::size_t idx[2] = {0, 0};
    unflatten(flat, g, idx);
    std::size_t s = 0;
    for (int a = 0; a < g.dim; ++a) s += idx[a];
    return (s % 2 == 0) ? 1.0 : -1.0;
}

// exp(sign * i * <o, xi_k>) for every point k of the dual grid `dual`.
CVec offset_phase(const std::vector<double>& o, const Grid& dual, double sign)
{
    CVec out(dual.size());
    std::size_t idx[2] = {0, 0};
    for (std::size_t k = 0; k < out.size(); ++k) {
        unflatten(k, dual, idx);
        double phase = 0.0;
        for (int a = 0; a < dual.dim; ++a) phase += o[static_cast<std::size_t>(a)] * dual.coord(a, idx[a]);
        out[k] = std::polar(1.0, sign * phase);
    }
    return out;
}

void check_finite(const CVec& v, const char* what)
{
    for (const auto& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw InvariantViolation(std::string(what) + ": non-finite sample");
}

} // namespace

std::size_t Grid::size() const
{
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= n;
    return total;
}

double Grid::weight() const { return std::pow(h, dim); }

std::vector<double> Grid::point(std::size_t flat) const
{
    std::size_t idx[2] = {0, 0};
    unflatten(flat, *this, idx);
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) x[static_cast<std::size_t>(a)] = coord(a, idx[a]);
    return x;
}

std::vector<double> Grid::center() const
{
    std::vector<double> c(offset);
    for (auto& v : c) v += static_cast<double>(n / 2) * h;
    return c;
}

double Grid::dual_step() const { return two_pi / (static_cast<double>(n) * h); }

Grid Grid::dual() const
{
    Grid g;
    g.dim = dim;
    g.n = n;
    g.h = dual_step();
    g.offset.assign(static_cast<std::size_t>(dim), -static_cast<double>(n / 2) * g.h);
    return g;
}

Grid Grid::refined() const
{
    return make_grid(dim, 2 * n, h / 2.0, center());
}

Grid make_grid(int d, std::size_t n, double h, std::vector<double> center)
{
    if (d != 1 && d != 2) throw PreconditionError("grid dimension must be 1 or 2");
    if (n < 2 || n % 2 != 0) throw PreconditionError("grid point count must be even and at least 2");
    if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("grid step must be positive");
    if (center.empty()) center.assign(static_cast<std::size_t>(d), 0.0);
    if (center.size() != static_cast<std::size_t>(d)) throw PreconditionError("grid center has wrong length");
    Grid g;
    g.dim = d;
    g.n = n;
    g.h = h;
    g.offset.resize(static_cast<std::size_t>(d));
    for (std::size_t a = 0; a < center.size(); ++a) g.offset[a] = center[a] - static_cast<double>(n / 2) * h;
    return g;
}

bool same_grid(const Grid& a, const Grid& b)
{
    if (a.dim != b.dim || a.n != b.n || !close(a.h, b.h) || a.offset.size() != b.offset.size()) return false;
    for (std::size_t i = 0; i < a.offset.size(); ++i)
        if (std::abs(a.offset[i] - b.offset[i]) > 1e-12 * std::max(1.0, static_cast<double>(a.n) * a.h)) return false;
    return true;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what)
{
    if (!same_grid(a, b)) throw GridMismatch(std::string(what) + ": operands live on different grids");
}

long difference_shift(const Grid& g)
{
    const auto c = g.center();
    const double r = c[0] / g.h;
    const double ri = std::round(r);
    if (std::abs(r - ri) > 1e-9) throw PreconditionError("grid center must be a multiple of the step");
    for (std::size_t a = 1; a < c.size(); ++a)
        if (std::abs(c[a] / g.h - ri) > 1e-9) throw PreconditionError("grid center must be the same multiple of the step on every axis");
    return static_cast<long>(g.n / 2) - static_cast<long>(ri);
}

Signal::Signal(Grid g, CVec v) : grid(std::move(g)), values(std::move(v))
{
    if (values.size() != grid.size()) throw InvariantViolation("signal length does not match its grid");
    check_finite(values, "signal");
}

Signal Signal::zeros(const Grid& g) { return Signal(g, CVec(g.size())); }

PhaseField::PhaseField(Grid t, CVec v) : time(std::move(t)), freq(time.dual()), values(std::move(v))
{
    const std::size_t N = time.size();
    if (values.size() != N * N) throw InvariantViolation("phase field length does not match its grids");
    check_finite(values, "phase field");
}

PhaseField PhaseField::zeros(const Grid& t)
{
    const std::size_t N = t.size();
    return PhaseField(t, CVec(N * N));
}

Signal dft(const Signal& f)
{
    const Grid& g = f.grid;
    const Grid dual = g.dual();
    CVec work(f.values);
    for (std::size_t m = 0; m < work.size(); ++m) work[m] *= parity_sign(m, g);
    const auto dims = extents(g);
    fft::forward(work, dims);
    const double scale = g.weight() * std::pow(two_pi, -0.5 * g.dim);
    const CVec phase = offset_phase(g.offset, dual, -1.0);
    for (std::size_t k = 0; k < work.size(); ++k) work[k] *= scale * phase[k];
    return Signal(dual, std::move(work));
}

Signal inverse_dft(const Signal& F, const std::optional<Grid>& target)
{
    const Grid& dual = F.grid;
    Grid out = target ? *target : dual.dual();
    if (out.dim != dual.dim || out.n != dual.n || !close(out.h * dual.h * static_cast<double>(dual.n), two_pi))
        throw GridMismatch("inverse_dft: target grid is not reciprocal to the input grid");
    CVec work(F.values);
    const CVec phase = offset_phase(out.offset, dual, +1.0);
    for (std::size_t k = 0; k < work.size(); ++k) work[k] *= phase[k];
    const auto dims = extents(dual);
    fft::backward(work, dims);
    const double scale = dual.weight() * std::pow(two_pi, -0.5 * dual.dim);
    for (std::size_t m = 0; m < work.size(); ++m) work[m] *= scale * parity_sign(m, out);
    return Signal(std::move(out), std::move(work));
}

cplx inner(const Signal& f, const Signal& g)
{
    require_same_grid(f.grid, g.grid, "inner");
    cplx acc = 0.0;
    for (std::size_t m = 0; m < f.values.size(); ++m) acc += f.values[m] * std::conj(g.values[m]);
    return acc * f.grid.weight();
}

double l2_norm(const Signal& f) { return std::sqrt(std::max(0.0, inner(f, f).real())); }

cplx inner(const PhaseField& F, const PhaseField& G)
{
    require_same_grid(F.time, G.time, "phase inner");
    cplx acc = 0.0;
    for (std::size_t i = 0; i < F.values.size(); ++i) acc += F.values[i] * std::conj(G.values[i]);
    return acc * F.cell();
}

double l2_norm(const PhaseField& F) { return std::sqrt(std::max(0.0, inner(F, F).real())); }

Signal sample(const Grid& g, const std::function<cplx(std::span<const double>)>& fn)
{
    CVec v(g.size());
    for (std::size_t m = 0; m < v.size(); ++m) {
        const auto x = g.point(m);
        v[m] = fn(x);
    }
    return Signal(g, std::move(v));
}

Signal gaussian(const Grid& g)
{
    const double norm = std::pow(std::numbers::pi, -0.25 * g.dim);
    return sample(g, [norm](std::span<const double> x) {
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        return cplx(norm * std::exp(-0.5 * r2), 0.0);
    });
}

Signal tf_shift(const Signal& f, std::span<const double> x0, std::span<const double> xi0)
{
    const Grid& g = f.grid;
    const auto d = static_cast<std::size_t>(g.dim);
    if (x0.size() != d || xi0.size() != d) throw PreconditionError("tf_shift: shift vectors have wrong length");
    long shift[2] = {0, 0};
    for (std::size_t a = 0; a < d; ++a) {
        const double s = x0[a] / g.h;
        const double si = std::round(s);
        if (std::abs(s - si) > 1e-9) throw PreconditionError("tf_shift: x0 is not a lattice vector");
        shift[a] = static_cast<long>(si);
    }
    CVec out(g.size());
    const long n = static_cast<long>(g.n);
    for (std::size_t m = 0; m < out.size(); ++m) {
        std::size_t idx[2] = {0, 0};
        unflatten(m, g, idx);
        std::size_t src = 0;
        bool inside = true;
        double phase = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            const long j = static_cast<long>(idx[a]) - shift[a];
            if (j < 0 || j >= n) inside = false;
            src = src * g.n + static_cast<std::size_t>(std::clamp(j, 0L, n - 1));
            phase += g.coord(static_cast<int>(a), idx[a]) * xi0[a];
        }
        if (inside) out[m] = f.values[src] * std::polar(1.0, phase);
    }
    return Signal(g, std::move(out));
}

double mass_outside_estimate(const Signal& f)
{
    const Grid& g = f.grid;
    double worst = 0.0;
    for (std::size_t m = 0; m < f.values.size(); ++m) {
        std::size_t idx[2] = {0, 0};
        unflatten(m, g, idx);
        bool edge = false;
        for (int a = 0; a < g.dim; ++a) edge = edge || idx[a] == 0 || idx[a] + 1 == g.n;
        if (edge) worst = std::max(worst, std::abs(f.values[m]));
    }
    return worst;
}

double mass_outside_estimate(const PhaseField& F)
{
    const std::size_t N = F.points();
    const Grid& g = F.time;
    double worst = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        std::size_t ix[2] = {0, 0};
        unflatten(j, g, ix);
        bool xedge = false;
        for (int a = 0; a < g.dim; ++a) xedge = xedge || ix[a] == 0 || ix[a] + 1 == g.n;
        for (std::size_t k = 0; k < N; ++k) {
            std::size_t ik[2] = {0, 0};
            unflatten(k, g, ik);
            bool edge = xedge;
            for (int a = 0; a < g.dim; ++a) edge = edge || ik[a] == 0 || ik[a] + 1 == g.n;
            if (edge) worst = std::max(worst, std::abs(F.at(j, k)));
        }
    }
    return worst;
}

CVec half_lattice(std::span<const cplx> values)
{
    const std::size_t n = values.size();
    if (n < 2 || n % 2 != 0) throw PreconditionError("half_lattice: length must be even");
    CVec spec(values.begin(), values.end());
    const int dn[1] = {static_cast<int>(n)};
    fft::forward(spec, dn);
    CVec padded(2 * n);
    for (std::size_t k = 0; k < n / 2; ++k) padded[k] = spec[k];
    for (std::size_t k = n / 2 + 1; k < n; ++k) padded[k + n] = spec[k];
    padded[n / 2] = 0.5 * spec[n / 2];
    padded[n + n / 2] = 0.5 * spec[n / 2];
    const int d2n[1] = {static_cast<int>(2 * n)};
    fft::backward(padded, d2n);
    for (auto& z : padded) z /= static_cast<double>(n);
    return padded;
}

CVec half_lattice(const Signal& f)
{
    if (f.grid.dim != 1) throw PreconditionError("half_lattice: one-dimensional signals only");
    return half_lattice(std::span<const cplx>(f.values));
}

Signal scaled(const Signal& f, cplx s)
{
    CVec v(f.values);
    for (auto& z : v) z *= s;
    return Signal(f.grid, std::move(v));
}

Signal operator+(const Signal& a, const Signal& b)
{
    require_same_grid(a.grid, b.grid, "signal sum");
    CVec v(a.values);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.values[i];
    return Signal(a.grid, std::move(v));
}

Signal operator-(const Signal& a, const Signal& b)
{
    require_same_grid(a.grid, b.grid, "signal difference");
    CVec v(a.values);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b.values[i];
    return Signal(a.grid, std::move(v));
}

PhaseField scaled(const PhaseField& F, cplx s)
{
    CVec v(F.values);
    for (auto& z : v) z *= s;
    return PhaseField(F.time, std::move(v));
}

} // namespace tfnorm
