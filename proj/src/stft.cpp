#include "tfnorm/stft.hpp"

#include "lattice.hpp"
#include "tfnorm/error.hpp"
#include "tfnorm/parallel.hpp"
#include "tfnorm/tfconv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tfnorm {
namespace {

void require_window(const Signal& window)
{
    for (const auto& z : window.values)
        if (z != cplx(0.0)) return;
    throw PreconditionError("window must be nonzero");
}

// Flat index of -x on the grid, or false when -x is not a sample.
bool reflected_index(const Grid& g, std::size_t flat, bool centred_dual, std::size_t& out)
{
    std::size_t idx[2] = {0, 0};
    detail::unflatten(flat, g.dim, g.n, idx);
    std::size_t res = 0;
    for (int a = 0; a < g.dim; ++a) {
        long r = 0;
        if (centred_dual) {
            r = static_cast<long>(g.n) - static_cast<long>(idx[a]);
        } else {
            const double t = -2.0 * g.offset[static_cast<std::size_t>(a)] / g.h;
            const double ti = std::round(t);
            if (std::abs(t - ti) > 1e-9) return false;
            r = static_cast<long>(ti) - static_cast<long>(idx[a]);
        }
        if (r < 0 || r >= static_cast<long>(g.n)) return false;
        res = res * g.n + static_cast<std::size_t>(r);
    }
    out = res;
    return true;
}

} // namespace

PhaseField stft(const Signal& f, const Signal& window)
{
    require_same_grid(f.grid, window.grid, "stft");
    require_window(window);
    const Grid& g = f.grid;
    const long s = difference_shift(g);
    const std::size_t N = g.size();
    CVec out(N * N);
    parallel_for(N, [&](std::size_t j) {
        std::size_t jj[2] = {0, 0}, mm[2] = {0, 0};
        detail::unflatten(j, g.dim, g.n, jj);
        CVec prod(N);
        for (std::size_t m = 0; m < N; ++m) {
            detail::unflatten(m, g.dim, g.n, mm);
            std::size_t w = 0;
            if (detail::difference_index(mm, jj, s, g.dim, g.n, w)) prod[m] = f.values[m] * std::conj(window.values[w]);
        }
        const Signal row = dft(Signal(g, std::move(prod)));
        std::copy(row.values.begin(), row.values.end(), out.begin() + static_cast<std::ptrdiff_t>(j * N));
    });
    return PhaseField(g, std::move(out));
}

Signal stft_adjoint(const PhaseField& F, const Signal& window)
{
    require_same_grid(F.time, window.grid, "stft_adjoint");
    const Grid& g = F.time;
    const long s = difference_shift(g);
    const std::size_t N = g.size();
    // rows[j] = inverse transform of F(y_j, .) sampled on the signal grid
    std::vector<CVec> rows(N);
    parallel_for(N, [&](std::size_t j) {
        CVec row(F.values.begin() + static_cast<std::ptrdiff_t>(j * N), F.values.begin() + static_cast<std::ptrdiff_t>((j + 1) * N));
        rows[j] = inverse_dft(Signal(F.freq, std::move(row)), g).values;
    });
    CVec out(N);
    const double w = g.weight();
    parallel_for(N, [&](std::size_t m) {
        std::size_t jj[2] = {0, 0}, mm[2] = {0, 0};
        detail::unflatten(m, g.dim, g.n, mm);
        cplx acc = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            detail::unflatten(j, g.dim, g.n, jj);
            std::size_t idx = 0;
            if (detail::difference_index(mm, jj, s, g.dim, g.n, idx)) acc += window.values[idx] * rows[j][m];
        }
        out[m] = w * acc;
    });
    return Signal(g, std::move(out));
}

Signal reconstruct(const Signal& f, const Signal& window)
{
    const double nrm = l2_norm(window);
    if (nrm == 0.0) throw PreconditionError("window must be nonzero");
    return scaled(stft_adjoint(stft(f, window), window), 1.0 / (nrm * nrm));
}

double reconstruction_defect(const Signal& f, const Signal& window)
{
    const double nf = l2_norm(f);
    if (nf == 0.0) return 0.0;
    return l2_norm(reconstruct(f, window) - f) / nf;
}

double moyal_defect(const Signal& f, const Signal& g, const Signal& phi1, const Signal& phi2)
{
    const cplx lhs = inner(stft(f, phi1), stft(g, phi2));
    const cplx rhs = inner(phi2, phi1) * inner(f, g);
    const double denom = l2_norm(f) * l2_norm(g) * l2_norm(phi1) * l2_norm(phi2);
    if (denom == 0.0) return std::abs(lhs - rhs);
    return std::abs(lhs - rhs) / denom;
}

namespace {

template <class Cmp>
double swap_compare(const Signal& f, const Signal& phi, Cmp cmp)
{
    const PhaseField a = stft(f, phi);
    const PhaseField b = stft(phi, f);
    const std::size_t N = a.points();
    double worst = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        std::size_t jr = 0;
        if (!reflected_index(a.time, j, false, jr)) continue;
        const auto x = a.time.point(j);
        for (std::size_t k = 0; k < N; ++k) {
            std::size_t kr = 0;
            if (!reflected_index(a.freq, k, true, kr)) continue;
            const auto xi = a.freq.point(k);
            double phase = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) phase += x[i] * xi[i];
            worst = std::max(worst, cmp(a.at(j, k), b.at(jr, kr), phase));
        }
    }
    return worst;
}

} // namespace

double swap_window_defect(const Signal& f, const Signal& phi)
{
    return swap_compare(f, phi, [](cplx va, cplx vb, double phase) {
        return std::abs(va - std::polar(1.0, -phase) * std::conj(vb));
    });
}

double swap_window_modulus_defect(const Signal& f, const Signal& phi)
{
    return swap_compare(f, phi, [](cplx va, cplx vb, double) { return std::abs(std::abs(va) - std::abs(vb)); });
}

ChangeWindowReport change_window_check(const Signal& f, const Signal& phi1, const Signal& phi2)
{
    const PhaseField lhs = stft(f, phi1);
    PhaseField a = stft(f, phi2);
    PhaseField b = stft(phi2, phi1);
    for (auto& z : a.values) z = std::abs(z);
    for (auto& z : b.values) z = std::abs(z);
    const PhaseField conv = phase_convolution(a, b);
    const double n2 = std::pow(l2_norm(phi2), 2);
    ChangeWindowReport rep;
    rep.max_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lhs.values.size(); ++i)
        rep.max_excess = std::max(rep.max_excess, std::abs(lhs.values[i]) - conv.values[i].real() / n2);
    if (f.grid.dim == 1) {
        const PhaseField direct = phase_convolution_direct(a, b);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < direct.values.size(); ++i) {
            num = std::max(num, std::abs(direct.values[i] - conv.values[i]));
            den = std::max(den, std::abs(direct.values[i]));
        }
        rep.route_agreement = den > 0.0 ? num / den : num;
    }
    return rep;
}

double local_sup_constant(const std::vector<Signal>& ensemble, double p, double R)
{
    if (!(p > 0.0)) throw PreconditionError("local_sup_constant: p must be positive");
    if (!(R > 0.0)) throw PreconditionError("local_sup_constant: radius must be positive");
    double best = 0.0;
    for (const auto& f : ensemble) {
        const Signal phi = gaussian(f.grid);
        const PhaseField V = stft(f, phi);
        const Grid& tg = V.time;
        const Grid& fg = V.freq;
        const int d = tg.dim;
        const std::size_t N = V.points();
        const std::size_t n = tg.n;
        // ball offsets in index units along the 2d axes
        const long rx = static_cast<long>(std::floor(R / tg.h + 1e-9));
        const long rk = static_cast<long>(std::floor(R / fg.h + 1e-9));
        std::vector<std::vector<long>> offs;
        std::vector<long> cur(static_cast<std::size_t>(2 * d), 0);
        const auto rec = [&](auto&& self, int axis) -> void {
            if (axis == 2 * d) {
                double r2 = 0.0;
                for (int a = 0; a < 2 * d; ++a) {
                    const double step = a < d ? tg.h : fg.h;
                    r2 += std::pow(static_cast<double>(cur[static_cast<std::size_t>(a)]) * step, 2);
                }
                if (r2 <= R * R * (1.0 + 1e-12)) offs.push_back(cur);
                return;
            }
            const long lim = axis < d ? rx : rk;
            for (long o = -lim; o <= lim; ++o) {
                cur[static_cast<std::size_t>(axis)] = o;
                self(self, axis + 1);
            }
        };
        rec(rec, 0);
        double vmax = 0.0;
        for (const auto& z : V.values) vmax = std::max(vmax, std::abs(z));
        if (vmax == 0.0) continue;
        const double cell = V.cell();
        std::vector<double> local(N, 0.0);
        parallel_for(N, [&](std::size_t j) {
            std::size_t jj[2] = {0, 0}, kk[2] = {0, 0};
            detail::unflatten(j, d, n, jj);
            for (int a = 0; a < d; ++a)
                if (static_cast<long>(jj[a]) < rx || static_cast<long>(jj[a]) + rx >= static_cast<long>(n)) return;
            double m = 0.0;
            for (std::size_t k = 0; k < N; ++k) {
                detail::unflatten(k, d, n, kk);
                bool inside = true;
                for (int a = 0; a < d; ++a)
                    if (static_cast<long>(kk[a]) < rk || static_cast<long>(kk[a]) + rk >= static_cast<long>(n)) inside = false;
                if (!inside) continue;
                const double v0 = std::abs(V.at(j, k));
                if (v0 < 1e-6 * vmax) continue;
                double acc = 0.0;
                for (const auto& o : offs) {
                    std::size_t fx = 0, fk = 0;
                    for (int a = 0; a < d; ++a) {
                        fx = fx * n + static_cast<std::size_t>(static_cast<long>(jj[a]) + o[static_cast<std::size_t>(a)]);
                        fk = fk * n + static_cast<std::size_t>(static_cast<long>(kk[a]) + o[static_cast<std::size_t>(a + d)]);
                    }
                    const double v = std::abs(V.at(fx, fk));
                    if (std::isinf(p)) acc = std::max(acc, v);
                    else acc += std::pow(v, p) * cell;
                }
                const double ball = std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
                if (ball > 0.0) m = std::max(m, v0 / ball);
            }
            local[j] = m;
        });
        best = std::max(best, *std::max_element(local.begin(), local.end()));
    }
    return best;
}

StabilityReport local_sup_report(const std::vector<Source>& ensemble, const Grid& grid, double p, double R)
{
    StabilityReport rep;
    rep.base = local_sup_constant(sample_all(ensemble, grid), p, R);
    rep.refined = local_sup_constant(sample_all(ensemble, grid.refined()), p, R);
    rep.relative_change = rep.base > 0.0 ? std::abs(rep.refined / rep.base - 1.0) : 0.0;
    return rep;
}

PhaseField window_projection(const PhaseField& F, const Signal& phi1, const Signal& phi2, ProjectionRoute route)
{
    require_same_grid(F.time, phi1.grid, "window_projection");
    require_same_grid(F.time, phi2.grid, "window_projection");
    const double scale = 1.0 / (l2_norm(phi1) * l2_norm(phi2));
    if (!std::isfinite(scale)) throw PreconditionError("window_projection: zero window");
    if (route == ProjectionRoute::adjoint) return scaled(stft(stft_adjoint(F, phi1), phi2), scale);
    const PhaseField kernel = stft(phi1, phi2);
    return scaled(twisted_conv(kernel, F, TwistedForm::kappa1, FreqBoundary::periodic), scale);
}

} // namespace tfnorm
