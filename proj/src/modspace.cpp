#include "tfnorm/modspace.hpp"

#include "tfnorm/error.hpp"
#include "tfnorm/parallel.hpp"
#include "tfnorm/stft.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace tfnorm {
namespace {

std::string r_label(double r)
{
    if (std::isinf(r)) return "inf";
    std::ostringstream os;
    os << r;
    return os.str();
}

Weight moderator_of(const Weight& w)
{
    if (const Weight* m = w.moderator()) return *m;
    return unit_weight(w.dim());
}

double weighted_norm(const PhaseField& V, const Weight& w, const QbfSpec& backend)
{
    return mixed_norm(V, backend.with_weight(weight_product(w, backend.weight)));
}

} // namespace

ModSpec::ModSpec(Weight w, QbfSpec b, Source win) : weight(std::move(w)), backend(std::move(b)), window(std::move(win))
{
    if (weight.dim() != backend.phase_dim()) throw PreconditionError("modulation weight and backend dimensions differ");
}

ModSpec::ModSpec(Weight w, QbfSpec b) : ModSpec(w, b, gaussian_source(w.dim() / 2)) {}

void require_admissible_window(const Signal& window)
{
    double peak = 0.0;
    for (const auto& z : window.values) peak = std::max(peak, std::abs(z));
    if (peak == 0.0) throw PreconditionError("window must be nonzero");
    if (mass_outside_estimate(window) > 1e-6 * peak) throw PreconditionError("window is not contained in the grid box");
}

double modulation_norm(const Signal& f, const Signal& window, const Weight& w, const QbfSpec& backend)
{
    require_admissible_window(window);
    if (w.dim() != 2 * f.grid.dim) throw PreconditionError("modulation weight must live on R^{2d}");
    return weighted_norm(stft(f, window), w, backend);
}

double modulation_norm(const Signal& f, const ModSpec& spec)
{
    return modulation_norm(f, spec.window.on(f.grid), spec.weight, spec.backend);
}

double wiener_modulation_norm(const Signal& f, const Signal& window, double r, const Weight& w, const QbfSpec& backend,
                              double side)
{
    require_admissible_window(window);
    return wiener_norm(stft(f, window), WienerSpec(r, r, side, w, backend));
}

namespace {

EquivalenceReport equivalence_impl(const std::vector<std::string>& labels,
                                   const std::function<Signal(std::size_t, const Grid&)>& sample_signal, const Grid& grid,
                                   const std::vector<Source>& windows, const std::vector<double>& rs, const Weight& w,
                                   const QbfSpec& backend, double side)
{
    if (labels.empty()) throw PreconditionError("equivalence_report: empty ensemble");
    const double r0 = backend.r0();
    EquivalenceReport rep;
    rep.signals = labels;
    rep.columns.push_back("M[gauss]");
    rep.flagged.push_back(false);
    for (const auto& win : windows) {
        rep.columns.push_back("V[" + win.label + "]");
        rep.flagged.push_back(false);
    }
    for (const auto& win : windows)
        for (double r : rs) {
            rep.columns.push_back("W[" + win.label + ",r=" + r_label(r) + "]");
            rep.flagged.push_back(r < r0 - 1e-12);
        }

    const auto table = [&](const Grid& g) {
        const Signal phi0 = gaussian(g);
        std::vector<Signal> wins;
        for (const auto& win : windows) {
            wins.push_back(win.on(g));
            require_admissible_window(wins.back());
        }
        std::vector<std::vector<double>> out(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const Signal f = sample_signal(i, g);
            std::vector<double> row;
            row.push_back(weighted_norm(stft(f, phi0), w, backend));
            std::vector<PhaseField> V;
            for (const auto& win : wins) V.push_back(stft(f, win));
            for (const auto& Vi : V) row.push_back(weighted_norm(Vi, w, backend));
            for (const auto& Vi : V)
                for (double r : rs) row.push_back(wiener_norm(Vi, WienerSpec(r, r, side, w, backend)));
            out[i] = std::move(row);
        }
        return out;
    };
    rep.base = table(grid);
    rep.refined = table(grid.refined());

    const std::size_t C = rep.columns.size();
    for (std::size_t a = 0; a < C; ++a)
        for (std::size_t b = a + 1; b < C; ++b) {
            CrossRatio cr{rep.columns[a], rep.columns[b], inf, 0.0, inf, 0.0, 0.0};
            for (std::size_t i = 0; i < labels.size(); ++i) {
                const double q = rep.base[i][a] / rep.base[i][b];
                const double qr = rep.refined[i][a] / rep.refined[i][b];
                if (!std::isfinite(q) || !std::isfinite(qr) || q <= 0.0 || qr <= 0.0) rep.finite = false;
                cr.min = std::min(cr.min, q);
                cr.max = std::max(cr.max, q);
                cr.refined_min = std::min(cr.refined_min, qr);
                cr.refined_max = std::max(cr.refined_max, qr);
                cr.change = std::max(cr.change, std::abs(qr / q - 1.0));
            }
            if (std::isnan(cr.change)) cr.change = inf;
            rep.max_change = std::max(rep.max_change, cr.change);
            rep.ratios.push_back(std::move(cr));
        }
    return rep;
}

} // namespace

EquivalenceReport equivalence_report(const std::vector<Source>& ensemble, const Grid& grid,
                                     const std::vector<Source>& windows, const std::vector<double>& rs, const Weight& w,
                                     const QbfSpec& backend, double side)
{
    std::vector<std::string> labels;
    for (const auto& s : ensemble) labels.push_back(s.label);
    return equivalence_impl(
        labels, [&](std::size_t i, const Grid& g) { return ensemble[i].on(g); }, grid, windows, rs, w, backend, side);
}

EquivalenceReport equivalence_report(const std::vector<Signal>& ensemble, const std::vector<std::string>& labels,
                                     const std::vector<Source>& windows, const std::vector<double>& rs, const Weight& w,
                                     const QbfSpec& backend, double side)
{
    if (ensemble.empty()) throw PreconditionError("equivalence_report: empty ensemble");
    if (labels.size() != ensemble.size()) throw PreconditionError("equivalence_report: one label per signal required");
    const Grid& grid = ensemble.front().grid;
    if (grid.dim != 1) throw PreconditionError("equivalence_report: sampled ensembles must be one-dimensional");
    for (const auto& f : ensemble) require_same_grid(f.grid, grid, "equivalence_report");
    const Grid fine = grid.refined();
    return equivalence_impl(
        labels,
        [&](std::size_t i, const Grid& g) {
            if (same_grid(g, grid)) return ensemble[i];
            return Signal(fine, half_lattice(ensemble[i]));
        },
        grid, windows, rs, w, backend, side);
}

TransferConstants window_transfer_constants(const std::vector<Signal>& ensemble, const Signal& phi, double r,
                                            const Weight& w, const QbfSpec& backend, double side)
{
    if (ensemble.empty()) throw PreconditionError("window_transfer_constants: empty ensemble");
    require_admissible_window(phi);
    const Grid& g = phi.grid;
    const Signal phi0 = gaussian(g);
    const WienerSpec ws(r, r, side, w, backend);
    TransferConstants tc;
    for (const auto& f : ensemble) {
        require_same_grid(f.grid, g, "window_transfer_constants");
        const double a = wiener_norm(stft(f, phi), ws);
        const double b = wiener_norm(stft(f, phi0), ws);
        if (a == 0.0 || b == 0.0) continue;
        tc.c_a_raw = std::max(tc.c_a_raw, a / b);
        tc.c_b_raw = std::max(tc.c_b_raw, b / a);
    }
    const double r0 = backend.r0();
    const QbfSpec small(r0, r0, weight_product(backend.v0(), moderator_of(w)));
    tc.phi_norm = mixed_norm(stft(phi, phi0), small);
    const double theta = std::max(2.0 / r, 2.0);
    tc.c_a = tc.c_a_raw / tc.phi_norm;
    tc.c_b_plain = tc.c_b_raw * tc.phi_norm;
    tc.c_b = tc.c_b_plain * std::pow(tc.phi_norm / l2_norm(phi), -theta);
    return tc;
}

SandwichReport sandwich_check(const Signal& f, const Weight& w, const QbfSpec& backend)
{
    const Signal phi0 = gaussian(f.grid);
    const PhaseField V = stft(f, phi0);
    const Weight v0 = backend.v0();
    const double r0 = backend.r0();
    SandwichReport rep;
    rep.m_small = mixed_norm(V, QbfSpec(r0, r0, weight_product(w, v0)));
    rep.m_mid = weighted_norm(V, w, backend);
    rep.m_large = mixed_norm(V, QbfSpec(inf, inf, weight_product(w, weight_reciprocal(v0))));
    return rep;
}

EmbeddingReport embedding_ratio(const Weight& w1, const Weight& w2, const QbfSpec& backend,
                                const std::vector<Signal>& ensemble, const Box& box)
{
    EmbeddingReport rep;
    for (const auto& f : ensemble) {
        const PhaseField V = stft(f, gaussian(f.grid));
        const double a = weighted_norm(V, w1, backend);
        if (a == 0.0) continue;
        rep.ratio = std::max(rep.ratio, weighted_norm(V, w2, backend) / a);
    }
    Box b = box;
    b.dim = w1.dim();
    const double radius0[1] = {0.0};
    rep.weight_sup = tail_sup_ratio(w2, w1, radius0, b).front();
    return rep;
}

std::vector<double> compactness_diagnostic(const Weight& w1, const Weight& w2, const Grid& grid, double half_width,
                                           std::size_t m)
{
    if (m == 0) throw PreconditionError("compactness_diagnostic: need at least one probe");
    const int d = grid.dim;
    const auto probes = probe_family(w1, d, m, half_width);
    const Signal phi0 = gaussian(grid);
    const std::vector<double> s1 = w1.sample_phase(grid);
    const std::vector<double> s2 = w2.sample_phase(grid);
    std::vector<PhaseField> V(probes.size());
    parallel_for(probes.size(), [&](std::size_t k) { V[k] = stft(probes[k].on(grid), phi0); });
    const auto K = static_cast<Eigen::Index>(probes.size());
    Eigen::MatrixXcd G1(K, K), G2(K, K);
    const double cell = V.front().cell();
    for (Eigen::Index a = 0; a < K; ++a)
        for (Eigen::Index b = 0; b <= a; ++b) {
            cplx g1 = 0.0, g2 = 0.0;
            const auto& Va = V[static_cast<std::size_t>(a)].values;
            const auto& Vb = V[static_cast<std::size_t>(b)].values;
            for (std::size_t i = 0; i < Va.size(); ++i) {
                const cplx z = Va[i] * std::conj(Vb[i]);
                g1 += z * s1[i] * s1[i];
                g2 += z * s2[i] * s2[i];
            }
            G1(a, b) = cell * g1;
            G2(a, b) = cell * g2;
            G1(b, a) = std::conj(G1(a, b));
            G2(b, a) = std::conj(G2(a, b));
        }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(G2, G1);
    if (es.info() != Eigen::Success) throw InvariantViolation("compactness_diagnostic: probe Gram matrix is singular");
    std::vector<double> sv;
    for (Eigen::Index i = 0; i < K; ++i) sv.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i))));
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

} // namespace tfnorm
