#include "suite.hpp"

#include "../oracles.hpp"

#include "tfnorm/io.hpp"
#include "tfnorm/modspace.hpp"
#include "tfnorm/psido.hpp"
#include "tfnorm/stft.hpp"
#include "tfnorm/tfconv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace acceptance {

using namespace tfnorm;
using Kind = ToleranceCheck::Kind;

namespace {

ToleranceCheck at_most(std::string label, double measured, double tol) { return {std::move(label), measured, tol, Kind::at_most}; }
ToleranceCheck at_least(std::string label, double measured, double tol) { return {std::move(label), measured, tol, Kind::at_least}; }
ToleranceCheck finite(std::string label, double measured) { return {std::move(label), measured, inf, Kind::below}; }

double rel_diff(const CVec& a, const CVec& b)
{
    const double scale = oracle::max_abs(b);
    return scale > 0.0 ? oracle::max_abs_diff(a, b) / scale : oracle::max_abs(a);
}

Source atom(double x0, double xi0, double width = 1.0) { return atom_source(Atom{{x0}, {xi0}, width, 1.0}, "atom"); }

Source random_atom_sum(Rng& rng, int terms = 3)
{
    Source s;
    for (int i = 0; i < terms; ++i)
        s.atoms.push_back(Atom{{rng.uniform(-1.0, 1.0)}, {rng.uniform(-0.5, 0.5)}, rng.uniform(1.0, 1.2), rng.complex_normal()});
    s.label = "atoms";
    return s;
}

SymbolSource random_symbol(Rng& rng, int terms = 3)
{
    struct Bump {
        double x0, xi0;
        cplx c;
    };
    std::vector<Bump> bumps;
    for (int i = 0; i < terms; ++i) bumps.push_back({rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.complex_normal()});
    return [bumps](double x, double xi) {
        cplx s = 0.0;
        for (const auto& b : bumps) s += b.c * std::exp(-0.5 * (x - b.x0) * (x - b.x0) - (xi - b.xi0) * (xi - b.xi0) / 8.0);
        return s;
    };
}

PhaseField random_field(const Grid& g, Rng& rng)
{
    PhaseField F = PhaseField::zeros(g);
    for (auto& v : F.values) v = rng.complex_normal();
    return F;
}

double truncation_ratio(const Signal& f)
{
    const double peak = oracle::max_abs(f.values);
    return peak > 0.0 ? mass_outside_estimate(f) / peak : 0.0;
}

const Quantization all_quant[] = {Quantization::kohn_nirenberg(), Quantization::weyl(), Quantization::anti()};

// 1
std::vector<ToleranceCheck> gaussian_stft(const SuiteOptions& o)
{
    const Grid g = make_grid(1, 128, 0.25);
    const Signal phi = gaussian(g);
    Rng rng(o.seed);
    double err = 0.0;
    for (int t = 0; t < 5; ++t) {
        const double y = rng.uniform(-3, 3), eta = rng.uniform(-3, 3);
        const PhaseField V = stft(atom(y, eta).on(g), phi);
        for (std::size_t j = 0; j < g.n; ++j)
            for (std::size_t k = 0; k < g.n; ++k)
                err = std::max(err, std::abs(std::abs(V.at(j, k)) -
                                             oracle::gaussian_stft_modulus(g.coord(0, j), V.freq.coord(0, k), y, eta)));
    }
    return {at_most("max_modulus_error", err, 1e-6)};
}

// 2
std::vector<ToleranceCheck> moyal(const SuiteOptions& o)
{
    const Grid g = make_grid(1, 96, 0.25);
    Rng rng(o.seed);
    double defect = 0.0, trunc = 0.0;
    const int count = o.quick ? 5 : 20;
    for (int t = 0; t < count; ++t) {
        const Signal f = random_bandlimited(rng, 1, 3, 2.0).on(g);
        const Signal h = random_bandlimited(rng, 1, 3, 2.0).on(g);
        const Signal p1 = atom(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.8, 1.25)).on(g);
        const Signal p2 = atom(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.8, 1.25)).on(g);
        for (const Signal* s : {&f, &h, &p1, &p2}) trunc = std::max(trunc, truncation_ratio(*s));
        defect = std::max(defect, moyal_defect(f, h, p1, p2));
    }
    return {at_most("truncation_budget", trunc, 1e-8), at_most("max_moyal_defect", defect, 1e-8)};
}

// 3
std::vector<ToleranceCheck> inversion(const SuiteOptions& o)
{
    const Grid g = make_grid(1, 96, 0.25);
    const Signal phi = gaussian(g);
    Rng rng(o.seed);
    std::vector<Source> ens{gaussian_source(1)};
    const int count = o.quick ? 3 : 10;
    for (int i = 0; i < count; ++i) ens.push_back(random_bandlimited(rng, 1));
    double defect = 0.0;
    for (const auto& s : ens) defect = std::max(defect, reconstruction_defect(s.on(g), phi));
    return {at_most("max_reconstruction_defect", defect, 1e-5)};
}

// 4
std::vector<ToleranceCheck> norm_equivalence(const SuiteOptions& o)
{
    const Grid g = make_grid(1, 128, 0.25);
    Rng rng(o.seed);
    std::vector<Source> ens{gaussian_source(1)};
    const int count = o.quick ? 3 : 9;
    for (int i = 0; i < count; ++i) ens.push_back(random_bandlimited(rng, 1));
    const std::vector<Source> windows{gaussian_source(1), window_source("gauss:dilate=2"), window_source("gauss:shift=1")};
    std::vector<std::pair<std::string, QbfSpec>> backends{{"L11", lebesgue(1, 1, 1)}, {"L21", lebesgue(2, 1, 1)},
                                                          {"L.5.5", lebesgue(0.5, 0.5, 1)}};
    std::vector<std::pair<std::string, Weight>> weights{
        {"1", unit_weight(2)}, {"poly1", polynomial_weight(1, 2)}, {"subexp.5", subexp_weight(0.5, 1, 2)}};
    if (o.quick) {
        backends.pop_back();
        weights.pop_back();
    }
    double worst = 0.0, all_finite = 1.0;
    for (const auto& [bn, B] : backends)
        for (const auto& [wn, W] : weights) {
            const auto rep = equivalence_report(ens, g, windows, {B.r0(), 1.0, inf}, W, B);
            if (!rep.finite) all_finite = 0.0;
            worst = std::max(worst, rep.max_change);
        }
    return {at_least("all_ratios_finite", all_finite, 1.0), at_most("max_ratio_change", worst, 0.05)};
}

// 5
std::vector<ToleranceCheck> wiener_order(const SuiteOptions& o)
{
    const Grid g = make_grid(1, 16, 0.5);
    Rng rng(o.seed);
    const Weight weights[] = {unit_weight(2), polynomial_weight(1, 2), subexp_weight(0.5, 1, 2)};
    const QbfSpec backends[] = {lebesgue(1, 1, 1), lebesgue(2, 1, 1), lebesgue(0.5, 0.5, 1)};
    double mono = 0.0, sandwich = 0.0;
    const int count = o.quick ? 10 : 50;
    for (int t = 0; t < count; ++t) {
        const PhaseField F = random_field(g, rng);
        const WienerSpec ws(1, 1, 1.0, weights[t % 3], backends[(t / 3) % 3]);
        std::vector<double> rs{0.5, ws.seq.r0(), 1.0, 2.0, inf};
        std::sort(rs.begin(), rs.end());
        rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
        double prev_diag = 0.0, prev_inner = 0.0;
        for (double r : rs) {
            const double diag = wiener_norm(F, ws.with_r(r, r));
            const double inner = wiener_norm(F, ws.with_r(r, 1.0));
            if (diag < prev_diag) mono += 1.0;
            if (inner < prev_inner) mono += 1.0;
            prev_diag = diag;
            prev_inner = inner;
        }
        if (!(backend_norm_cells(F, ws) <= wiener_norm(F, ws.with_r(inf, inf)))) sandwich += 1.0;
    }
    return {at_most("monotonicity_violations", mono, 0.0), at_most("sandwich_violations", sandwich, 0.0)};
}

// 6
std::vector<ToleranceCheck> assist_identities(const SuiteOptions&)
{
    const Grid g = make_grid(1, 96, 0.25);
    const std::vector<Signal> ens{gaussian(g), atom(1.0, 0.5).on(g), atom(-1.5, -1.0).on(g)};
    const std::vector<std::pair<Signal, Signal>> windows{{gaussian(g), gaussian(g)},
                                                         {gaussian(g), window_source("gauss:dilate=0.8").on(g)}};
    double conv = 0.0, mult = 0.0;
    for (const auto& f : ens)
        for (const auto& h : ens)
            for (const auto& [phi, psi] : windows) {
                conv = std::max(conv, conv_identity_defect(f, h, phi, psi));
                mult = std::max(mult, mult_identity_defect(f, h, phi, psi));
            }
    return {at_most("convolution_defect", conv, 1e-5), at_most("multiplication_defect", mult, 1e-5)};
}

// 7
std::vector<ToleranceCheck> phase_convolutions(const SuiteOptions& o)
{
    Rng rng(o.seed);
    const Grid g = make_grid(1, 16, 0.5);
    const PhaseField F = random_field(g, rng), G = random_field(g, rng);
    const double theta0 = rel_diff(theta_conv(F, G, PhaseKernel::zero()).values,
                                   oracle::theta_conv_x(F, G, [](double, double, double) { return 0.0; }).values);
    const PhaseField k1 = twisted_conv(F, G, TwistedForm::kappa1);
    const double kappa = rel_diff(twisted_conv(F, G, TwistedForm::kappa2).values, k1.values);

    const Grid gp = make_grid(1, 48, 0.5);
    const Signal phi1 = gaussian(gp);
    const Signal phi2 = window_source("gauss:dilate=1.2,shift=0.5").on(gp);
    PhaseField H = PhaseField::zeros(gp);
    for (std::size_t j = 0; j < gp.n; ++j)
        for (std::size_t k = 0; k < gp.n; ++k) {
            const double x = gp.coord(0, j);
            H.at(j, k) = rng.complex_normal() * std::exp(-x * x / 2.0);
        }
    const double routes = rel_diff(window_projection(H, phi1, phi2, ProjectionRoute::twisted).values,
                                   window_projection(H, phi1, phi2, ProjectionRoute::adjoint).values);
    const PhaseField V = stft(random_bandlimited(rng, 1, 3, 2.0).on(gp), phi1);
    const double repro = rel_diff(window_projection(V, phi1, phi1).values, V.values);
    return {at_most("theta0_vs_direct_sum", theta0, 1e-10), at_most("kappa1_vs_kappa2", kappa, 1e-10),
            at_most("projection_routes", routes, 1e-8), at_most("projection_reproduces_stft", repro, 1e-6)};
}

// 8
std::vector<ToleranceCheck> quantization(const SuiteOptions& o)
{
    Rng rng(o.seed);
    const Grid g = make_grid(1, 32, 0.5);
    const Signal f = random_atom_sum(rng).on(g);
    double identity = 0.0;
    for (const auto& A : all_quant) {
        const SymbolField one = sample_symbol(g, [](double, double) { return cplx(1.0); }, A);
        identity = std::max(identity, oracle::max_abs_diff(apply_op(one, f).values, f.values));
    }
    double conversion = 0.0;
    for (int t = 0; t < (o.quick ? 1 : 3); ++t) {
        const SymbolField kn = sample_symbol(g, random_symbol(rng), Quantization::kohn_nirenberg());
        const SymbolField w = quantization_convert(kn, Quantization::weyl());
        conversion = std::max(conversion, frobenius_gap(kernel_from_symbol(w), kernel_from_symbol(kn)));
        const SymbolField back = quantization_convert(w, Quantization::kohn_nirenberg());
        conversion = std::max(conversion, frobenius_gap(kernel_from_symbol(back), kernel_from_symbol(kn)));
    }
    const Grid gr = make_grid(1, 64, 0.5);
    const std::vector<std::pair<Signal, Signal>> pairs{{gaussian(gr), atom(1.0, -0.5).on(gr)},
                                                       {random_atom_sum(rng).on(gr), random_atom_sum(rng).on(gr)}};
    double rank_one = 0.0;
    for (const auto& [f1, f2] : pairs)
        for (const auto& A : all_quant) rank_one = std::max(rank_one, rank_one_defect(f1, f2, A));
    return {at_most("op_of_one_minus_identity", identity, 1e-8), at_most("kn_weyl_kernel_gap", conversion, 1e-6),
            at_most("rank_one_defect", rank_one, 1e-6)};
}

// 9
std::vector<ToleranceCheck> toeplitz_routes(const SuiteOptions&)
{
    const Grid g = make_grid(1, 32, 0.5);
    const SymbolSource a = [](double x, double xi) {
        return cplx(std::exp(-(x * x + xi * xi) / 8.0), 0.3 * std::exp(-(x - 1.0) * (x - 1.0) / 4.0));
    };
    PhaseField F = PhaseField::zeros(g);
    for (std::size_t j = 0; j < g.n; ++j)
        for (std::size_t k = 0; k < g.n; ++k) F.at(j, k) = a(g.coord(0, j), F.freq.coord(0, k));
    double gap = 0.0;
    const std::vector<std::pair<Signal, Signal>> windows{{gaussian(g), gaussian(g)}, {gaussian(g), atom(0.5, 0.5).on(g)}};
    for (const auto& [p1, p2] : windows)
        gap = std::max(gap, frobenius_gap(kernel_from_symbol(toeplitz_weyl_symbol(F, p1, p2)), toeplitz_matrix(F, p1, p2)));
    return {at_most("direct_vs_weyl_gap", gap, 1e-5)};
}

std::vector<ToleranceCheck> cert_checks(const std::string& prefix, const Config& cfg)
{
    const CertRun run = run_theorem(cfg, cfg.get("theorem"));
    std::vector<ToleranceCheck> out;
    for (auto c : run.checks) {
        c.label = prefix + ":" + c.label;
        out.push_back(std::move(c));
    }
    return out;
}

Config load_cert(const SuiteOptions& o, const std::string& file) { return Config::load(o.certs_dir + "/" + file); }

// 10
std::vector<ToleranceCheck> boundedness(const SuiteOptions& o)
{
    std::vector<ToleranceCheck> out;
    for (const auto& [name, file] : {std::pair{"multiplication", "multiplication.cfg"},
                                     {"gaussian_decay", "gaussian_decay.cfg"},
                                     {"toeplitz_poly", "toeplitz_poly.cfg"}}) {
        const auto c = cert_checks(name, load_cert(o, file));
        out.insert(out.end(), c.begin(), c.end());
    }
    return out;
}

// 11
std::vector<ToleranceCheck> compactness(const SuiteOptions&)
{
    const Grid g = make_grid(1, 64, 0.25);
    const auto decay = compactness_diagnostic(unit_weight(2), subexp_weight(-1.0, 1.0, 2), g, 4.0, 9);
    const Weight w = polynomial_weight(1.0, 2);
    const auto flat = compactness_diagnostic(w, w, g, 4.0, 9);
    return {at_most("decaying_last_over_first", decay.back() / decay.front(), 0.1),
            at_least("equal_last_over_first", flat.back() / flat.front(), 0.5)};
}

// 12
std::vector<ToleranceCheck> lifting(const SuiteOptions& o) { return cert_checks("lifting", load_cert(o, "lifting.cfg")); }

struct Entry {
    int id;
    const char* name;
    std::vector<ToleranceCheck> (*run)(const SuiteOptions&);
};

const Entry entries[] = {
    {1, "gaussian-stft-closed-form", gaussian_stft},
    {2, "moyal-identity", moyal},
    {3, "stft-inversion", inversion},
    {4, "norm-equivalence", norm_equivalence},
    {5, "wiener-monotonicity-and-sandwich", wiener_order},
    {6, "stft-convolution-multiplication", assist_identities},
    {7, "phase-space-convolutions", phase_convolutions},
    {8, "quantization", quantization},
    {9, "toeplitz-routes", toeplitz_routes},
    {10, "boundedness-certificates", boundedness},
    {11, "compactness-diagnostic", compactness},
    {12, "lifting", lifting},
};

CriterionResult run_entry(const Entry& e, const SuiteOptions& o)
{
    CriterionResult r{e.id, e.name, {}, {}};
    try {
        r.checks = e.run(o);
    } catch (const std::exception& ex) {
        r.error = ex.what();
    }
    return r;
}

std::string serialize(const std::vector<CriterionResult>& results, const SuiteOptions& o)
{
    std::ostringstream os;
    write_report(os, results, o);
    return os.str();
}

} // namespace

bool CriterionResult::pass() const
{
    if (!error.empty() || checks.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const ToleranceCheck& c) { return c.pass(); });
}

std::string default_certs_dir() { return TFNORM_SOURCE_DIR "/certs"; }

std::vector<CriterionResult> run_suite(const SuiteOptions& opts, const std::function<void(const CriterionResult&)>& on_result)
{
    SuiteOptions o = opts;
    if (o.certs_dir.empty()) o.certs_dir = default_certs_dir();
    std::vector<CriterionResult> results;
    for (const auto& e : entries) {
        results.push_back(run_entry(e, o));
        if (on_result) on_result(results.back());
    }

    // 13: a second run with the same seed must serialize to the same bytes.
    CriterionResult det{13, "determinism", {}, {}};
    try {
        std::vector<CriterionResult> again;
        for (const auto& e : entries) again.push_back(run_entry(e, o));
        const std::string a = serialize(results, o), b = serialize(again, o);
        std::size_t diff = 0;
        for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i)
            if (i >= a.size() || i >= b.size() || a[i] != b[i]) ++diff;
        det.checks = {at_most("differing_report_bytes", static_cast<double>(diff), 0.0)};
    } catch (const std::exception& ex) {
        det.error = ex.what();
    }
    results.push_back(det);
    if (on_result) on_result(results.back());
    return results;
}

void write_report(std::ostream& os, const std::vector<CriterionResult>& results, const SuiteOptions& opts)
{
    os << "# tfnorm acceptance seed=" << opts.seed << " mode=" << (opts.quick ? "quick" : "full") << '\n';
    os << "criterion,name,check,measured,relation,tolerance,pass\n";
    for (const auto& r : results) {
        if (!r.error.empty()) {
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            os << r.id << ',' << r.name << ",error: " << msg << ",nan,,,fail\n";
            continue;
        }
        for (const auto& c : r.checks)
            os << r.id << ',' << r.name << ',' << c.label << ',' << format_double(c.measured) << ',' << c.relation() << ','
               << format_double(c.tolerance) << ',' << (c.pass() ? "pass" : "fail") << '\n';
    }
}

std::string summary_line(const CriterionResult& r)
{
    std::string line = std::string(r.pass() ? "PASS" : "FAIL") + " " + (r.id < 10 ? " " : "") + std::to_string(r.id) + " " + r.name;
    if (!r.error.empty()) return line + "  error: " + r.error;
    for (std::size_t i = 0; i < r.checks.size(); ++i) {
        const auto& c = r.checks[i];
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3g", c.measured);
        char tol[64];
        std::snprintf(tol, sizeof tol, "%.3g", c.tolerance);
        line += (i ? "; " : "  ") + c.label + "=" + buf + " " + c.relation() + " " + tol;
    }
    return line;
}

} // namespace acceptance
