#include "tfnorm/runner.hpp"

#include "tfnorm/error.hpp"
#include "tfnorm/psido.hpp"
#include "tfnorm/stft.hpp"
#include "tfnorm/tfconv.hpp"

#include <cmath>
#include <ostream>

namespace tfnorm {
namespace {

constexpr double default_change = 0.1;

CertRun from_certificate(const Certificate& c, const Config& cfg)
{
    CertRun run;
    run.name = c.name;
    run.values.emplace_back("hypotheses_ok", c.hypotheses_ok ? 1.0 : 0.0);
    run.values.emplace_back("weight_constant", c.weight_constant);
    run.values.emplace_back("constant", c.constant);
    run.values.emplace_back("refined", c.refined);
    run.values.emplace_back("relative_change", c.relative_change);
    for (const auto& d : c.details) run.values.push_back(d);
    run.checks.push_back({"hypotheses_ok", c.hypotheses_ok ? 1.0 : 0.0, 1.0, ToleranceCheck::Kind::at_least});
    run.checks.push_back({"weight_constant", c.weight_constant, inf, ToleranceCheck::Kind::below});
    run.checks.push_back({"constant", c.constant, inf, ToleranceCheck::Kind::below});
    run.checks.push_back({"relative_change", c.relative_change, cfg.number_or("tolerance.change", default_change)});
    return run;
}

Weight weight_key(const Config& cfg, const std::string& key, int dim)
{
    return parse_weight(cfg.get_or(key, "1"), dim);
}

QbfSpec backend_key(const Config& cfg) { return parse_backend(cfg.get_or("backend", "Lpq:p=2,q=2"), 2); }

Source window_key(const Config& cfg, const std::string& key) { return window_source(cfg.get_or(key, "gauss"), 1); }

std::vector<Source> ensemble_of(const Config& cfg)
{
    auto ens = generate_ensemble(ensemble_from_config(cfg));
    if (ens.empty()) throw ParseError("ensemble.count must be positive");
    return ens;
}

CertRun run_pseudocont(const Config& cfg)
{
    const Grid grid = grid_from_config(cfg);
    PsidoSetup s{parse_quantization(cfg.get_or("quant", "kn")), weight_key(cfg, "w0", 4), weight_key(cfg, "w1", 2),
                 weight_key(cfg, "w2", 2), backend_key(cfg)};
    s.margin = cfg.number_or("margin", s.margin);
    return from_certificate(psido_bound_certificate(parse_symbol(cfg.get("symbol")), ensemble_of(cfg), grid, s), cfg);
}

CertRun run_toeplitz(const Config& cfg)
{
    const Grid grid = grid_from_config(cfg);
    ToeplitzSetup s{window_key(cfg, "phi1"),       window_key(cfg, "phi2"),       weight_key(cfg, "w", 4),
                    weight_key(cfg, "w1", 2),      weight_key(cfg, "w2", 2),      weight_key(cfg, "theta1", 2),
                    weight_key(cfg, "theta2", 2),  backend_key(cfg)};
    s.q = cfg.number_or("q", s.q);
    s.r = cfg.number_or("r", s.r);
    s.margin = cfg.number_or("margin", s.margin);
    return from_certificate(toeplitz_bound_certificate(parse_symbol(cfg.get("symbol")), ensemble_of(cfg), grid, s), cfg);
}

CertRun run_lifting(const Config& cfg)
{
    const Grid grid = grid_from_config(cfg);
    const LiftingReport r = lifting_check(weight_key(cfg, "w0", 2), window_key(cfg, "window"), weight_key(cfg, "w", 2),
                                          backend_key(cfg), ensemble_of(cfg), grid);
    CertRun run;
    run.name = "lifting";
    run.values = {{"matrix_cond", r.matrix_cond},
                  {"refined_matrix_cond", r.refined_matrix_cond},
                  {"forward", r.forward},
                  {"refined_forward", r.refined_forward},
                  {"inverse", r.inverse},
                  {"refined_inverse", r.refined_inverse},
                  {"singular", r.singular ? 1.0 : 0.0},
                  {"moderate_w0", r.moderate_w0},
                  {"moderate_w", r.moderate_w}};
    const double tol = cfg.number_or("tolerance.change", default_change);
    const double cond = cfg.number_or("tolerance.cond", 1e8);
    run.checks = {{"matrix_cond", r.matrix_cond, cond, ToleranceCheck::Kind::below},
                  {"refined_matrix_cond", r.refined_matrix_cond, cond, ToleranceCheck::Kind::below},
                  {"forward", r.forward, inf, ToleranceCheck::Kind::below},
                  {"inverse", r.inverse, inf, ToleranceCheck::Kind::below},
                  {"forward_change", r.forward_change(), tol},
                  {"inverse_change", r.inverse_change(), tol}};
    return run;
}

CertRun run_assist(const Config& cfg, bool conv)
{
    const Grid grid = grid_from_config(cfg, 96, 0.25);
    const auto ens = sample_all(ensemble_of(cfg), grid);
    const Signal phi = window_key(cfg, "window1").on(grid);
    const Signal psi = window_key(cfg, "window2").on(grid);
    double worst = 0.0;
    for (const auto& f : ens)
        for (const auto& g : ens)
            worst = std::max(worst, conv ? conv_identity_defect(f, g, phi, psi) : mult_identity_defect(f, g, phi, psi));
    CertRun run;
    run.name = conv ? "assist-conv" : "assist-mult";
    run.values.emplace_back("max_defect", worst);
    run.checks.push_back({"max_defect", worst, cfg.number_or("tolerance.defect", 1e-5)});
    return run;
}

CertRun run_young(const Config& cfg)
{
    const Grid grid = grid_from_config(cfg);
    const auto ens = ensemble_of(cfg);
    std::vector<FieldSource> fields;
    for (const auto& s : ens) fields.push_back([s](const Grid& g) { return stft(s.on(g), gaussian(g)); });
    WienerYoungSetup s{YoungExponents{cfg.number_or("p0", 1.0), cfg.number_or("p1", 1.0), cfg.number_or("p2", 1.0)},
                       parse_backend(cfg.get_or("backend", "Lpq:p=1,q=1"), 2), weight_key(cfg, "w0", 2),
                       weight_key(cfg, "w1", 2), weight_key(cfg, "w2", 2), std::nullopt};
    s.side = cfg.number_or("side", s.side);
    return from_certificate(wiener_young_certificate(fields, fields, grid, s), cfg);
}

CertRun run_product(const Config& cfg, bool conv)
{
    const Grid grid = grid_from_config(cfg);
    const auto ens = ensemble_of(cfg);
    const ModulationProductSetup s{backend_key(cfg), weight_key(cfg, "w0", 2), weight_key(cfg, "w1", 2),
                                   weight_key(cfg, "w2", 2)};
    return from_certificate(conv ? mod_conv_certificate(ens, ens, grid, s) : mod_mult_certificate(ens, ens, grid, s), cfg);
}

CertRun run_classical(const Config& cfg)
{
    const Grid grid = grid_from_config(cfg);
    const auto ens = ensemble_of(cfg);
    const ClassicalExponents e{cfg.number_or("p0", 1.0), cfg.number_or("q0", 1.0), cfg.number_or("p1", 1.0),
                               cfg.number_or("q1", 1.0), cfg.number_or("p2", 1.0), cfg.number_or("q2", inf)};
    return from_certificate(classical_conv_certificate(ens, ens, grid, e, weight_key(cfg, "w0", 2), weight_key(cfg, "w1", 2),
                                                       weight_key(cfg, "w2", 2)),
                            cfg);
}

} // namespace

bool ToleranceCheck::pass() const
{
    if (std::isnan(measured)) return false;
    switch (kind) {
    case Kind::at_most:
        return measured <= tolerance;
    case Kind::at_least:
        return measured >= tolerance;
    case Kind::below:
        return measured < tolerance;
    }
    return false;
}

const char* ToleranceCheck::relation() const
{
    switch (kind) {
    case Kind::at_most:
        return "<=";
    case Kind::at_least:
        return ">=";
    case Kind::below:
        return "<";
    }
    return "?";
}

bool CertRun::pass() const
{
    for (const auto& c : checks)
        if (!c.pass()) return false;
    return true;
}

CertRun run_theorem(const Config& cfg, const std::string& theorem)
{
    if (theorem == "pseudocont2") return run_pseudocont(cfg);
    if (theorem == "toeplitz-cont") return run_toeplitz(cfg);
    if (theorem == "lifting") return run_lifting(cfg);
    throw ParseError("unknown theorem '" + theorem + "'");
}

CertRun run_conv_lemma(const Config& cfg, const std::string& lemma)
{
    if (lemma == "assist-conv") return run_assist(cfg, true);
    if (lemma == "assist-mult") return run_assist(cfg, false);
    if (lemma == "young") return run_young(cfg);
    if (lemma == "mod-conv") return run_product(cfg, true);
    if (lemma == "mod-mult") return run_product(cfg, false);
    if (lemma == "classical") return run_classical(cfg);
    throw ParseError("unknown lemma '" + lemma + "'");
}

void write_cert_report(std::ostream& os, const CertRun& run, const Config& cfg)
{
    os << "# certificate " << run.name << '\n';
    for (const auto& [k, v] : cfg.entries()) os << "# " << k << " = " << v << '\n';
    os << "kind,key,measured,relation,tolerance,pass\n";
    for (const auto& [k, v] : run.values) os << "value," << k << ',' << format_double(v) << ",,,\n";
    for (const auto& c : run.checks)
        os << "check," << c.label << ',' << format_double(c.measured) << ',' << c.relation() << ','
           << format_double(c.tolerance) << ',' << (c.pass() ? "pass" : "fail") << '\n';
    os << "result," << run.name << ",,,," << (run.pass() ? "pass" : "fail") << '\n';
}

} // namespace tfnorm
