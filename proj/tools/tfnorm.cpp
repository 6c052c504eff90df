#include "suite.hpp"

#include "tfnorm/error.hpp"
#include "tfnorm/io.hpp"
#include "tfnorm/modspace.hpp"
#include "tfnorm/psido.hpp"
#include "tfnorm/runner.hpp"
#include "tfnorm/stft.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace tfnorm;
namespace fs = std::filesystem;

namespace {

constexpr int exit_failed = 1;
constexpr int exit_input = 2;
constexpr int exit_invariant = 3;

/// Output file when a path is given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path)
    {
        if (path.empty()) return;
        file_.emplace(path);
        if (!*file_) throw ParseError("cannot write " + path);
    }
    std::ostream& stream() { return file_ ? static_cast<std::ostream&>(*file_) : std::cout; }

private:
    std::optional<std::ofstream> file_;
};

/// Comma-separated window specs; "gauss:dilate=2,shift=1" stays one entry.
std::vector<std::string> split_windows(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string tok; std::getline(is, tok, ',');) {
        const bool continues = !out.empty() && (tok.rfind("dilate=", 0) == 0 || tok.rfind("shift=", 0) == 0 ||
                                                tok.rfind("mod=", 0) == 0);
        if (continues)
            out.back() += "," + tok;
        else
            out.push_back(tok);
    }
    if (out.empty()) throw ParseError("no windows given");
    return out;
}

std::vector<double> split_numbers(const std::string& text)
{
    std::vector<double> out;
    std::istringstream is(text);
    for (std::string tok; std::getline(is, tok, ',');) out.push_back(parse_double(tok));
    if (out.empty()) throw ParseError("empty number list");
    return out;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + '"';
}

void write_equivalence(std::ostream& os, const EquivalenceReport& r, const std::string& meta)
{
    os << "# equivalence " << meta << '\n';
    os << "kind,first,second,base,refined,min,max,refined_min,refined_max,change\n";
    for (std::size_t i = 0; i < r.signals.size(); ++i)
        for (std::size_t c = 0; c < r.columns.size(); ++c)
            os << "norm," << csv_field(r.signals[i]) << ',' << csv_field(r.columns[c]) << ',' << format_double(r.base[i][c]) << ','
               << format_double(r.refined[i][c]) << ",,,,,\n";
    for (const auto& x : r.ratios)
        os << "ratio," << csv_field(x.a) << ',' << csv_field(x.b) << ",,," << format_double(x.min) << ',' << format_double(x.max) << ','
           << format_double(x.refined_min) << ',' << format_double(x.refined_max) << ',' << format_double(x.change) << '\n';
    os << "summary,max_change,,,,,,,," << format_double(r.max_change) << '\n';
    os << "summary,finite,,,,,,,," << (r.finite ? 1 : 0) << '\n';
}

void write_matrix_gap(std::ostream& os, const std::string& route, double gap)
{
    os << "route,frobenius_gap\n" << route << ',' << format_double(gap) << '\n';
}

Config load_config(const std::string& path)
{
    if (!fs::exists(path)) throw ParseError("cannot open " + path);
    return Config::load(path);
}

int finish_cert(const CertRun& run, const Config& cfg, const std::string& report)
{
    Output out(report);
    write_cert_report(out.stream(), run, cfg);
    if (!report.empty()) std::cout << "result," << run.name << ',' << (run.pass() ? "pass" : "fail") << '\n';
    return run.pass() ? 0 : exit_failed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Time-frequency norms, certificates and operator checks"};
    app.require_subcommand(1);
    int code = 0;

    // stft
    std::string stft_in, stft_window = "gauss", stft_out;
    auto* stft_cmd = app.add_subcommand("stft", "Short-time Fourier transform of a sampled signal");
    stft_cmd->add_option("--in", stft_in, "Signal CSV")->required();
    stft_cmd->add_option("--window", stft_window, "Window spec");
    stft_cmd->add_option("--out", stft_out, "Phase-space CSV (stdout when omitted)");
    stft_cmd->callback([&] {
        const Signal f = read_signal_file(stft_in);
        const Signal phi = window_source(stft_window, f.grid.dim).on(f.grid);
        Output out(stft_out);
        write_phase_csv(out.stream(), stft(f, phi));
    });

    // norm
    std::string norm_in, norm_space, norm_window = "gauss";
    auto* norm_cmd = app.add_subcommand("norm", "Norm of a sampled signal in a modulation or Wiener space");
    norm_cmd->add_option("--in", norm_in, "Signal CSV")->required();
    norm_cmd->add_option("--space", norm_space, "Space spec")->required();
    norm_cmd->add_option("--window", norm_window, "Window spec");
    norm_cmd->callback([&] {
        const Signal f = read_signal_file(norm_in);
        const SpaceSpec space = parse_space(norm_space, f.grid.dim);
        const Signal phi = window_source(norm_window, f.grid.dim).on(f.grid);
        std::cout << "space,window,norm\n"
                  << csv_field(norm_space) << ',' << csv_field(norm_window) << ',' << format_double(space_norm(f, phi, space))
                  << '\n';
    });

    // equiv
    std::string eq_dir, eq_windows = "gauss,gauss:dilate=2,gauss:shift=1", eq_rs = "1,inf", eq_weight = "1",
                        eq_backend = "Lpq:p=2,q=2", eq_report;
    std::size_t eq_count = 10, eq_n = 128;
    double eq_h = 0.25, eq_spread = 3.0, eq_side = 1.0;
    int eq_terms = 5;
    std::uint64_t eq_seed = 42;
    auto* eq_cmd = app.add_subcommand("equiv", "Norm-equivalence report over an ensemble");
    auto* eq_dir_opt = eq_cmd->add_option("--ensemble", eq_dir, "Directory of signal CSV files");
    eq_cmd->add_option("--count", eq_count, "Generated ensemble size")->excludes(eq_dir_opt);
    eq_cmd->add_option("--seed", eq_seed, "Seed of the generated ensemble");
    eq_cmd->add_option("--spread", eq_spread, "Centre and frequency range of generated signals");
    eq_cmd->add_option("--terms", eq_terms, "Atoms per generated signal");
    eq_cmd->add_option("--grid-n", eq_n, "Points of the generated grid");
    eq_cmd->add_option("--grid-h", eq_h, "Step of the generated grid");
    eq_cmd->add_option("--windows", eq_windows, "Comma-separated window specs");
    eq_cmd->add_option("--rs", eq_rs, "Local Wiener exponents");
    eq_cmd->add_option("--weight", eq_weight, "Weight on phase space");
    eq_cmd->add_option("--backend", eq_backend, "Backend spec");
    eq_cmd->add_option("--side", eq_side, "Wiener cell side");
    eq_cmd->add_option("--report", eq_report, "Report CSV (stdout when omitted)");
    eq_cmd->callback([&] {
        std::vector<Source> windows;
        for (const auto& w : split_windows(eq_windows)) windows.push_back(window_source(w, 1));
        const std::vector<double> rs = split_numbers(eq_rs);
        const Weight w = parse_weight(eq_weight, 2);
        const QbfSpec B = parse_backend(eq_backend, 2);
        EquivalenceReport rep;
        std::string meta;
        if (!eq_dir.empty()) {
            if (!fs::is_directory(eq_dir)) throw ParseError("not a directory: " + eq_dir);
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(eq_dir))
                if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
            std::sort(files.begin(), files.end());
            if (files.empty()) throw ParseError("no .csv files in " + eq_dir);
            std::vector<Signal> ens;
            std::vector<std::string> labels;
            for (const auto& p : files) {
                ens.push_back(read_signal_file(p.string()));
                labels.push_back(p.stem().string());
            }
            rep = equivalence_report(ens, labels, windows, rs, w, B, eq_side);
            meta = "ensemble=" + fs::path(eq_dir).filename().string();
        } else {
            const auto ens = generate_ensemble(EnsembleSpec{eq_count, eq_spread, eq_terms, true, eq_seed});
            if (ens.empty()) throw ParseError("empty ensemble");
            rep = equivalence_report(ens, make_grid(1, eq_n, eq_h), windows, rs, w, B, eq_side);
            meta = "seed=" + std::to_string(eq_seed) + " count=" + std::to_string(eq_count);
        }
        Output out(eq_report);
        write_equivalence(out.stream(), rep, meta + " weight=" + w.label() + " backend=" + B.label());
    });

    // conv-cert
    std::string cc_lemma, cc_config, cc_report;
    auto* cc_cmd = app.add_subcommand("conv-cert", "Convolution and multiplication estimates");
    cc_cmd->add_option("--lemma", cc_lemma, "assist-conv|assist-mult|young|mod-conv|mod-mult|classical");
    cc_cmd->add_option("--config", cc_config, "Config file")->required();
    cc_cmd->add_option("--report", cc_report, "Report CSV (stdout when omitted)");
    cc_cmd->callback([&] {
        const Config cfg = load_config(cc_config);
        const std::string lemma = cc_lemma.empty() ? cfg.get("lemma") : cc_lemma;
        code = finish_cert(run_conv_lemma(cfg, lemma), cfg, cc_report);
    });

    // psido
    std::string ps_symbol, ps_quant = "kn", ps_apply, ps_out;
    auto* ps_cmd = app.add_subcommand("psido", "Apply a pseudo-differential operator to a signal");
    ps_cmd->add_option("--symbol", ps_symbol, "Symbol samples (phase-space CSV)")->required();
    ps_cmd->add_option("--A", ps_quant, "Quantization: kn|weyl|anti|I|number");
    ps_cmd->add_option("--apply", ps_apply, "Signal CSV")->required();
    ps_cmd->add_option("--out", ps_out, "Output signal CSV (stdout when omitted)");
    ps_cmd->callback([&] {
        const SymbolField a(read_phase_file(ps_symbol), parse_quantization(ps_quant));
        const Signal f = read_signal_file(ps_apply);
        Output out(ps_out);
        write_signal_csv(out.stream(), apply_op(a, f));
    });

    // toeplitz
    std::string tp_symbol, tp_w1 = "gauss", tp_w2 = "gauss", tp_route = "both", tp_apply, tp_out;
    auto* tp_cmd = app.add_subcommand("toeplitz", "Toeplitz operator by the direct or Weyl route");
    tp_cmd->add_option("--symbol", tp_symbol, "Symbol samples (phase-space CSV)")->required();
    tp_cmd->add_option("--w1", tp_w1, "Analysis window spec");
    tp_cmd->add_option("--w2", tp_w2, "Synthesis window spec");
    tp_cmd->add_option("--route", tp_route, "direct|weyl|both")->check(CLI::IsMember({"direct", "weyl", "both"}));
    tp_cmd->add_option("--apply", tp_apply, "Signal CSV");
    tp_cmd->add_option("--out", tp_out, "Output CSV (stdout when omitted)");
    tp_cmd->callback([&] {
        const PhaseField a = read_phase_file(tp_symbol);
        const Signal phi1 = window_source(tp_w1, 1).on(a.time);
        const Signal phi2 = window_source(tp_w2, 1).on(a.time);
        Output out(tp_out);
        if (!tp_apply.empty()) {
            const Signal f = read_signal_file(tp_apply);
            if (tp_route == "both") throw ParseError("--apply needs --route direct or --route weyl");
            write_signal_csv(out.stream(), tp_route == "direct" ? toeplitz_direct(a, phi1, phi2, f)
                                                                : apply_op(toeplitz_weyl_symbol(a, phi1, phi2), f));
            return;
        }
        if (tp_route == "both") {
            write_matrix_gap(out.stream(), "weyl_vs_direct",
                             frobenius_gap(kernel_from_symbol(toeplitz_weyl_symbol(a, phi1, phi2)), toeplitz_matrix(a, phi1, phi2)));
        } else if (tp_route == "weyl") {
            write_phase_csv(out.stream(), toeplitz_weyl_symbol(a, phi1, phi2).field);
        } else {
            const OperatorMatrix T = toeplitz_matrix(a, phi1, phi2);
            out.stream() << "row,col,re,im\n";
            for (std::size_t j = 0; j < T.n(); ++j)
                for (std::size_t k = 0; k < T.n(); ++k)
                    out.stream() << j << ',' << k << ',' << format_double(T(j, k).real()) << ','
                                 << format_double(T(j, k).imag()) << '\n';
        }
    });

    // certify
    std::string ct_theorem, ct_config, ct_report;
    auto* ct_cmd = app.add_subcommand("certify", "Operator boundedness and lifting certificates");
    ct_cmd->add_option("--theorem", ct_theorem, "pseudocont2|toeplitz-cont|lifting");
    ct_cmd->add_option("--config", ct_config, "Config file")->required();
    ct_cmd->add_option("--report", ct_report, "Report CSV (stdout when omitted)");
    ct_cmd->callback([&] {
        const Config cfg = load_config(ct_config);
        const std::string theorem = ct_theorem.empty() ? cfg.get("theorem") : ct_theorem;
        code = finish_cert(run_theorem(cfg, theorem), cfg, ct_report);
    });

    // verify
    acceptance::SuiteOptions vopts;
    std::string vf_report;
    auto* vf_cmd = app.add_subcommand("verify", "Run the acceptance suite");
    vf_cmd->add_flag("--quick", vopts.quick, "Smaller ensembles");
    vf_cmd->add_option("--seed", vopts.seed, "Random seed");
    vf_cmd->add_option("--certs", vopts.certs_dir, "Directory of certificate configs");
    vf_cmd->add_option("--report", vf_report, "Report CSV");
    vf_cmd->callback([&] {
        const auto results = acceptance::run_suite(
            vopts, [](const acceptance::CriterionResult& r) { std::cout << acceptance::summary_line(r) << std::endl; });
        if (!vf_report.empty()) {
            Output out(vf_report);
            acceptance::write_report(out.stream(), results, vopts);
        }
        code = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass(); }) ? 0 : exit_failed;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        app.exit(e);
        return exit_input;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return exit_invariant;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failed;
    }
    return code;
}
