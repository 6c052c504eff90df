#pragma once

#include "tfnorm/grid.hpp"
#include "tfnorm/psido.hpp"
#include "tfnorm/source.hpp"
#include "tfnorm/spaces.hpp"
#include "tfnorm/weights.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tfnorm {

/// Shortest decimal form that round-trips ("%.17g"; "inf", "-inf", "nan" for non-finite values).
std::string format_double(double v);
double parse_double(const std::string& text);

// CSV files carry a metadata line "# grid d=1 n=64 h=0.25 center=0" followed by a header
// (index,re,im for signals; ix,ik,re,im for phase fields) and one row per sample.
void write_signal_csv(std::ostream& os, const Signal& f);
void write_phase_csv(std::ostream& os, const PhaseField& F);
Signal read_signal_csv(std::istream& is);
PhaseField read_phase_csv(std::istream& is);
Signal read_signal_file(const std::string& path);
PhaseField read_phase_file(const std::string& path);
void write_signal_file(const std::string& path, const Signal& f);
void write_phase_file(const std::string& path, const PhaseField& F);

/// "k1=v1,k2=v2": a comma closes a value only outside parentheses and when the text after it
/// starts with a listed key and '='. Keys in `greedy` take the rest of the string.
std::vector<std::pair<std::string, std::string>> split_params(const std::string& body,
                                                              const std::vector<std::string>& keys,
                                                              const std::vector<std::string>& greedy = {});

/// 1 | unit | poly:s=2 | subexp:r=1,s=1 | prod(a,b) | inv(a) | pow(a,t) | table:path=file.csv
Weight parse_weight(const std::string& spec, int dim);

/// Lpq:p=2,q=1[,order=star][,w=<weight>] on R^{phase_dim}; w must come last.
QbfSpec parse_backend(const std::string& spec, int phase_dim);

/// A norm applied to a signal through its short-time transform with a fixed window.
struct SpaceSpec {
    enum class Kind { modulation, wiener_modulation, wiener, lebesgue };
    Kind kind = Kind::modulation;
    Weight weight;
    QbfSpec backend;
    double r1 = 1.0;
    double r2 = 1.0;
    double side = 1.0;
    std::string text;
};

/// M:w=<weight>,B=<backend> | W:r=1,side=1,w=<weight>,B=<backend> |
/// wiener:r1=..,r2=..,side=..,w=<weight>,seq=<backend> | Lpq:... (nested specs last).
SpaceSpec parse_space(const std::string& spec, int d);
double space_norm(const Signal& f, const Signal& window, const SpaceSpec& space);

/// const:c=1 | gauss:a=0.5 | mult:w=<weight on R^d> | fmult:w=<weight on R^d> | weight:w=<weight on R^{2d}>
SymbolSource parse_symbol(const std::string& spec);

/// kn | weyl | anti | I | a number with 2A an integer.
Quantization parse_quantization(const std::string& text);

/// Line-oriented "key = value" file; '#' starts a comment. Keys are unique and `seed` is mandatory.
class Config {
public:
    static Config parse(std::istream& is, const std::string& origin = "config");
    static Config load(const std::string& path);

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    std::size_t count_or(const std::string& key, std::size_t fallback) const;
    std::uint64_t seed() const;
    /// Directory of the file, for resolving relative paths ("" for streams).
    const std::string& base_dir() const { return base_; }
    std::string resolve(const std::string& path) const;
    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
    std::string origin_;
    std::string base_;
};

/// Seeded ensemble: optional phi0 first, then random band-limited signals.
struct EnsembleSpec {
    std::size_t count = 10;
    double spread = 3.0;
    int terms = 5;
    bool gaussian_first = true;
    std::uint64_t seed = 42;
};

std::vector<Source> generate_ensemble(const EnsembleSpec& spec, int d = 1);
/// ensemble.count / ensemble.spread / ensemble.terms / ensemble.gaussian and seed.
EnsembleSpec ensemble_from_config(const Config& cfg);

/// Grid from grid.d, grid.n, grid.h, grid.center (defaults 1, 32, 0.5, 0).
Grid grid_from_config(const Config& cfg, std::size_t n_default = 32, double h_default = 0.5);

} // namespace tfnorm
