#include "tfnorm/io.hpp"

#include "tfnorm/error.hpp"
#include "tfnorm/modspace.hpp"
#include "tfnorm/stft.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tfnorm {
namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

std::string grid_line(const Grid& g)
{
    std::string c;
    for (std::size_t a = 0; a < g.offset.size(); ++a) {
        if (a) c += ",";
        c += format_double(g.center()[a]);
    }
    return "# grid d=" + std::to_string(g.dim) + " n=" + std::to_string(g.n) + " h=" + format_double(g.h) + " center=" + c;
}

Grid parse_grid_line(const std::string& line)
{
    if (!starts_with(line, "# grid")) throw ParseError("missing '# grid' metadata line");
    int d = 1;
    std::size_t n = 0;
    double h = 0.0;
    std::vector<double> center;
    std::istringstream is(line.substr(6));
    std::string tok;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ParseError("bad grid token '" + tok + "'");
        const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
        if (k == "d")
            d = static_cast<int>(parse_double(v));
        else if (k == "n")
            n = static_cast<std::size_t>(parse_double(v));
        else if (k == "h")
            h = parse_double(v);
        else if (k == "center")
            for (const auto& c : split(v, ',')) center.push_back(parse_double(c));
        else
            throw ParseError("unknown grid key '" + k + "'");
    }
    try {
        return make_grid(d, n, h, center);
    } catch (const Error& e) {
        throw ParseError(std::string("invalid grid metadata: ") + e.what());
    }
}

std::string next_data_line(std::istream& is)
{
    std::string line;
    while (std::getline(is, line)) {
        line = trim(line);
        if (!line.empty()) return line;
    }
    return {};
}

std::vector<double> numbers(const std::string& line, std::size_t expect)
{
    const auto cells = split(line, ',');
    if (cells.size() != expect) throw ParseError("expected " + std::to_string(expect) + " columns in '" + line + "'");
    std::vector<double> v;
    for (const auto& c : cells) v.push_back(parse_double(c));
    return v;
}

std::size_t as_index(double v, std::size_t limit)
{
    if (!(v >= 0.0) || v != std::floor(v) || v >= static_cast<double>(limit)) throw ParseError("sample index out of range");
    return static_cast<std::size_t>(v);
}

// "head:body" or "head(args)".
std::pair<std::string, std::string> head_body(const std::string& spec)
{
    const std::string s = trim(spec);
    const auto colon = s.find(':');
    const auto paren = s.find('(');
    if (paren != std::string::npos && (colon == std::string::npos || paren < colon)) {
        if (s.back() != ')') throw ParseError("unbalanced parentheses in '" + s + "'");
        return {s.substr(0, paren), s.substr(paren + 1, s.size() - paren - 2)};
    }
    if (colon == std::string::npos) return {s, {}};
    return {s.substr(0, colon), s.substr(colon + 1)};
}

std::vector<std::string> top_level_args(const std::string& body)
{
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : body) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::map<std::string, std::string> param_map(const std::string& body, const std::vector<std::string>& keys,
                                             const std::vector<std::string>& greedy = {})
{
    std::map<std::string, std::string> m;
    for (auto& [k, v] : split_params(body, keys, greedy))
        if (!m.emplace(k, v).second) throw ParseError("duplicate parameter '" + k + "'");
    return m;
}

double need(const std::map<std::string, std::string>& m, const std::string& key, const std::string& spec)
{
    const auto it = m.find(key);
    if (it == m.end()) throw ParseError("missing parameter '" + key + "' in '" + spec + "'");
    return parse_double(it->second);
}

} // namespace

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& text)
{
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf" || t == "Inf") return inf;
    if (t == "-inf") return -inf;
    double v = 0.0;
    const char* b = t.data();
    const char* e = b + t.size();
    if (!t.empty() && *b == '+') ++b;
    const auto [p, ec] = std::from_chars(b, e, v);
    if (t.empty() || ec != std::errc() || p != e) throw ParseError("not a number: '" + text + "'");
    return v;
}

void write_signal_csv(std::ostream& os, const Signal& f)
{
    os << grid_line(f.grid) << "\nindex,re,im\n";
    for (std::size_t i = 0; i < f.values.size(); ++i)
        os << i << ',' << format_double(f.values[i].real()) << ',' << format_double(f.values[i].imag()) << '\n';
}

void write_phase_csv(std::ostream& os, const PhaseField& F)
{
    os << grid_line(F.time) << "\nix,ik,re,im\n";
    const std::size_t N = F.points();
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < N; ++k)
            os << i << ',' << k << ',' << format_double(F.at(i, k).real()) << ',' << format_double(F.at(i, k).imag()) << '\n';
}

Signal read_signal_csv(std::istream& is)
{
    const Grid g = parse_grid_line(next_data_line(is));
    if (next_data_line(is) != "index,re,im") throw ParseError("expected header 'index,re,im'");
    Signal f = Signal::zeros(g);
    std::vector<bool> seen(g.size(), false);
    for (std::string line = next_data_line(is); !line.empty(); line = next_data_line(is)) {
        const auto v = numbers(line, 3);
        const std::size_t i = as_index(v[0], g.size());
        if (seen[i]) throw ParseError("duplicate sample index");
        seen[i] = true;
        f.values[i] = {v[1], v[2]};
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) throw ParseError("signal file is missing samples");
    return f;
}

PhaseField read_phase_csv(std::istream& is)
{
    const Grid g = parse_grid_line(next_data_line(is));
    if (next_data_line(is) != "ix,ik,re,im") throw ParseError("expected header 'ix,ik,re,im'");
    PhaseField F = PhaseField::zeros(g);
    const std::size_t N = g.size();
    std::vector<bool> seen(N * N, false);
    for (std::string line = next_data_line(is); !line.empty(); line = next_data_line(is)) {
        const auto v = numbers(line, 4);
        const std::size_t i = as_index(v[0], N), k = as_index(v[1], N);
        if (seen[i * N + k]) throw ParseError("duplicate sample index");
        seen[i * N + k] = true;
        F.at(i, k) = {v[2], v[3]};
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) throw ParseError("phase-space file is missing samples");
    return F;
}

Signal read_signal_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return read_signal_csv(in);
}

PhaseField read_phase_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return read_phase_csv(in);
}

void write_signal_file(const std::string& path, const Signal& f)
{
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    write_signal_csv(out, f);
}

void write_phase_file(const std::string& path, const PhaseField& F)
{
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    write_phase_csv(out, F);
}

std::vector<std::pair<std::string, std::string>> split_params(const std::string& body, const std::vector<std::string>& keys,
                                                              const std::vector<std::string>& greedy)
{
    std::vector<std::pair<std::string, std::string>> out;
    const std::string s = trim(body);
    if (s.empty()) return out;
    const auto is_key_at = [&](std::size_t pos) {
        for (const auto& k : keys)
            if (s.compare(pos, k.size(), k) == 0 && pos + k.size() < s.size() && s[pos + k.size()] == '=') return true;
        return false;
    };
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto eq = s.find('=', pos);
        if (eq == std::string::npos) throw ParseError("parameter without '=' in '" + s + "'");
        const std::string key = trim(s.substr(pos, eq - pos));
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ParseError("unknown parameter '" + key + "' in '" + s + "'");
        std::size_t end = s.size();
        if (std::find(greedy.begin(), greedy.end(), key) == greedy.end()) {
            int depth = 0;
            for (std::size_t i = eq + 1; i < s.size(); ++i) {
                if (s[i] == '(') ++depth;
                if (s[i] == ')') --depth;
                if (s[i] == ',' && depth == 0 && is_key_at(i + 1)) {
                    end = i;
                    break;
                }
            }
        }
        const std::string value = trim(s.substr(eq + 1, end - eq - 1));
        if (value.empty()) throw ParseError("empty value for '" + key + "'");
        out.emplace_back(key, value);
        pos = end + 1;
    }
    return out;
}

Weight parse_weight(const std::string& spec, int dim)
{
    const auto [head, body] = head_body(spec);
    if (head == "1" || head == "unit") {
        if (!body.empty()) throw ParseError("unit weight takes no parameters");
        return unit_weight(dim);
    }
    if (head == "poly") {
        const auto m = param_map(body, {"s"});
        return polynomial_weight(need(m, "s", spec), dim);
    }
    if (head == "subexp") {
        const auto m = param_map(body, {"r", "s"});
        const double s = m.count("s") ? need(m, "s", spec) : 1.0;
        if (s < 1.0) throw ParseError("subexp weight needs s >= 1");
        return subexp_weight(need(m, "r", spec), s, dim);
    }
    if (head == "prod") {
        const auto args = top_level_args(body);
        if (args.size() < 2) throw ParseError("prod needs at least two weights");
        Weight w = parse_weight(args[0], dim);
        for (std::size_t i = 1; i < args.size(); ++i) w = weight_product(w, parse_weight(args[i], dim));
        return w;
    }
    if (head == "inv") {
        const auto args = top_level_args(body);
        if (args.size() != 1) throw ParseError("inv takes one weight");
        return weight_reciprocal(parse_weight(args[0], dim));
    }
    if (head == "pow") {
        const auto args = top_level_args(body);
        if (args.size() != 2) throw ParseError("pow takes a weight and an exponent");
        const double t = parse_double(args[1]);
        if (!(t > 0.0)) throw ParseError("pow exponent must be positive");
        return weight_power(parse_weight(args[0], dim), t);
    }
    if (head == "table") {
        const auto m = param_map(body, {"path"}, {"path"});
        const auto it = m.find("path");
        if (it == m.end()) throw ParseError("table weight needs path=");
        Weight w = table_weight(it->second);
        if (w.dim() != dim) throw ParseError("table weight has dimension " + std::to_string(w.dim()) + ", expected " + std::to_string(dim));
        return w;
    }
    throw ParseError("unknown weight '" + spec + "'");
}

QbfSpec parse_backend(const std::string& spec, int phase_dim)
{
    const auto [head, body] = head_body(spec);
    if (head != "Lpq") throw ParseError("unknown backend '" + spec + "'");
    const auto m = param_map(body, {"p", "q", "order", "w"}, {"w"});
    Order order = Order::x_inner;
    if (const auto it = m.find("order"); it != m.end()) {
        if (it->second == "star")
            order = Order::xi_inner;
        else if (it->second != "x")
            throw ParseError("order must be 'x' or 'star'");
    }
    const Weight w = m.count("w") ? parse_weight(m.at("w"), phase_dim) : unit_weight(phase_dim);
    const double p = need(m, "p", spec), q = need(m, "q", spec);
    if (!(p > 0.0) || !(q > 0.0)) throw ParseError("Lebesgue exponents must be positive");
    return QbfSpec(p, q, w, order);
}

SpaceSpec parse_space(const std::string& spec, int d)
{
    const auto [head, body] = head_body(spec);
    SpaceSpec s{SpaceSpec::Kind::modulation, unit_weight(2 * d), lebesgue(2, 2, d), 1.0, 1.0, 1.0, spec};
    if (head == "M") {
        const auto m = param_map(body, {"w", "B"}, {"B"});
        if (m.count("w")) s.weight = parse_weight(m.at("w"), 2 * d);
        if (m.count("B")) s.backend = parse_backend(m.at("B"), 2 * d);
        return s;
    }
    if (head == "W") {
        const auto m = param_map(body, {"r", "side", "w", "B"}, {"B"});
        s.kind = SpaceSpec::Kind::wiener_modulation;
        s.r1 = s.r2 = need(m, "r", spec);
        if (m.count("side")) s.side = parse_double(m.at("side"));
        if (m.count("w")) s.weight = parse_weight(m.at("w"), 2 * d);
        if (m.count("B")) s.backend = parse_backend(m.at("B"), 2 * d);
        return s;
    }
    if (head == "wiener") {
        const auto m = param_map(body, {"r1", "r2", "side", "w", "seq"}, {"seq"});
        s.kind = SpaceSpec::Kind::wiener;
        s.r1 = need(m, "r1", spec);
        s.r2 = need(m, "r2", spec);
        if (m.count("side")) s.side = parse_double(m.at("side"));
        if (m.count("w")) s.weight = parse_weight(m.at("w"), 2 * d);
        if (m.count("seq")) s.backend = parse_backend(m.at("seq"), 2 * d);
        return s;
    }
    if (head == "Lpq") {
        s.kind = SpaceSpec::Kind::lebesgue;
        s.backend = parse_backend(spec, 2 * d);
        return s;
    }
    throw ParseError("unknown space '" + spec + "'");
}

double space_norm(const Signal& f, const Signal& window, const SpaceSpec& s)
{
    switch (s.kind) {
    case SpaceSpec::Kind::modulation:
        return modulation_norm(f, window, s.weight, s.backend);
    case SpaceSpec::Kind::wiener_modulation:
        return wiener_modulation_norm(f, window, s.r1, s.weight, s.backend, s.side);
    case SpaceSpec::Kind::wiener:
        require_admissible_window(window);
        return wiener_norm(stft(f, window), WienerSpec(s.r1, s.r2, s.side, s.weight, s.backend));
    case SpaceSpec::Kind::lebesgue:
        require_admissible_window(window);
        return mixed_norm(stft(f, window), s.backend);
    }
    throw PreconditionError("unknown space kind");
}

SymbolSource parse_symbol(const std::string& spec)
{
    const auto [head, body] = head_body(spec);
    if (head == "1") return [](double, double) { return cplx(1.0); };
    if (head == "const") {
        const auto m = param_map(body, {"c"});
        const double c = need(m, "c", spec);
        return [c](double, double) { return cplx(c); };
    }
    if (head == "gauss") {
        const auto m = param_map(body, {"a"});
        const double a = m.count("a") ? need(m, "a", spec) : 0.5;
        if (!(a > 0.0)) throw ParseError("gauss symbol needs a > 0");
        return [a](double x, double xi) { return cplx(std::exp(-a * (x * x + xi * xi))); };
    }
    if (head == "mult" || head == "fmult" || head == "weight") {
        const auto m = param_map(body, {"w"}, {"w"});
        if (!m.count("w")) throw ParseError("symbol '" + spec + "' needs w=");
        if (head == "weight") {
            const Weight w = parse_weight(m.at("w"), 2);
            return [w](double x, double xi) { return cplx(w({x, xi})); };
        }
        const Weight w = parse_weight(m.at("w"), 1);
        if (head == "mult") return [w](double x, double) { return cplx(w({x})); };
        return [w](double, double xi) { return cplx(w({xi})); };
    }
    throw ParseError("unknown symbol '" + spec + "'");
}

Quantization parse_quantization(const std::string& text)
{
    const std::string t = trim(text);
    if (t == "kn" || t == "0") return Quantization::kohn_nirenberg();
    if (t == "weyl") return Quantization::weyl();
    if (t == "anti" || t == "I") return Quantization::anti();
    const double A = parse_double(t);
    try {
        return make_quantization(A);
    } catch (const PreconditionError& e) {
        throw ParseError(e.what());
    }
}

Config Config::parse(std::istream& is, const std::string& origin)
{
    Config c;
    c.origin_ = origin;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (k.empty() || v.empty()) throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key or value");
        if (!c.kv_.emplace(k, v).second) throw ParseError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + k + "'");
    }
    if (!c.has("seed")) throw ParseError(origin + ": missing mandatory key 'seed'");
    (void)c.seed();
    return c;
}

Config Config::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    Config c = parse(in, path);
    c.base_ = std::filesystem::path(path).parent_path().string();
    return c;
}

bool Config::has(const std::string& key) const { return kv_.count(key) != 0; }

const std::string& Config::get(const std::string& key) const
{
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ParseError(origin_ + ": missing key '" + key + "'");
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const
{
    return has(key) ? get(key) : fallback;
}

double Config::number(const std::string& key) const { return parse_double(get(key)); }

double Config::number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

std::size_t Config::count_or(const std::string& key, std::size_t fallback) const
{
    if (!has(key)) return fallback;
    const double v = number(key);
    if (!(v >= 0.0) || v != std::floor(v)) throw ParseError(origin_ + ": '" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::uint64_t Config::seed() const
{
    const std::string& s = get("seed");
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ParseError(origin_ + ": seed must be a non-negative integer");
    return v;
}

std::string Config::resolve(const std::string& path) const
{
    const std::filesystem::path p(path);
    if (p.is_absolute() || base_.empty()) return path;
    return (std::filesystem::path(base_) / p).string();
}

std::vector<Source> generate_ensemble(const EnsembleSpec& spec, int d)
{
    std::vector<Source> out;
    if (spec.count == 0) return out;
    Rng rng(spec.seed);
    if (spec.gaussian_first) out.push_back(gaussian_source(d));
    while (out.size() < spec.count) out.push_back(random_bandlimited(rng, d, spec.terms, spec.spread));
    return out;
}

EnsembleSpec ensemble_from_config(const Config& cfg)
{
    EnsembleSpec e;
    e.seed = cfg.seed();
    e.count = cfg.count_or("ensemble.count", e.count);
    e.spread = cfg.number_or("ensemble.spread", e.spread);
    e.terms = static_cast<int>(cfg.count_or("ensemble.terms", static_cast<std::size_t>(e.terms)));
    if (cfg.has("ensemble.gaussian")) {
        const std::string& g = cfg.get("ensemble.gaussian");
        if (g != "true" && g != "false") throw ParseError("ensemble.gaussian must be true or false");
        e.gaussian_first = g == "true";
    }
    return e;
}

Grid grid_from_config(const Config& cfg, std::size_t n_default, double h_default)
{
    const int d = static_cast<int>(cfg.count_or("grid.d", 1));
    const std::size_t n = cfg.count_or("grid.n", n_default);
    const double h = cfg.number_or("grid.h", h_default);
    std::vector<double> center;
    if (cfg.has("grid.center"))
        for (const auto& c : split(cfg.get("grid.center"), ',')) center.push_back(parse_double(c));
    try {
        return make_grid(d, n, h, center);
    } catch (const Error& e) {
        throw ParseError(std::string("invalid grid: ") + e.what());
    }
}

} // namespace tfnorm
