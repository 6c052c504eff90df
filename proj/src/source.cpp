#include "tfnorm/source.hpp"

#include "tfnorm/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace tfnorm {

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

cplx Atom::operator()(std::span<const double> x) const
{
    const double d = static_cast<double>(x.size());
    double r2 = 0.0;
    double phase = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        const double c = x[a] - (a < x0.size() ? x0[a] : 0.0);
        r2 += c * c;
        phase += x[a] * (a < xi0.size() ? xi0[a] : 0.0);
    }
    const double norm = std::pow(std::numbers::pi, -0.25 * d) * std::pow(width, -0.5 * d);
    return amplitude * norm * std::exp(-0.5 * r2 / (width * width)) * std::polar(1.0, phase);
}

Signal Source::on(const Grid& g) const
{
    for (const auto& a : atoms)
        if (a.x0.size() != static_cast<std::size_t>(g.dim) || a.xi0.size() != static_cast<std::size_t>(g.dim))
            throw GridMismatch("source dimension does not match grid");
    return sample(g, [this](std::span<const double> x) {
        cplx acc = 0.0;
        for (const auto& a : atoms) acc += a(x);
        return acc;
    });
}

Source Source::scaled(cplx s) const
{
    Source out = *this;
    for (auto& a : out.atoms) a.amplitude *= s;
    return out;
}

Source gaussian_source(int d)
{
    Atom a;
    a.x0.assign(static_cast<std::size_t>(d), 0.0);
    a.xi0.assign(static_cast<std::size_t>(d), 0.0);
    return Source{{a}, "gauss"};
}

Source atom_source(const Atom& a, std::string label) { return Source{{a}, std::move(label)}; }

Source random_bandlimited(Rng& rng, int d, int terms, double spread)
{
    Source s;
    s.label = "random";
    for (int t = 0; t < terms; ++t) {
        Atom a;
        for (int i = 0; i < d; ++i) {
            a.x0.push_back(rng.uniform(-spread, spread));
            a.xi0.push_back(rng.uniform(-spread, spread));
        }
        a.width = rng.uniform(0.7, 1.4);
        a.amplitude = rng.complex_normal() / std::sqrt(2.0 * terms);
        s.atoms.push_back(std::move(a));
    }
    return s;
}

std::vector<Source> probe_family(const Weight& w1, int d, std::size_t m, double half_width)
{
    if (w1.dim() != 2 * d) throw PreconditionError("probe_family: weight must live on R^{2d}");
    if (m == 0) return {};
    // per-axis lattice count k with k^{2d} >= m
    std::size_t k = 1;
    auto pw = [d](std::size_t b) {
        std::size_t t = 1;
        for (int i = 0; i < 2 * d; ++i) t *= b;
        return t;
    };
    while (pw(k) < m) ++k;
    std::vector<Source> out;
    const double step = k > 1 ? 2.0 * half_width / static_cast<double>(k - 1) : 0.0;
    for (std::size_t idx = 0; idx < pw(k) && out.size() < m; ++idx) {
        std::vector<double> X(static_cast<std::size_t>(2 * d));
        std::size_t rest = idx;
        for (int a = 2 * d - 1; a >= 0; --a) {
            X[static_cast<std::size_t>(a)] = k > 1 ? -half_width + static_cast<double>(rest % k) * step : 0.0;
            rest /= k;
        }
        Atom at;
        at.x0.assign(X.begin(), X.begin() + d);
        at.xi0.assign(X.begin() + d, X.end());
        at.amplitude = 1.0 / w1(X);
        std::ostringstream lab;
        lab << "probe" << out.size();
        out.push_back(Source{{at}, lab.str()});
    }
    return out;
}

Source window_source(const std::string& spec, int d)
{
    std::string head = spec;
    std::string params;
    if (auto c = spec.find(':'); c != std::string::npos) {
        head = spec.substr(0, c);
        params = spec.substr(c + 1);
    }
    if (head != "gauss") throw ParseError("unknown window '" + spec + "'");
    Atom a;
    a.x0.assign(static_cast<std::size_t>(d), 0.0);
    a.xi0.assign(static_cast<std::size_t>(d), 0.0);
    std::stringstream ss(params);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ParseError("window parameter without value in '" + spec + "'");
        const std::string key = item.substr(0, eq);
        double value = 0.0;
        try {
            value = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw ParseError("bad window parameter value in '" + spec + "'");
        }
        if (key == "dilate") {
            if (!(value > 0.0)) throw ParseError("window dilation must be positive");
            a.width = value;
        } else if (key == "shift") {
            a.x0.assign(static_cast<std::size_t>(d), value);
        } else if (key == "mod") {
            a.xi0.assign(static_cast<std::size_t>(d), value);
        } else {
            throw ParseError("unknown window parameter '" + key + "'");
        }
    }
    return Source{{a}, spec};
}

std::vector<Signal> sample_all(const std::vector<Source>& sources, const Grid& g)
{
    std::vector<Signal> out;
    out.reserve(sources.size());
    for (const auto& s : sources) out.push_back(s.on(g));
    return out;
}

} // namespace tfnorm
