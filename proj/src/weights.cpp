#include "tfnorm/weights.hpp"

#include "tfnorm/error.hpp"
#include "tfnorm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace tfnorm {
namespace {

double norm2(std::span<const double> x)
{
    double s = 0.0;
    for (double c : x) s += c * c;
    return s;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

void require_dim(const Weight& w, std::size_t n, const char* what)
{
    if (static_cast<std::size_t>(w.dim()) != n) throw PreconditionError(std::string(what) + ": dimension mismatch");
}

} // namespace

Weight::Weight(int dim, Fn fn, WeightKind kind, std::string label, std::shared_ptr<const Weight> moderator)
    : dim_(dim), fn_(std::move(fn)), kind_(kind), label_(std::move(label)), moderator_(std::move(moderator))
{
    if (dim_ < 1) throw PreconditionError("weight dimension must be positive");
    if (moderator_ && moderator_->dim() != dim_) throw PreconditionError("moderator dimension mismatch");
}

double Weight::operator()(std::span<const double> x) const
{
    if (x.size() != static_cast<std::size_t>(dim_)) throw PreconditionError("weight evaluated at a point of wrong dimension");
    const double v = fn_(x);
    if (!(v > 0.0) || !std::isfinite(v) || !std::isfinite(1.0 / v))
        throw InvariantViolation("weight " + label_ + " is not positive and finite at a sampled point");
    return v;
}

double Weight::operator()(std::initializer_list<double> x) const
{
    return (*this)(std::span<const double>(x.begin(), x.size()));
}

std::vector<double> Weight::sample_phase(const Grid& time) const
{
    if (dim_ != 2 * time.dim) throw PreconditionError("phase weight must live on R^{2d}");
    const Grid freq = time.dual();
    const std::size_t N = time.size();
    std::vector<std::vector<double>> xs(N), ks(N);
    for (std::size_t i = 0; i < N; ++i) {
        xs[i] = time.point(i);
        ks[i] = freq.point(i);
    }
    std::vector<double> out(N * N);
    parallel_for(N, [&](std::size_t j) {
        std::vector<double> X(static_cast<std::size_t>(dim_));
        for (std::size_t k = 0; k < N; ++k) {
            std::copy(xs[j].begin(), xs[j].end(), X.begin());
            std::copy(ks[k].begin(), ks[k].end(), X.begin() + time.dim);
            out[j * N + k] = (*this)(X);
        }
    });
    return out;
}

Weight polynomial_weight(double s, int n)
{
    auto fn = [](double e) {
        return [e](std::span<const double> x) { return std::pow(1.0 + norm2(x), 0.5 * e); };
    };
    auto mod = std::make_shared<const Weight>(n, fn(std::abs(s)), WeightKind::polynomial, "poly:s=" + fmt(std::abs(s)));
    return Weight(n, fn(s), WeightKind::polynomial, "poly:s=" + fmt(s), mod);
}

Weight subexp_weight(double r, double s, int n)
{
    if (s < 1.0) throw PreconditionError("subexp weight requires s >= 1");
    auto fn = [s](double rr) {
        return [rr, s](std::span<const double> x) { return std::exp(rr * std::pow(std::sqrt(norm2(x)), 1.0 / s)); };
    };
    const std::string lab = "subexp:r=" + fmt(r) + ",s=" + fmt(s);
    const std::string mlab = "subexp:r=" + fmt(std::abs(r)) + ",s=" + fmt(s);
    auto mod = std::make_shared<const Weight>(n, fn(std::abs(r)), WeightKind::subexp, mlab);
    return Weight(n, fn(r), WeightKind::subexp, lab, mod);
}

Weight unit_weight(int n) { return polynomial_weight(0.0, n); }

Weight weight_product(const Weight& a, const Weight& b)
{
    if (a.dim() != b.dim()) throw PreconditionError("weight_product: dimension mismatch");
    std::shared_ptr<const Weight> mod;
    if (a.moderator() && b.moderator()) mod = std::make_shared<const Weight>(weight_product(*a.moderator(), *b.moderator()));
    auto fa = std::make_shared<const Weight>(a);
    auto fb = std::make_shared<const Weight>(b);
    return Weight(a.dim(), [fa, fb](std::span<const double> x) { return (*fa)(x) * (*fb)(x); }, WeightKind::product,
                  "prod(" + a.label() + "," + b.label() + ")", mod);
}

Weight weight_reciprocal(const Weight& a)
{
    auto fa = std::make_shared<const Weight>(a);
    return Weight(a.dim(), [fa](std::span<const double> x) { return 1.0 / (*fa)(x); }, WeightKind::reciprocal,
                  "inv(" + a.label() + ")", a.moderator_ptr());
}

Weight weight_power(const Weight& a, double t)
{
    if (!(t > 0.0)) throw PreconditionError("weight_power: exponent must be positive");
    if (t == 1.0) return a;
    std::shared_ptr<const Weight> mod;
    if (a.moderator()) mod = std::make_shared<const Weight>(weight_power(*a.moderator(), t));
    auto fa = std::make_shared<const Weight>(a);
    return Weight(a.dim(), [fa, t](std::span<const double> x) { return std::pow((*fa)(x), t); }, WeightKind::power,
                  "pow(" + a.label() + "," + fmt(t) + ")", mod);
}

Weight custom_weight(int n, Weight::Fn fn, std::string label, std::shared_ptr<const Weight> moderator)
{
    return Weight(n, std::move(fn), WeightKind::custom, std::move(label), std::move(moderator));
}

Weight table_weight(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open weight table " + path);
    std::string line;
    std::vector<std::vector<double>> rows;
    std::size_t cols = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (std::any_of(line.begin(), line.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); })) {
                cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
                continue;
            }
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError("weight table " + path + ": bad number '" + cell + "'");
            }
        }
        if (cols == 0) cols = row.size();
        if (row.size() != cols) throw ParseError("weight table " + path + ": ragged row");
        rows.push_back(std::move(row));
    }
    if (cols < 2 || rows.empty()) throw ParseError("weight table " + path + ": no data");
    const std::size_t n = cols - 1;
    std::vector<std::vector<double>> axes(n);
    for (std::size_t a = 0; a < n; ++a) {
        std::set<double> uniq;
        for (const auto& r : rows) uniq.insert(r[a]);
        axes[a].assign(uniq.begin(), uniq.end());
    }
    std::size_t total = 1;
    for (const auto& ax : axes) total *= ax.size();
    if (total != rows.size()) throw ParseError("weight table " + path + ": rows do not form a tensor grid");
    std::vector<double> values(total, std::numeric_limits<double>::quiet_NaN());
    for (const auto& r : rows) {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < n; ++a) {
            const auto pos = static_cast<std::size_t>(std::lower_bound(axes[a].begin(), axes[a].end(), r[a]) - axes[a].begin());
            flat = flat * axes[a].size() + pos;
        }
        if (!(r[n] > 0.0)) throw InvariantViolation("weight table " + path + ": non-positive value");
        values[flat] = r[n];
    }
    for (double v : values)
        if (std::isnan(v)) throw ParseError("weight table " + path + ": duplicate grid point");
    auto fn = [axes, values, n](std::span<const double> x) {
        std::vector<std::size_t> lo(n);
        std::vector<double> t(n);
        for (std::size_t a = 0; a < n; ++a) {
            const auto& ax = axes[a];
            if (ax.size() == 1) {
                lo[a] = 0;
                t[a] = 0.0;
                continue;
            }
            const double c = std::clamp(x[a], ax.front(), ax.back());
            std::size_t i = static_cast<std::size_t>(std::upper_bound(ax.begin(), ax.end(), c) - ax.begin());
            i = std::clamp<std::size_t>(i, 1, ax.size() - 1) - 1;
            lo[a] = i;
            t[a] = (c - ax[i]) / (ax[i + 1] - ax[i]);
        }
        double acc = 0.0;
        for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
            double wgt = 1.0;
            std::size_t flat = 0;
            for (std::size_t a = 0; a < n; ++a) {
                const bool up = (corner >> a) & 1U;
                const std::size_t idx = std::min(lo[a] + (up ? 1 : 0), axes[a].size() - 1);
                wgt *= up ? t[a] : 1.0 - t[a];
                flat = flat * axes[a].size() + idx;
            }
            if (wgt != 0.0) acc += wgt * values[flat];
        }
        return acc;
    };
    return Weight(static_cast<int>(n), fn, WeightKind::table, "table:" + path);
}

std::size_t Box::size() const
{
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= points;
    return total;
}

std::vector<double> Box::point(std::size_t flat) const
{
    std::vector<double> x(static_cast<std::size_t>(dim));
    const double h = step();
    for (int a = dim - 1; a >= 0; --a) {
        x[static_cast<std::size_t>(a)] = -half_width + static_cast<double>(flat % points) * h;
        flat /= points;
    }
    return x;
}

Box make_box(int dim, std::size_t points, double half_width)
{
    if (dim < 1) throw PreconditionError("box dimension must be positive");
    if (points < 2) throw PreconditionError("box needs at least two points per axis");
    if (!(half_width > 0.0)) throw PreconditionError("box half width must be positive");
    return Box{dim, points, half_width};
}

double moderate_constant_on(const Weight& w, const Weight& v, const Box& box)
{
    require_dim(w, static_cast<std::size_t>(box.dim), "moderate_constant");
    require_dim(v, static_cast<std::size_t>(box.dim), "moderate_constant");
    const std::size_t N = box.size();
    std::vector<std::vector<double>> pts(N);
    std::vector<double> wv(N);
    for (std::size_t i = 0; i < N; ++i) {
        pts[i] = box.point(i);
        wv[i] = w(pts[i]);
    }
    std::vector<double> best(N, 0.0);
    parallel_for(N, [&](std::size_t iz) {
        std::vector<double> y(static_cast<std::size_t>(box.dim));
        double m = 0.0;
        for (std::size_t ix = 0; ix < N; ++ix) {
            for (std::size_t a = 0; a < y.size(); ++a) y[a] = pts[iz][a] - pts[ix][a];
            m = std::max(m, wv[iz] / (wv[ix] * v(y)));
        }
        best[iz] = m;
    });
    return *std::max_element(best.begin(), best.end());
}

double moderate_constant(const Weight& w, const Weight& v, const Box& box)
{
    const double c1 = moderate_constant_on(w, v, box);
    const double c2 = moderate_constant_on(w, v, box.scaled(2.0));
    const double c4 = moderate_constant_on(w, v, box.scaled(4.0));
    if (c2 >= 2.0 * c1 && c4 >= 2.0 * c2) return std::numeric_limits<double>::infinity();
    return std::max({c1, c2, c4});
}

SubmultiplicativeReport submultiplicative_check(const Weight& v, const Box& box)
{
    require_dim(v, static_cast<std::size_t>(box.dim), "submultiplicative_check");
    const std::size_t N = box.size();
    std::vector<std::vector<double>> pts(N);
    std::vector<double> vv(N);
    for (std::size_t i = 0; i < N; ++i) {
        pts[i] = box.point(i);
        vv[i] = v(pts[i]);
    }
    std::vector<double> best(N, -std::numeric_limits<double>::infinity());
    parallel_for(N, [&](std::size_t iz) {
        std::vector<double> y(static_cast<std::size_t>(box.dim));
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t ix = 0; ix < N; ++ix) {
            for (std::size_t a = 0; a < y.size(); ++a) y[a] = pts[iz][a] - pts[ix][a];
            m = std::max(m, vv[iz] / (vv[ix] * v(y)) - 1.0);
        }
        best[iz] = m;
    });
    SubmultiplicativeReport rep;
    rep.max_violation = *std::max_element(best.begin(), best.end());
    for (std::size_t i = 0; i < N; ++i) {
        std::vector<double> neg(pts[i]);
        for (auto& c : neg) c = -c;
        rep.symmetry_defect = std::max(rep.symmetry_defect, std::abs(v(neg) - vv[i]) / vv[i]);
    }
    rep.symmetric = rep.symmetry_defect <= 1e-12;
    return rep;
}

std::vector<double> tail_sup_ratio(const Weight& w2, const Weight& w1, std::span<const double> radii, const Box& box)
{
    require_dim(w1, static_cast<std::size_t>(box.dim), "tail_sup_ratio");
    require_dim(w2, static_cast<std::size_t>(box.dim), "tail_sup_ratio");
    const std::size_t N = box.size();
    std::vector<std::pair<double, double>> samples(N); // (radius, ratio)
    for (std::size_t i = 0; i < N; ++i) {
        const auto x = box.point(i);
        samples[i] = {std::sqrt(norm2(x)), w2(x) / w1(x)};
    }
    std::sort(samples.begin(), samples.end());
    std::vector<double> suffix(N + 1, 0.0);
    for (std::size_t i = N; i-- > 0;) suffix[i] = std::max(suffix[i + 1], samples[i].second);
    std::vector<double> out;
    out.reserve(radii.size());
    for (double R : radii) {
        const auto it = std::lower_bound(samples.begin(), samples.end(), R - 1e-12,
                                         [](const std::pair<double, double>& s, double r) { return s.first < r; });
        out.push_back(suffix[static_cast<std::size_t>(it - samples.begin())]);
    }
    return out;
}

double hypothesis_constant(const std::function<double(std::span<const double>)>& ratio, const Box& box)
{
    const auto sup_on = [&](const Box& b) {
        const std::size_t N = b.size();
        std::vector<double> vals(N);
        parallel_for(N, [&](std::size_t i) { vals[i] = ratio(b.point(i)); });
        double m = 0.0;
        for (double v : vals) {
            if (std::isnan(v)) throw InvariantViolation("weight hypothesis ratio is not a number");
            m = std::max(m, v);
        }
        return m;
    };
    const double c1 = sup_on(box);
    const double c2 = sup_on(box.scaled(2.0));
    const double c4 = sup_on(box.scaled(4.0));
    if (c2 >= 2.0 * c1 && c4 >= 2.0 * c2) return std::numeric_limits<double>::infinity();
    return std::max({c1, c2, c4});
}

std::vector<double> phase_point(std::span<const double> x, std::span<const double> xi)
{
    std::vector<double> X(x.begin(), x.end());
    X.insert(X.end(), xi.begin(), xi.end());
    return X;
}

} // namespace tfnorm
