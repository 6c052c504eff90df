#pragma once

#include "tfnorm/grid.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace tfnorm {

enum class WeightKind { polynomial, subexp, product, reciprocal, power, table, custom };

/// Positive function on R^n with an optional moderating weight v.
class Weight {
public:
    using Fn = std::function<double(std::span<const double>)>;

    Weight(int dim, Fn fn, WeightKind kind, std::string label, std::shared_ptr<const Weight> moderator = nullptr);

    int dim() const { return dim_; }
    WeightKind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    const Weight* moderator() const { return moderator_.get(); }
    std::shared_ptr<const Weight> moderator_ptr() const { return moderator_; }

    /// Evaluates and enforces positivity and finiteness of w and 1/w.
    double operator()(std::span<const double> x) const;
    double operator()(std::initializer_list<double> x) const;

    /// Samples on the phase grid of `time` in PhaseField layout (requires dim == 2 * time.dim).
    std::vector<double> sample_phase(const Grid& time) const;

private:
    int dim_;
    Fn fn_;
    WeightKind kind_;
    std::string label_;
    std::shared_ptr<const Weight> moderator_;
};

/// <x>^s = (1 + |x|^2)^{s/2}, moderated by <x>^{|s|}.
Weight polynomial_weight(double s, int n);
/// exp(r |x|^{1/s}), s >= 1, moderated by exp(|r| |x|^{1/s}).
Weight subexp_weight(double r, double s, int n);
Weight unit_weight(int n);
Weight weight_product(const Weight& a, const Weight& b);
Weight weight_reciprocal(const Weight& a);
/// w^t for t > 0, moderated by v^t.
Weight weight_power(const Weight& a, double t);
/// Multilinear interpolation in a CSV table with columns x0..x{n-1},w on a tensor grid.
Weight table_weight(const std::string& path);
Weight custom_weight(int n, Weight::Fn fn, std::string label, std::shared_ptr<const Weight> moderator = nullptr);

/// Square lattice box [-R, R]^dim with `points` samples per axis, both ends included.
struct Box {
    int dim = 1;
    std::size_t points = 33;
    double half_width = 4.0;

    double step() const { return 2.0 * half_width / static_cast<double>(points - 1); }
    std::size_t size() const;
    std::vector<double> point(std::size_t flat) const;
    Box scaled(double factor) const { return Box{dim, points, half_width * factor}; }
};

Box make_box(int dim, std::size_t points, double half_width);

/// max over box points x, z of w(z) / (w(x) v(z - x)) on the box.
double moderate_constant_on(const Weight& w, const Weight& v, const Box& box);

/// moderate_constant_on over box, 2*box and 4*box; +infinity when the constant
/// at least doubles on both extensions.
double moderate_constant(const Weight& w, const Weight& v, const Box& box);

struct SubmultiplicativeReport {
    double max_violation = 0.0; // max v(x+y) / (v(x) v(y)) - 1
    double symmetry_defect = 0.0;
    bool symmetric = true;
};

SubmultiplicativeReport submultiplicative_check(const Weight& v, const Box& box);

/// For each radius R: sup of w2 / w1 over box points with |X| >= R (0 when none).
std::vector<double> tail_sup_ratio(const Weight& w2, const Weight& w1, std::span<const double> radii, const Box& box);

/// sup of ratio(X) over box points; +infinity when the sup at least doubles on the
/// boxes scaled by 2 and by 4. Used to certify weight hypotheses of the form
/// lhs(X) <= C rhs(X).
double hypothesis_constant(const std::function<double(std::span<const double>)>& ratio, const Box& box);

/// Concatenation of x and xi into a single phase-space point.
std::vector<double> phase_point(std::span<const double> x, std::span<const double> xi);

} // namespace tfnorm
