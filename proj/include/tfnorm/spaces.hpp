#pragma once

#include "tfnorm/grid.hpp"
#include "tfnorm/weights.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace tfnorm {

constexpr double inf = std::numeric_limits<double>::infinity();

/// x_inner: inner L^p over x, outer L^q over xi. xi_inner is the starred variant
/// (inner L^q over xi, outer L^p over x).
enum class Order { x_inner, xi_inner };

/// Weighted mixed Lebesgue backend L^{p,q}_{(w)} on R^{2d}.
struct QbfSpec {
    double p = 2.0;
    double q = 2.0;
    Order order = Order::x_inner;
    Weight weight;

    QbfSpec(double p_, double q_, Weight w, Order o = Order::x_inner);

    int phase_dim() const { return weight.dim(); }
    double r0() const;
    /// Moderator of the weight (unit weight when none is attached).
    Weight v0() const;
    /// L^{p/r0, q/r0} with weight w^{r0}: ||F|| = || |F|^{r0} ||_{witness}^{1/r0}.
    QbfSpec normality_witness() const;
    QbfSpec with_weight(Weight w) const;
    std::string label() const;
};

/// Unweighted L^{p,q} on R^{2d}.
QbfSpec lebesgue(double p, double q, int d, Order o = Order::x_inner);

/// Quadrature measure attached to one sample of the x block and of the xi block.
struct SampleMeasure {
    double x = 1.0;
    double xi = 1.0;
};

SampleMeasure physical_measure(const PhaseField& F);

/// Mixed (quasi-)norm of non-negative samples m[jx * nk + jk], already weighted.
double lpq_raw(std::span<const double> m, std::size_t nx, std::size_t nk, double p, double q, Order order,
               SampleMeasure mu);

/// ||F w||_{L^{p,q}} by quadrature; physical measure h^d, dxi^d unless overridden.
double mixed_norm(const PhaseField& F, const QbfSpec& spec, std::optional<SampleMeasure> mu = std::nullopt);

/// Non-negative values on a cell lattice; xcells / kcells carry the cell anchors
/// (first corner) and side lengths in the x and xi blocks.
struct CellSequence {
    Grid xcells;
    Grid kcells;
    std::vector<double> values;
};

/// l^{p,q} with the weight sampled at cell anchors; each cell counts `cell_measure`.
double seq_norm(const CellSequence& a, const QbfSpec& spec, SampleMeasure cell_measure = {});

/// Cells of the phase grid: ax samples per cell along x, b along xi (per axis).
struct Partition {
    std::size_t ax = 1;
    std::size_t b = 1;
    double side = 1.0;
};

/// ax = side / h must be an integer dividing n; b is the divisor of n closest to side / dxi.
Partition make_partition(const Grid& time, double side);

/// Step function sum_j a(j) chi_{cell j} sampled on the phase grid of `time`.
PhaseField step_function(const CellSequence& a, const Grid& time, const Partition& part);

struct WienerSpec {
    double r1 = 1.0;
    double r2 = 1.0;
    double side = 1.0;
    Weight weight; // applied to F at sample points before the local norms
    QbfSpec seq;   // global backend on the cell lattice
    Order local = Order::x_inner;

    WienerSpec(double r1_, double r2_, double side_, Weight w, QbfSpec s, Order local_ = Order::x_inner);
    WienerSpec with_r(double r1_, double r2_) const;
    std::string label() const;
};

/// Local norms a(j) = ||F w||_{L^{r1,r2}(cell j)} with each cell of unit measure.
CellSequence wiener_local(const PhaseField& F, const WienerSpec& wspec);
double wiener_norm(const PhaseField& F, const WienerSpec& wspec);

/// Two-stage norm over the lattice (lattice_scale * cell side) Z^{2d} with local pieces
/// anchor + Omega, Omega a cube of side `omega` cells (omega >= lattice_scale).
double wiener_norm_lattice(const PhaseField& F, const WienerSpec& wspec, double lattice_scale, double omega);

/// The backend B(w) of a Wiener spec measured on the continuum in cell units.
double backend_norm_cells(const PhaseField& F, const WienerSpec& wspec);

struct SandwichConstants {
    double c_low = 0.0;  // max ||F||_{W^{r0}} / ||F||_{B(w)}
    double c_high = 0.0; // max ||F||_{B(w)} / ||F||_{W^inf}
};

SandwichConstants sandwich_constants(const std::vector<PhaseField>& ensemble, const WienerSpec& wspec);

/// Complex sequence on the integer box prod [lo_a, lo_a + ext_a) in Z^{2d}; axes 0..d-1
/// form the x block and d..2d-1 the xi block.
struct LatticeSeq {
    std::vector<long> lo;
    std::vector<std::size_t> ext;
    CVec values;

    std::size_t rank() const { return lo.size(); }
    static LatticeSeq zeros(std::vector<long> lo, std::vector<std::size_t> ext);
};

double lattice_norm(const LatticeSeq& a, const QbfSpec& spec);
LatticeSeq lattice_convolve(const LatticeSeq& a, const LatticeSeq& b);

/// max over pairs of ||a * b||_{l_B} / (||a||_{l^{r0}_{(v0)}} ||b||_{l_B}).
double discrete_conv_bound(const std::vector<LatticeSeq>& as, const std::vector<LatticeSeq>& bs, const QbfSpec& spec);

} // namespace tfnorm
