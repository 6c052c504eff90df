#pragma once

#include "tfnorm/grid.hpp"
#include "tfnorm/source.hpp"
#include "tfnorm/spaces.hpp"
#include "tfnorm/weights.hpp"

#include <string>
#include <vector>

namespace tfnorm {

/// M(w, B): ||V_phi f w||_B for a window given in closed form.
struct ModSpec {
    Weight weight;
    QbfSpec backend;
    Source window;

    ModSpec(Weight w, QbfSpec b, Source win);
    ModSpec(Weight w, QbfSpec b); // Gaussian window
};

/// Rejects zero windows and windows with boundary mass above 1e-6 of their peak.
void require_admissible_window(const Signal& window);

double modulation_norm(const Signal& f, const Signal& window, const Weight& w, const QbfSpec& backend);
double modulation_norm(const Signal& f, const ModSpec& spec);

/// ||V_phi f||_{W^{r,r}(w, B)} with unit cells.
double wiener_modulation_norm(const Signal& f, const Signal& window, double r, const Weight& w, const QbfSpec& backend,
                              double side = 1.0);

struct CrossRatio {
    std::string a, b;
    double min = 0.0, max = 0.0;                 // ensemble range of column a / column b
    double refined_min = 0.0, refined_max = 0.0; // same on the refined grid
    double change = 0.0;                         // max over signals |ratio_refined / ratio - 1|
};

struct EquivalenceReport {
    std::vector<std::string> signals;
    std::vector<std::string> columns;
    std::vector<bool> flagged;               // column uses r < r0
    std::vector<std::vector<double>> base;    // base[signal][column]
    std::vector<std::vector<double>> refined; // on the refined grid
    std::vector<CrossRatio> ratios;
    double max_change = 0.0;
    bool finite = true;
};

/// Columns: ||V_{phi0} f w||_B, then ||V_phi f w||_B per window, then ||V_phi f||_{W^{r,r}(w,B)}
/// per window and r; ratios for every column pair, refinement by grid.refined().
EquivalenceReport equivalence_report(const std::vector<Source>& ensemble, const Grid& grid,
                                     const std::vector<Source>& windows, const std::vector<double>& rs, const Weight& w,
                                     const QbfSpec& backend, double side = 1.0);
/// Same for sampled one-dimensional signals on a common grid; refined samples by band-limited interpolation.
EquivalenceReport equivalence_report(const std::vector<Signal>& ensemble, const std::vector<std::string>& labels,
                                     const std::vector<Source>& windows, const std::vector<double>& rs, const Weight& w,
                                     const QbfSpec& backend, double side = 1.0);

struct TransferConstants {
    double phi_norm = 0.0; // ||phi||_{M^{r0}_{(v0 v)}}
    double c_a_raw = 0.0;  // max ||V_phi f||_W / ||V_phi0 f||_W
    double c_b_raw = 0.0;  // max ||V_phi0 f||_W / ||V_phi f||_W
    double c_a = 0.0;      // c_a_raw / phi_norm
    double c_b = 0.0;      // c_b_raw phi_norm (phi_norm / ||phi||_2)^{-theta(r)}
    double c_b_plain = 0.0; // c_b_raw phi_norm
};

/// v is the backend moderator; the Wiener norms use local exponents (r, r).
TransferConstants window_transfer_constants(const std::vector<Signal>& ensemble, const Signal& phi, double r,
                                            const Weight& w, const QbfSpec& backend, double side = 1.0);

struct SandwichReport {
    double m_small = 0.0; // ||f||_{M^{r0}_{(w v0)}}
    double m_mid = 0.0;   // ||f||_{M(w,B)}
    double m_large = 0.0; // ||f||_{M^inf_{(w / v0)}}
    double low_ratio() const { return m_small > 0.0 ? m_mid / m_small : 0.0; }
    double high_ratio() const { return m_mid > 0.0 ? m_large / m_mid : 0.0; }
};

SandwichReport sandwich_check(const Signal& f, const Weight& w, const QbfSpec& backend);

struct EmbeddingReport {
    double ratio = 0.0;      // sup ||f||_{M(w2,B)} / ||f||_{M(w1,B)}
    double weight_sup = 0.0; // sup w2 / w1 on the box
};

EmbeddingReport embedding_ratio(const Weight& w1, const Weight& w2, const QbfSpec& backend,
                                const std::vector<Signal>& ensemble, const Box& box = Box{2, 33, 8.0});

/// Singular values (descending) of the identity from M(w1, L2) to M(w2, L2) on the span of
/// m probes f_k placed on a lattice in [-half_width, half_width]^{2d}.
std::vector<double> compactness_diagnostic(const Weight& w1, const Weight& w2, const Grid& grid, double half_width,
                                           std::size_t m);

} // namespace tfnorm
