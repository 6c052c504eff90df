#pragma once

#include "tfnorm/io.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace tfnorm {

/// One measured value against its tolerance.
struct ToleranceCheck {
    enum class Kind { at_most, at_least, below };
    std::string label;
    double measured = 0.0;
    double tolerance = 0.0;
    Kind kind = Kind::at_most;

    bool pass() const;
    const char* relation() const;
};

/// Outcome of a config-driven certificate run.
struct CertRun {
    std::string name;
    std::vector<std::pair<std::string, double>> values;
    std::vector<ToleranceCheck> checks;

    bool pass() const;
};

/// theorem: pseudocont2 | toeplitz-cont | lifting.
CertRun run_theorem(const Config& cfg, const std::string& theorem);

/// lemma: assist-conv | assist-mult | young | mod-conv | mod-mult | classical.
CertRun run_conv_lemma(const Config& cfg, const std::string& lemma);

/// "# ..." metadata lines, then kind,key,measured,relation,tolerance,pass rows.
void write_cert_report(std::ostream& os, const CertRun& run, const Config& cfg);

} // namespace tfnorm
