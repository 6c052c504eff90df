#include "tfnorm/certificate.hpp"

#include "tfnorm/error.hpp"

namespace tfnorm {

double Certificate::detail(const std::string& key) const
{
    for (const auto& [k, v] : details)
        if (k == key) return v;
    throw PreconditionError("certificate has no entry '" + key + "'");
}

} // namespace tfnorm
