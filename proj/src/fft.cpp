#include "tfnorm/fft.hpp"

#include "tfnorm/error.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numeric>
#include <utility>

namespace tfnorm::fft {
namespace {

struct PlanCache {
    std::mutex mutex;
    std::map<std::pair<std::vector<int>, int>, fftw_plan> plans;

    ~PlanCache()
    {
        for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
    }

    fftw_plan get(const std::vector<int>& dims, int sign)
    {
        std::lock_guard lock(mutex);
        auto key = std::make_pair(dims, sign);
        if (auto it = plans.find(key); it != plans.end()) return it->second;
        const std::size_t total = std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                                                  [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
        fftw_complex* scratch = fftw_alloc_complex(total);
        fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), scratch, scratch,
                                       sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        if (plan == nullptr) throw Error("fftw planner failed");
        plans.emplace(key, plan);
        return plan;
    }
};

PlanCache& cache()
{
    static PlanCache instance;
    return instance;
}

} // namespace

void transform(std::span<cplx> data, std::span<const int> dims, int sign)
{
    std::size_t total = 1;
    for (int d : dims) {
        if (d <= 0) throw PreconditionError("fft extent must be positive");
        total *= static_cast<std::size_t>(d);
    }
    if (total != data.size()) throw PreconditionError("fft extent does not match data length");
    if (total == 0) return;
    fftw_plan plan = cache().get(std::vector<int>(dims.begin(), dims.end()), sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
}

} // namespace tfnorm::fft
