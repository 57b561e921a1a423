#include "npabound/memory.hpp"

#include <fstream>
#include <string>

#if defined(__unix__) || defined(__APPLE__)
#include <sys/resource.h>
#endif

namespace npabound {

std::size_t analytic_memory_floor(std::size_t n, std::size_t constraint_nonzeros)
{
    // values and column indices of the stacked operator, twice (operator and Gram factor)
    const std::size_t sparse = 2 * constraint_nonzeros * (sizeof(double) + sizeof(int));
    return dense_working_matrices * sizeof(double) * n * n + sparse;
}

std::optional<std::size_t> os_peak_rss()
{
#if defined(__linux__)
    std::ifstream status("/proc/self/status");
    std::string line;
    while (std::getline(status, line))
    {
        if (line.rfind("VmHWM:", 0) == 0)
        {
            return static_cast<std::size_t>(std::stoull(line.substr(6))) * 1024;
        }
    }
#endif
#if defined(__unix__) || defined(__APPLE__)
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) == 0 && usage.ru_maxrss > 0)
    {
#if defined(__APPLE__)
        return static_cast<std::size_t>(usage.ru_maxrss);
#else
        return static_cast<std::size_t>(usage.ru_maxrss) * 1024;
#endif
    }
#endif
    return std::nullopt;
}

MemoryEstimate peak_memory_estimate(std::size_t n, std::size_t constraint_nonzeros)
{
    MemoryEstimate est;
    est.analytic_bytes = analytic_memory_floor(n, constraint_nonzeros);
    if (auto rss = os_peak_rss())
    {
        est.bytes = *rss;
        est.source = MemorySource::Os;
    }
    else
    {
        est.bytes = est.analytic_bytes;
        est.source = MemorySource::Analytic;
    }
    return est;
}

std::string_view to_string(MemorySource source)
{
    return source == MemorySource::Os ? "os" : "analytic";
}

}  // namespace npabound
