#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace npabound {

enum class MemorySource
{
    Os,
    Analytic,
};

struct MemoryEstimate
{
    std::size_t bytes = 0;           // reported value
    std::size_t analytic_bytes = 0;  // working-set floor for the instance
    MemorySource source = MemorySource::Analytic;
};

inline constexpr int dense_working_matrices = 6;

// dense_working_matrices * 8 * n^2 plus sparse constraint storage.
std::size_t analytic_memory_floor(std::size_t n, std::size_t constraint_nonzeros);

// Peak resident set size of this process, if the OS reports it.
std::optional<std::size_t> os_peak_rss();

MemoryEstimate peak_memory_estimate(std::size_t n, std::size_t constraint_nonzeros);

std::string_view to_string(MemorySource source);

}  // namespace npabound
