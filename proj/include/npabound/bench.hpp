#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "npabound/exile.hpp"
#include "npabound/memory.hpp"

namespace npabound {

struct BenchOptions
{
    std::vector<int> xs{10, 20, 40, 80, 130};
    int runs = 10;
    int level = 1;
    std::uint64_t base_seed = 1;
    SolverConfig solver;
    int reference_refine = 0;  // deep-refinement budget for the gap column; 0 disables
    int threads = 1;
};

struct BenchRecord
{
    std::string agg;  // empty for a run, "mean" or "stddev" for aggregate rows
    std::string instance;
    int x = 0;
    std::uint64_t seed = 0;
    int level = 1;
    long n = 0;
    long m = 0;
    std::optional<double> bound;
    std::optional<double> reference;
    std::optional<double> gap_percent;  // 100 * (bound - reference) / |reference|
    std::optional<double> wall_time_seconds;
    std::optional<double> inner_iterations;
    std::optional<double> refine_steps;
    std::optional<double> peak_memory_bytes;
    std::string memory_source;
    std::string error;

    bool failed() const { return !error.empty(); }
};

// One R_xx22 instance: single shot (plus solver.refine_iters refinement), and
// optionally a deep-refined reference.
BenchRecord bench_instance(int x, std::uint64_t seed, const BenchOptions& options);

// Every (x, run) in order, followed by mean and stddev rows per x. Instances
// are spread over options.threads workers; output order does not depend on
// completion order.
std::vector<BenchRecord> run_bench(const BenchOptions& options);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const BenchRecord& r);
void write_csv(std::ostream& out, const std::vector<BenchRecord>& records);

}  // namespace npabound
