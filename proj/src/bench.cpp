#include "npabound/bench.hpp"

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "npabound/bell.hpp"
#include "npabound/npa.hpp"

namespace npabound {

BenchRecord bench_instance(int x, std::uint64_t seed, const BenchOptions& options)
{
    BenchRecord r;
    r.x = x;
    r.seed = seed;
    r.level = options.level;
    r.instance = "R" + std::to_string(x) + std::to_string(x) + "22-s" + std::to_string(seed);
    try
    {
        const BellFunctional f = random_rxx22(x, seed);
        const SymbolicMomentMatrix mm = build_moment_matrix(f.scenario, options.level);
        const DualSdp<double> d = dualize(assemble_primal<double>(f, mm));
        r.n = static_cast<long>(d.n());
        r.m = static_cast<long>(d.m());

        SolveReport<double> report = solve(d, options.solver);
        r.bound = report.certificate.certified_bound;
        r.wall_time_seconds = report.wall_time_seconds;
        r.inner_iterations = report.total_inner_iterations();
        r.refine_steps = report.refine_steps_taken;

        if (options.reference_refine > 0)
        {
            SolverConfig deep = options.solver;
            deep.refine_iters = options.reference_refine;
            deep.alpha_decay.reset();
            report.next_alpha = deep.alpha0;
            const SolveReport<double> reference = refine(d, report, deep);
            r.reference = reference.certificate.certified_bound;
            r.gap_percent = 100.0 * (*r.bound - *r.reference) / std::abs(*r.reference);
        }
        const MemoryEstimate mem = peak_memory_estimate(static_cast<std::size_t>(d.n()),
                                                        d.primal().constraint_nonzeros());
        r.peak_memory_bytes = static_cast<double>(mem.bytes);
        r.memory_source = std::string(to_string(mem.source));
    }
    catch (const std::exception& e)
    {
        r.error = e.what();
    }
    return r;
}

namespace {

void aggregate(const std::vector<BenchRecord>& runs, std::vector<BenchRecord>& out)
{
    BenchRecord mean;
    BenchRecord stddev;
    const BenchRecord& first = runs.front();
    for (BenchRecord* r : {&mean, &stddev})
    {
        r->x = first.x;
        r->level = first.level;
        r->n = first.n;
        r->m = first.m;
        r->instance = "R" + std::to_string(first.x) + std::to_string(first.x) + "22";
    }
    mean.agg = "mean";
    stddev.agg = "stddev";

    auto column = [&](std::optional<double> BenchRecord::*field) {
        double sum = 0.0;
        int count = 0;
        for (const auto& r : runs)
        {
            if (r.*field)
            {
                sum += *(r.*field);
                ++count;
            }
        }
        if (count == 0)
        {
            return;
        }
        const double mu = sum / count;
        double ss = 0.0;
        for (const auto& r : runs)
        {
            if (r.*field)
            {
                ss += (*(r.*field) - mu) * (*(r.*field) - mu);
            }
        }
        mean.*field = mu;
        stddev.*field = count > 1 ? std::sqrt(ss / (count - 1)) : 0.0;
    };
    for (auto field : {&BenchRecord::bound, &BenchRecord::reference, &BenchRecord::gap_percent,
                       &BenchRecord::wall_time_seconds, &BenchRecord::inner_iterations, &BenchRecord::refine_steps,
                       &BenchRecord::peak_memory_bytes})
    {
        column(field);
    }
    out.push_back(std::move(mean));
    out.push_back(std::move(stddev));
}

}  // namespace

std::vector<BenchRecord> run_bench(const BenchOptions& options)
{
    if (options.runs < 1 || options.xs.empty())
    {
        throw std::invalid_argument("bench needs at least one x value and one run");
    }
    options.solver.validate();

    struct Job
    {
        int x;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int x : options.xs)
    {
        for (int run = 0; run < options.runs; ++run)
        {
            jobs.push_back({x, options.base_seed + static_cast<std::uint64_t>(run)});
        }
    }

    std::vector<BenchRecord> results(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++)
        {
            results[i] = bench_instance(jobs[i].x, jobs[i].seed, options);
        }
    };
    const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(jobs.size())));
    {
        std::vector<std::jthread> pool;
        for (int t = 1; t < threads; ++t)
        {
            pool.emplace_back(worker);
        }
        worker();
    }

    std::vector<BenchRecord> out;
    std::size_t i = 0;
    for ([[maybe_unused]] int x : options.xs)
    {
        std::vector<BenchRecord> block;
        std::vector<BenchRecord> ok;
        for (int run = 0; run < options.runs; ++run, ++i)
        {
            block.push_back(results[i]);
            if (!results[i].failed())
            {
                ok.push_back(results[i]);
            }
        }
        out.insert(out.end(), block.begin(), block.end());
        if (!ok.empty())
        {
            aggregate(ok, out);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void put(std::ostream& out, const std::optional<double>& v)
{
    if (!v)
    {
        return;
    }
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), *v);
    out.write(buf.data(), ptr - buf.data());
}

std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
    {
        return s;
    }
    std::string q = "\"";
    for (char c : s)
    {
        if (c == '"')
        {
            q += '"';
        }
        q += c == '\n' ? ' ' : c;
    }
    return q + '"';
}

}  // namespace

void write_csv_header(std::ostream& out)
{
    out << "agg,instance,x,seed,level,n,m,bound,reference,gap_percent,wall_time_s,inner_iterations,refine_steps,"
           "peak_memory_bytes,memory_source,error\n";
}

void write_csv_row(std::ostream& out, const BenchRecord& r)
{
    out << r.agg << ',' << quote(r.instance) << ',' << r.x << ',';
    if (r.agg.empty())
    {
        out << r.seed;
    }
    out << ',' << r.level << ',' << r.n << ',' << r.m << ',';
    put(out, r.bound);
    out << ',';
    put(out, r.reference);
    out << ',';
    put(out, r.gap_percent);
    out << ',';
    put(out, r.wall_time_seconds);
    out << ',';
    put(out, r.inner_iterations);
    out << ',';
    put(out, r.refine_steps);
    out << ',';
    put(out, r.peak_memory_bytes);
    out << ',' << r.memory_source << ',' << quote(r.error) << '\n';
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records)
{
    write_csv_header(out);
    for (const auto& r : records)
    {
        write_csv_row(out, r);
    }
}

}  // namespace npabound
