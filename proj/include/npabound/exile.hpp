#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "npabound/lbfgs.hpp"
#include "npabound/memory.hpp"
#include "npabound/projections.hpp"
#include "npabound/sdp.hpp"

namespace npabound {

struct LineSearchConfig
{
    double sufficient_decrease = 1e-4;
    double shrink = 0.5;
    int max_trials = 30;
};

struct SolverConfig
{
    double exile_distance = 1e3;  // D, in units of max(1, ||C||_F)
    double tol = 1e-8;            // on dist_psd
    int lbfgs_history = 8;
    int max_inner_iter = 500;
    int refine_iters = 0;
    double alpha0 = 1e-3;
    // Geometric factor c. When unset, c = (alpha_final / alpha0)^(1 / refine_iters),
    // so alpha sweeps from alpha0 down to alpha_final over the step budget.
    std::optional<double> alpha_decay;
    double alpha_final = 1e-8;
    LineSearchConfig line_search;
    AffinePath affine_path = AffinePath::Direct;

    double decay() const
    {
        if (alpha_decay)
        {
            return *alpha_decay;
        }
        return std::pow(alpha_final / alpha0, 1.0 / std::max(1, refine_iters));
    }

    // Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

inline void SolverConfig::validate() const
{
    if (!(exile_distance > 0) || !(tol > 0))
    {
        throw std::invalid_argument("exile distance and tolerance must be positive");
    }
    if (lbfgs_history < 1 || max_inner_iter < 1 || refine_iters < 0)
    {
        throw std::invalid_argument("history and iteration limits must be positive");
    }
    if (!(alpha0 > 0 && alpha0 <= 1))
    {
        throw std::invalid_argument("alpha0 must lie in (0, 1]");
    }
    if (alpha_decay && !(*alpha_decay > 0 && *alpha_decay < 1))
    {
        throw std::invalid_argument("alpha decay must lie in (0, 1)");
    }
    if (!alpha_decay && !(alpha_final > 0 && alpha_final < alpha0))
    {
        throw std::invalid_argument("alpha_final must lie in (0, alpha0)");
    }
    if (!(line_search.sufficient_decrease > 0 && line_search.sufficient_decrease < 1) ||
        !(line_search.shrink > 0 && line_search.shrink < 1) || line_search.max_trials < 1)
    {
        throw std::invalid_argument("invalid line search parameters");
    }
}

template <typename Scalar = double>
struct SolveReport
{
    Certificate<Scalar> certificate;  // best (lowest) certified bound seen
    FamilyPoint<Scalar> point;        // current iterate
    FamilyPoint<Scalar> exile;        // exile target
    std::vector<int> inner_iterations;  // per projection: single shot, then each refinement step
    int refine_steps_taken = 0;
    double next_alpha = 0;
    double wall_time_seconds = 0;
    MemoryEstimate memory;
    bool converged = false;  // every inner projection reached tol
    std::vector<Scalar> bound_history;  // best certified bound after the single shot and each refinement step
    Scalar latest_certified_bound = 0;  // certified bound of the current iterate
    Scalar last_bound_change = 0;       // change in the current iterate's certified bound over the latest step
    Scalar last_step_displacement = 0;  // ||x_{i+1} - x_i||_F of the latest step

    int total_inner_iterations() const
    {
        int total = 0;
        for (int it : inner_iterations)
        {
            total += it;
        }
        return total;
    }
};

// slack(y) with y = -D * max(1, ||C||_F) * b.
template <typename Scalar>
FamilyPoint<Scalar> exile_point(const DualSdp<Scalar>& d, Scalar D)
{
    if (!(D > Scalar(0)))
    {
        throw std::invalid_argument("exile distance must be positive");
    }
    const Scalar scale = std::max(Scalar(1), d.C().norm());
    return family_point(d, VectorX<Scalar>(-D * scale * d.b()));
}

// Minimizes f(y) = dist_psd(Z(y))^2 with L-BFGS. The alternating-projection
// displacement g = y - y(P_affine(P_psd(Z(y)))) serves as the gradient; it is
// the Frobenius gradient of f/2 mapped through the inverse Gram matrix, so the
// steepest-descent direction -g at unit step is exactly one alternating
// projection. Steps use backtracking on f; when backtracking fails the plain
// alternating step is taken instead.
template <typename Scalar>
ProjectionResult<Scalar> project_accelerated(const AffineFamily<Scalar>& fam, FamilyPoint<Scalar> start,
                                             const SolverConfig& cfg)
{
    using Vector = VectorX<Scalar>;
    const DualSdp<Scalar>& d = fam.dual();
    const Scalar tol = Scalar(cfg.tol);

    ProjectionResult<Scalar> out;
    out.point = std::move(start);
    PsdSplit<Scalar> split = psd_split(out.point.matrix);
    out.distance_history.push_back(split.distance);
    if (split.distance <= tol)
    {
        out.distance = split.distance;
        out.converged = true;
        return out;
    }

    FamilyPoint<Scalar> alternated = fam.project(split.projected, &out.point.y).point;
    Vector g = out.point.y - alternated.y;
    LbfgsHistory<Scalar> history(cfg.lbfgs_history);

    while (out.iterations < cfg.max_inner_iter)
    {
        Vector direction = -history.apply(g);
        MatrixX<Scalar> dZ = d.combine(direction);
        Scalar slope = Scalar(2) * split.negative.cwiseProduct(dZ).sum();
        if (!(slope < Scalar(0)))
        {
            history.clear();
            direction = -g;
            dZ = d.combine(direction);
            slope = Scalar(2) * split.negative.cwiseProduct(dZ).sum();
        }

        const Scalar f0 = split.distance * split.distance;
        Scalar t = 1;
        bool accepted = false;
        FamilyPoint<Scalar> trial;
        PsdSplit<Scalar> trial_split;
        for (int k = 0; k < cfg.line_search.max_trials; ++k)
        {
            trial = family_point(d, Vector(out.point.y + t * direction));
            trial_split = psd_split(trial.matrix);
            const Scalar ft = trial_split.distance * trial_split.distance;
            if (ft <= f0 + Scalar(cfg.line_search.sufficient_decrease) * t * slope)
            {
                accepted = true;
                break;
            }
            t *= Scalar(cfg.line_search.shrink);
        }
        if (!accepted)
        {
            // one plain alternating step always makes progress
            trial = alternated;
            trial_split = psd_split(trial.matrix);
            history.clear();
            ++out.fallback_steps;
        }

        ++out.iterations;
        out.distance_history.push_back(trial_split.distance);
        if (trial_split.distance <= tol)
        {
            out.point = std::move(trial);
            split = std::move(trial_split);
            out.converged = true;
            break;
        }

        FamilyPoint<Scalar> next_alternated = fam.project(trial_split.projected, &trial.y).point;
        Vector next_g = trial.y - next_alternated.y;
        history.push(Vector(trial.y - out.point.y), Vector(next_g - g));

        out.point = std::move(trial);
        split = std::move(trial_split);
        alternated = std::move(next_alternated);
        g = std::move(next_g);
    }
    out.distance = split.distance;
    return out;
}

namespace detail {

template <typename Scalar>
void finish_report(SolveReport<Scalar>& report, const DualSdp<Scalar>& d,
                   std::chrono::steady_clock::time_point started)
{
    report.wall_time_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    report.memory = peak_memory_estimate(static_cast<std::size_t>(d.n()), d.primal().constraint_nonzeros());
}

}  // namespace detail

// Exile along -b, project back with project_accelerated, certify.
template <typename Scalar>
SolveReport<Scalar> single_shot(const DualSdp<Scalar>& d, const SolverConfig& cfg)
{
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();

    const AffineFamily<Scalar> fam(d, cfg.affine_path);
    SolveReport<Scalar> report;
    report.exile = exile_point(d, Scalar(cfg.exile_distance));
    FamilyPoint<Scalar> start = fam.project(report.exile.matrix, &report.exile.y).point;
    ProjectionResult<Scalar> res = project_accelerated(fam, std::move(start), cfg);

    report.point = std::move(res.point);
    report.certificate = certify(d, report.point.y);
    report.latest_certified_bound = report.certificate.certified_bound;
    report.inner_iterations.push_back(res.iterations);
    report.converged = res.converged;
    report.next_alpha = cfg.alpha0;
    report.bound_history.push_back(report.certificate.certified_bound);
    detail::finish_report(report, d, started);
    return report;
}

// cfg.refine_iters steps of x <- P(x + alpha (exile - x)), alpha <- c * alpha,
// certifying after each and keeping the best bound.
template <typename Scalar>
SolveReport<Scalar> refine(const DualSdp<Scalar>& d, SolveReport<Scalar> report, const SolverConfig& cfg)
{
    cfg.validate();
    if (cfg.refine_iters == 0)
    {
        return report;
    }
    const auto started = std::chrono::steady_clock::now();
    const AffineFamily<Scalar> fam(d, cfg.affine_path);
    const Scalar decay = Scalar(cfg.decay());

    Scalar alpha = report.next_alpha > 0 ? Scalar(report.next_alpha) : Scalar(cfg.alpha0);
    for (int step = 0; step < cfg.refine_iters; ++step)
    {
        VectorX<Scalar> target = report.point.y + alpha * (report.exile.y - report.point.y);
        ProjectionResult<Scalar> res = project_accelerated(fam, family_point(d, std::move(target)), cfg);
        Certificate<Scalar> cert = certify(d, res.point.y);

        report.last_bound_change = cert.certified_bound - report.latest_certified_bound;
        report.latest_certified_bound = cert.certified_bound;
        report.last_step_displacement = (res.point.matrix - report.point.matrix).norm();
        if (cert.certified_bound < report.certificate.certified_bound)
        {
            report.certificate = std::move(cert);
        }
        report.bound_history.push_back(report.certificate.certified_bound);
        report.inner_iterations.push_back(res.iterations);
        report.converged = report.converged && res.converged;
        report.point = std::move(res.point);
        ++report.refine_steps_taken;
        alpha *= decay;
    }
    report.next_alpha = double(alpha);
    detail::finish_report(report, d, started);
    return report;
}

template <typename Scalar>
SolveReport<Scalar> solve(const DualSdp<Scalar>& d, const SolverConfig& cfg)
{
    return refine(d, single_shot(d, cfg), cfg);
}

}  // namespace npabound
