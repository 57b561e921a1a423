#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>

#include "npabound/sdp.hpp"

namespace npabound {

// Eigenvalue clipping of a symmetric matrix, with the pieces the solvers need.
template <typename Scalar = double>
struct PsdSplit
{
    MatrixX<Scalar> projected;  // sum max(lambda, 0) v v^T
    MatrixX<Scalar> negative;   // W - projected
    Scalar distance = 0;        // ||negative||_F
    Scalar min_eigenvalue = 0;
};

template <typename Derived>
PsdSplit<typename Derived::Scalar> psd_split(const Eigen::MatrixBase<Derived>& W)
{
    using Scalar = typename Derived::Scalar;
    if (W.rows() != W.cols())
    {
        throw std::invalid_argument("PSD projection needs a square matrix");
    }
    if (!W.allFinite())
    {
        throw std::invalid_argument("PSD projection of a matrix with non-finite entries");
    }
    PsdSplit<Scalar> out;
    const Eigen::Index n = W.rows();
    if (n == 0)
    {
        out.projected = out.negative = MatrixX<Scalar>(0, 0);
        return out;
    }
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(W.derived());
    const auto& lambda = es.eigenvalues();
    const auto& V = es.eigenvectors();
    out.min_eigenvalue = lambda(0);

    // eigenvalues ascend: [0, k) negative, [k, n) non-negative
    Eigen::Index k = 0;
    while (k < n && lambda(k) < Scalar(0))
    {
        ++k;
    }
    out.distance = lambda.head(k).norm();
    if (k == 0)
    {
        out.projected = W;
        out.negative = MatrixX<Scalar>::Zero(n, n);
        return out;
    }
    // Build whichever side has fewer eigenvectors; the other is W minus it.
    if (k <= n - k)
    {
        const auto Vn = V.leftCols(k);
        out.negative = Vn * lambda.head(k).asDiagonal() * Vn.transpose();
        out.projected = W - out.negative;
    }
    else
    {
        const auto Vp = V.rightCols(n - k);
        out.projected = Vp * lambda.tail(n - k).asDiagonal() * Vp.transpose();
        out.negative = W - out.projected;
    }
    out.projected = (out.projected + out.projected.transpose()) * Scalar(0.5);
    out.negative = (out.negative + out.negative.transpose()) * Scalar(0.5);
    return out;
}

// Frobenius-nearest PSD matrix.
template <typename Derived>
MatrixX<typename Derived::Scalar> project_psd(const Eigen::MatrixBase<Derived>& W)
{
    return psd_split(W).projected;
}

// ||W - project_psd(W)||_F
template <typename Derived>
typename Derived::Scalar psd_distance(const Eigen::MatrixBase<Derived>& W)
{
    return psd_split(W).distance;
}

// A member of the dual affine family together with its parameters.
template <typename Scalar = double>
struct FamilyPoint
{
    VectorX<Scalar> y;
    MatrixX<Scalar> matrix;  // Z(y) = sum_i y_i A_i - C
};

template <typename Scalar>
FamilyPoint<Scalar> family_point(const DualSdp<Scalar>& d, VectorX<Scalar> y)
{
    MatrixX<Scalar> Z = slack(d, y);
    return {std::move(y), std::move(Z)};
}

enum class AffinePath
{
    Direct,     // cached Gram factorization
    Iterative,  // BiCGSTAB on the Gram system, warm-started
};

template <typename Scalar = double>
struct AffineProjection
{
    FamilyPoint<Scalar> point;
    AffinePath path_used = AffinePath::Direct;
};

// Orthogonal projection onto {Z(y)}. The family is the image of y -> Z(y), so
// the nearest member solves the normal equations G y = (<A_i, W + C>)_i.
template <typename Scalar = double>
class AffineFamily
{
public:
    using Matrix = MatrixX<Scalar>;
    using Vector = VectorX<Scalar>;

    explicit AffineFamily(const DualSdp<Scalar>& dual, AffinePath path = AffinePath::Direct,
                          Scalar iterative_tol = Scalar(1e-14), int iterative_max_iter = 1000)
        : dual_(dual), path_(path), iterative_tol_(iterative_tol), iterative_max_iter_(iterative_max_iter)
    {
    }

    const DualSdp<Scalar>& dual() const { return dual_; }
    AffinePath path() const { return path_; }

    AffineProjection<Scalar> project(const Matrix& W, const Vector* warm_start = nullptr) const
    {
        if (W.rows() != dual_.n() || W.cols() != dual_.n())
        {
            throw std::invalid_argument("matrix has wrong dimensions");
        }
        const Vector rhs = dual_.apply(W + dual_.C());
        AffineProjection<Scalar> out;
        out.path_used = AffinePath::Direct;
        if (path_ == AffinePath::Iterative && dual_.m() > 0)
        {
            Eigen::BiCGSTAB<typename DualSdp<Scalar>::SparseMatrix> solver;
            solver.setTolerance(iterative_tol_);
            solver.setMaxIterations(iterative_max_iter_);
            solver.compute(dual_.gram());
            Vector y = (warm_start != nullptr && warm_start->size() == dual_.m())
                           ? Vector(solver.solveWithGuess(rhs, *warm_start))
                           : Vector(solver.solve(rhs));
            if (solver.info() == Eigen::Success && y.allFinite())
            {
                out.path_used = AffinePath::Iterative;
                out.point = family_point(dual_, std::move(y));
                return out;
            }
        }
        out.point = family_point(dual_, dual_.solve_gram(rhs));
        return out;
    }

private:
    DualSdp<Scalar> dual_;
    AffinePath path_;
    Scalar iterative_tol_;
    int iterative_max_iter_;
};

template <typename Scalar>
AffineProjection<Scalar> project_affine(const AffineFamily<Scalar>& fam, const MatrixX<Scalar>& W,
                                        const VectorX<Scalar>* warm_start = nullptr)
{
    return fam.project(W, warm_start);
}

template <typename Scalar = double>
struct ProjectionResult
{
    FamilyPoint<Scalar> point;
    int iterations = 0;
    bool converged = false;
    Scalar distance = 0;                   // dist_psd of the returned point
    std::vector<Scalar> distance_history;  // dist_psd before each iteration, then the final value
    int fallback_steps = 0;                // accelerated projection only
};

// Plain alternating projections Z <- P_affine(P_psd(Z)) until dist_psd(Z) <= tol.
template <typename Scalar>
ProjectionResult<Scalar> alternate_project(const AffineFamily<Scalar>& fam, FamilyPoint<Scalar> start, Scalar tol,
                                           int max_iter)
{
    if (!(tol > Scalar(0)))
    {
        throw std::invalid_argument("tolerance must be positive");
    }
    ProjectionResult<Scalar> out;
    out.point = std::move(start);
    PsdSplit<Scalar> split = psd_split(out.point.matrix);
    out.distance_history.push_back(split.distance);
    while (split.distance > tol && out.iterations < max_iter)
    {
        out.point = fam.project(split.projected, &out.point.y).point;
        ++out.iterations;
        split = psd_split(out.point.matrix);
        out.distance_history.push_back(split.distance);
    }
    out.distance = split.distance;
    out.converged = split.distance <= tol;
    return out;
}

template <typename Scalar = double>
struct DykstraResult
{
    MatrixX<Scalar> matrix;
    int iterations = 0;
    bool converged = false;
};

// Dykstra's corrected alternating projections; converges to the nearest point
// of the intersection to W. The returned matrix is the affine-side iterate.
template <typename Scalar>
DykstraResult<Scalar> dykstra_project(const AffineFamily<Scalar>& fam, const MatrixX<Scalar>& W, Scalar tol,
                                      int max_iter)
{
    if (!(tol > Scalar(0)))
    {
        throw std::invalid_argument("tolerance must be positive");
    }
    const Eigen::Index n = W.rows();
    MatrixX<Scalar> x = W;
    MatrixX<Scalar> p = MatrixX<Scalar>::Zero(n, n);
    MatrixX<Scalar> q = MatrixX<Scalar>::Zero(n, n);
    MatrixX<Scalar> prev_affine = W;

    DykstraResult<Scalar> out;
    for (int it = 1; it <= max_iter; ++it)
    {
        const MatrixX<Scalar> affine = fam.project(x + p).point.matrix;
        p = x + p - affine;
        const PsdSplit<Scalar> split = psd_split(affine + q);
        q = affine + q - split.projected;
        x = split.projected;

        const Scalar infeasibility = psd_distance(affine);
        const Scalar step = (affine - prev_affine).norm();
        prev_affine = affine;
        out.iterations = it;
        out.matrix = affine;
        if (infeasibility <= tol && step <= tol)
        {
            out.converged = true;
            return out;
        }
    }
    return out;
}

}  // namespace npabound
