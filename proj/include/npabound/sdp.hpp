#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace npabound {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// max <C, X>  s.t.  <A_i, X> = b_i,  X PSD
template <typename Scalar = double>
struct StandardFormSdp
{
    Eigen::Index n = 0;
    MatrixX<Scalar> C;
    std::vector<Eigen::SparseMatrix<Scalar>> constraints;
    VectorX<Scalar> b;

    Eigen::Index m() const { return static_cast<Eigen::Index>(constraints.size()); }

    std::size_t constraint_nonzeros() const
    {
        std::size_t nnz = 0;
        for (const auto& a : constraints)
        {
            nnz += static_cast<std::size_t>(a.nonZeros());
        }
        return nnz;
    }

    Scalar objective(const MatrixX<Scalar>& X) const { return C.cwiseProduct(X).sum(); }
};

// Dual view: min b.y  s.t.  Z(y) = sum_i y_i A_i - C  PSD.
//
// Holds the primal data by shared pointer together with the stacked
// constraint operator (row i = vec(A_i)) and the factored Gram matrix
// G_ij = <A_i, A_j>, both built once.
template <typename Scalar = double>
class DualSdp
{
public:
    using Matrix = MatrixX<Scalar>;
    using Vector = VectorX<Scalar>;
    using SparseMatrix = Eigen::SparseMatrix<Scalar>;
    using StackedOperator = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;
    using GramFactor = Eigen::SimplicialLDLT<SparseMatrix>;

    explicit DualSdp(std::shared_ptr<const StandardFormSdp<Scalar>> primal) : primal_(std::move(primal))
    {
        const auto& p = *primal_;
        const Eigen::Index n = p.n;
        if (p.C.rows() != n || p.C.cols() != n || p.b.size() != p.m())
        {
            throw std::invalid_argument("inconsistent SDP dimensions");
        }

        std::vector<Eigen::Triplet<Scalar>> triplets;
        triplets.reserve(p.constraint_nonzeros());
        for (Eigen::Index i = 0; i < p.m(); ++i)
        {
            const SparseMatrix& a = p.constraints[static_cast<std::size_t>(i)];
            if (a.rows() != n || a.cols() != n)
            {
                throw std::invalid_argument("constraint matrix has wrong dimensions");
            }
            for (Eigen::Index k = 0; k < a.outerSize(); ++k)
            {
                for (typename SparseMatrix::InnerIterator it(a, k); it; ++it)
                {
                    triplets.emplace_back(i, it.col() * n + it.row(), it.value());
                }
            }
        }
        auto stacked = std::make_shared<StackedOperator>(p.m(), n * n);
        stacked->setFromTriplets(triplets.begin(), triplets.end());
        stacked->makeCompressed();

        auto gram = std::make_shared<SparseMatrix>(SparseMatrix(*stacked * stacked->transpose()));
        gram->makeCompressed();
        auto factor = std::make_shared<GramFactor>();
        if (p.m() > 0)
        {
            factor->compute(*gram);
            if (factor->info() != Eigen::Success)
            {
                throw std::runtime_error("Gram system singular: constraint matrices are dependent");
            }
            const auto d = factor->vectorD();
            const Scalar largest = d.cwiseAbs().maxCoeff();
            if (!(d.minCoeff() > largest * Scalar(1e-12)))
            {
                throw std::runtime_error("Gram system singular: constraint matrices are dependent");
            }
        }
        stacked_ = std::move(stacked);
        gram_ = std::move(gram);
        factor_ = std::move(factor);
    }

    const StandardFormSdp<Scalar>& primal() const { return *primal_; }
    Eigen::Index n() const { return primal_->n; }
    Eigen::Index m() const { return primal_->m(); }
    const Matrix& C() const { return primal_->C; }
    const Vector& b() const { return primal_->b; }

    const StackedOperator& stacked() const { return *stacked_; }
    const SparseMatrix& gram() const { return *gram_; }
    const GramFactor& gram_factor() const { return *factor_; }

    // (<A_1, W>, ..., <A_m, W>)
    Vector apply(const Matrix& W) const
    {
        const Eigen::Map<const Vector> flat(W.data(), W.size());
        return *stacked_ * flat;
    }

    // sum_i y_i A_i
    Matrix combine(const Vector& y) const
    {
        if (y.size() != m())
        {
            throw std::invalid_argument("dual vector length does not match the constraint count");
        }
        Vector flat = stacked_->transpose() * y;
        return Eigen::Map<const Matrix>(flat.data(), n(), n());
    }

    Vector solve_gram(const Vector& rhs) const
    {
        if (m() == 0)
        {
            return Vector(0);
        }
        return factor_->solve(rhs);
    }

private:
    std::shared_ptr<const StandardFormSdp<Scalar>> primal_;
    std::shared_ptr<const StackedOperator> stacked_;
    std::shared_ptr<const SparseMatrix> gram_;
    std::shared_ptr<const GramFactor> factor_;
};

template <typename Scalar>
DualSdp<Scalar> dualize(std::shared_ptr<const StandardFormSdp<Scalar>> p)
{
    return DualSdp<Scalar>(std::move(p));
}

template <typename Scalar>
DualSdp<Scalar> dualize(StandardFormSdp<Scalar> p)
{
    return DualSdp<Scalar>(std::make_shared<const StandardFormSdp<Scalar>>(std::move(p)));
}

template <typename Scalar>
MatrixX<Scalar> slack(const DualSdp<Scalar>& d, const VectorX<Scalar>& y)
{
    return d.combine(y) - d.C();
}

// Least-squares y with sum_i y_i A_i = W + C.
template <typename Scalar>
VectorX<Scalar> recover_y(const DualSdp<Scalar>& d, const MatrixX<Scalar>& W)
{
    if (W.rows() != d.n() || W.cols() != d.n())
    {
        throw std::invalid_argument("matrix has wrong dimensions");
    }
    return d.solve_gram(d.apply(W + d.C()));
}

template <typename Scalar = double>
struct Certificate
{
    VectorX<Scalar> y;
    Scalar raw_bound = 0;
    Scalar min_eigenvalue = 0;
    Scalar certified_bound = 0;
};

template <typename Scalar>
Scalar min_eigenvalue(const MatrixX<Scalar>& Z)
{
    if (Z.size() == 0)
    {
        return Scalar(0);
    }
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(Z, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

// Certified bound = b.y + n * max(0, -lambda_min(Z(y))). Adding eps * I to Z is
// the y-shift that raises each unit diagonal constraint's multiplier by eps,
// which costs n * eps in the objective.
template <typename Scalar>
Certificate<Scalar> certify(const DualSdp<Scalar>& d, const VectorX<Scalar>& y)
{
    Certificate<Scalar> c;
    c.y = y;
    c.raw_bound = d.b().dot(y);
    c.min_eigenvalue = min_eigenvalue<Scalar>(slack(d, y));
    c.certified_bound = c.raw_bound + Scalar(d.n()) * std::max(Scalar(0), -c.min_eigenvalue);
    return c;
}

}  // namespace npabound
