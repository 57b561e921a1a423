#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "npabound/bell.hpp"
#include "npabound/monomial.hpp"
#include "npabound/sdp.hpp"

namespace npabound {

inline constexpr std::size_t default_basis_cap = 20000;

// Number of reduced words of length `length` over m involutions.
std::size_t reduced_word_count(int m, int length);

// Closed-form NPA basis size for the given level.
std::size_t basis_size(const Scenario& s, int level);

// All reduced monomials of total length <= level in basis order (identity
// first). Throws std::invalid_argument for level < 1 and std::length_error when
// the basis would exceed `cap`.
std::vector<Monomial> build_basis(const Scenario& s, int level, std::size_t cap = default_basis_cap);

// Entry (i, j) holds the class of adjoint(basis[i]) * basis[j]; a monomial and
// its adjoint share a class. Class 0 is the identity.
struct SymbolicMomentMatrix
{
    Scenario scenario;
    std::vector<Monomial> basis;
    Eigen::MatrixXi entry_class;
    std::vector<Monomial> classes;  // adjoint-class representatives

    Eigen::Index n() const { return static_cast<Eigen::Index>(basis.size()); }
    std::size_t class_count() const { return classes.size(); }

    std::optional<int> class_of(const Monomial& m) const;

    // Upper-triangle cells (i <= j) of every class, in row-major order.
    std::vector<std::vector<std::pair<int, int>>> class_cells() const;

    std::unordered_map<Monomial, int, MonomialHash> index;
};

SymbolicMomentMatrix build_moment_matrix(const Scenario& s, std::vector<Monomial> basis);

inline SymbolicMomentMatrix build_moment_matrix(const Scenario& s, int level,
                                                std::size_t cap = default_basis_cap)
{
    return build_moment_matrix(s, build_basis(s, level, cap));
}

// Objective and constraints of the moment-matrix SDP:
//   C:  each coefficient spread evenly over every (ordered) cell of its class,
//       the constant term over the diagonal;
//   A:  one <E_ii, X> = 1 per diagonal cell, then for each class with several
//       upper-triangle cells, (E_kl + E_lk) - (E_pq + E_qp) tying each cell to
//       the class's first cell with b = 0.
// The identity is the sum of the first n constraint matrices, each with b = 1,
// which the certificate shift in certify() relies on.
template <typename Scalar = double>
StandardFormSdp<Scalar> assemble_primal(const BellFunctional& f, const SymbolicMomentMatrix& mm)
{
    f.validate();
    if (!(f.scenario == mm.scenario))
    {
        throw std::invalid_argument("functional scenario does not match the moment matrix");
    }
    const Eigen::Index n = mm.n();
    const auto cells = mm.class_cells();

    std::vector<Scalar> class_weight(mm.class_count(), Scalar(0));
    auto add_term = [&](const Monomial& mono, double coeff) {
        if (coeff == 0.0)
        {
            return;
        }
        const auto id = mm.class_of(mono);
        if (!id)
        {
            throw std::invalid_argument("functional term " + to_string(mono) + " missing from the moment matrix");
        }
        class_weight[static_cast<std::size_t>(*id)] += Scalar(coeff);
    };
    add_term(Monomial::identity(), f.constant_offset);
    for (int x = 0; x < f.scenario.inputs_a; ++x)
    {
        add_term(Monomial::alice(x), f.marginal_a(x));
    }
    for (int y = 0; y < f.scenario.inputs_b; ++y)
    {
        add_term(Monomial::bob(y), f.marginal_b(y));
    }
    for (int x = 0; x < f.scenario.inputs_a; ++x)
    {
        for (int y = 0; y < f.scenario.inputs_b; ++y)
        {
            add_term(Monomial::correlator(x, y), f.correlator(x, y));
        }
    }

    StandardFormSdp<Scalar> p;
    p.n = n;
    p.C = MatrixX<Scalar>::Zero(n, n);
    for (std::size_t c = 0; c < cells.size(); ++c)
    {
        if (class_weight[c] == Scalar(0))
        {
            continue;
        }
        std::size_t ordered = 0;
        for (auto [i, j] : cells[c])
        {
            ordered += i == j ? 1 : 2;
        }
        const Scalar share = class_weight[c] / Scalar(ordered);
        for (auto [i, j] : cells[c])
        {
            p.C(i, j) += share;
            if (i != j)
            {
                p.C(j, i) += share;
            }
        }
    }

    std::vector<Scalar> rhs;
    for (Eigen::Index i = 0; i < n; ++i)
    {
        Eigen::SparseMatrix<Scalar> a(n, n);
        a.insert(i, i) = Scalar(1);
        a.makeCompressed();
        p.constraints.push_back(std::move(a));
        rhs.push_back(Scalar(1));
    }
    for (std::size_t c = 0; c < cells.size(); ++c)
    {
        const auto& list = cells[c];
        if (c == 0)
        {
            // identity class: reduced words are unique, so only the diagonal
            if (static_cast<Eigen::Index>(list.size()) != n)
            {
                throw std::logic_error("identity class occupies an off-diagonal cell");
            }
            continue;
        }
        for (std::size_t k = 1; k < list.size(); ++k)
        {
            const auto [p0, q0] = list.front();
            const auto [r, s] = list[k];
            std::vector<Eigen::Triplet<Scalar>> t;
            t.emplace_back(r, s, Scalar(1));
            t.emplace_back(s, r, Scalar(1));
            t.emplace_back(p0, q0, Scalar(-1));
            t.emplace_back(q0, p0, Scalar(-1));
            Eigen::SparseMatrix<Scalar> a(n, n);
            a.setFromTriplets(t.begin(), t.end());
            a.makeCompressed();
            p.constraints.push_back(std::move(a));
            rhs.push_back(Scalar(0));
        }
    }
    p.b = Eigen::Map<const VectorX<Scalar>>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    return p;
}

}  // namespace npabound
