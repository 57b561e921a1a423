#pragma once

#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace npabound {

// Limited-memory inverse-Hessian approximation applied with the two-loop
// recursion. Pairs whose curvature s.y is not clearly positive are dropped.
template <typename Scalar = double>
class LbfgsHistory
{
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    explicit LbfgsHistory(int capacity, Scalar curvature_eps = Scalar(1e-12))
        : capacity_(capacity), curvature_eps_(curvature_eps)
    {
        if (capacity < 1)
        {
            throw std::invalid_argument("L-BFGS history must hold at least one pair");
        }
    }

    // Returns false when the pair is rejected.
    bool push(const Vector& s, const Vector& y)
    {
        const Scalar sy = s.dot(y);
        if (!(sy > curvature_eps_ * s.norm() * y.norm()))
        {
            return false;
        }
        if (static_cast<int>(pairs_.size()) == capacity_)
        {
            pairs_.pop_front();
        }
        pairs_.push_back({s, y, Scalar(1) / sy});
        return true;
    }

    void clear() { pairs_.clear(); }
    int size() const { return static_cast<int>(pairs_.size()); }

    // H * g with H0 = (s.y / y.y) I from the newest pair, identity when empty.
    Vector apply(const Vector& g) const
    {
        Vector q = g;
        std::vector<Scalar> alpha(pairs_.size());
        for (std::size_t i = pairs_.size(); i-- > 0;)
        {
            alpha[i] = pairs_[i].rho * pairs_[i].s.dot(q);
            q -= alpha[i] * pairs_[i].y;
        }
        if (!pairs_.empty())
        {
            const auto& last = pairs_.back();
            q *= Scalar(1) / (last.rho * last.y.squaredNorm());
        }
        for (std::size_t i = 0; i < pairs_.size(); ++i)
        {
            const Scalar beta = pairs_[i].rho * pairs_[i].y.dot(q);
            q += (alpha[i] - beta) * pairs_[i].s;
        }
        return q;
    }

private:
    struct Pair
    {
        Vector s;
        Vector y;
        Scalar rho;
    };

    int capacity_;
    Scalar curvature_eps_;
    std::deque<Pair> pairs_;
};

}  // namespace npabound
