#include "npabound/npa.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace npabound {

namespace {

// Appends every reduced word of the given length over m letters, in
// lexicographic order.
void enumerate_words(int m, int length, std::vector<int>& prefix, std::vector<std::vector<int>>& out)
{
    if (static_cast<int>(prefix.size()) == length)
    {
        out.push_back(prefix);
        return;
    }
    for (int letter = 0; letter < m; ++letter)
    {
        if (!prefix.empty() && prefix.back() == letter)
        {
            continue;
        }
        prefix.push_back(letter);
        enumerate_words(m, length, prefix, out);
        prefix.pop_back();
    }
}

std::size_t saturating_mul(std::size_t a, std::size_t b)
{
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
    {
        return std::numeric_limits<std::size_t>::max();
    }
    return a * b;
}

std::size_t saturating_add(std::size_t a, std::size_t b)
{
    return b > std::numeric_limits<std::size_t>::max() - a ? std::numeric_limits<std::size_t>::max() : a + b;
}

}  // namespace

std::size_t reduced_word_count(int m, int length)
{
    if (length == 0)
    {
        return 1;
    }
    std::size_t count = static_cast<std::size_t>(m);
    for (int i = 1; i < length; ++i)
    {
        count = saturating_mul(count, static_cast<std::size_t>(m - 1));
    }
    return count;
}

std::size_t basis_size(const Scenario& s, int level)
{
    std::size_t total = 0;
    for (int a = 0; a <= level; ++a)
    {
        for (int b = 0; a + b <= level; ++b)
        {
            total = saturating_add(total,
                                   saturating_mul(reduced_word_count(s.inputs_a, a), reduced_word_count(s.inputs_b, b)));
        }
    }
    return total;
}

std::vector<Monomial> build_basis(const Scenario& s, int level, std::size_t cap)
{
    if (level < 1)
    {
        throw std::invalid_argument("NPA level must be at least 1");
    }
    const std::size_t size = basis_size(s, level);
    if (size > cap)
    {
        throw std::length_error("NPA basis of size " + std::to_string(size) + " exceeds the cap of " +
                                std::to_string(cap));
    }

    std::vector<Monomial> basis;
    basis.reserve(size);
    for (int total = 0; total <= level; ++total)
    {
        // Within a total length, longer Alice words rank first.
        for (int a_len = total; a_len >= 0; --a_len)
        {
            std::vector<std::vector<int>> a_words;
            std::vector<std::vector<int>> b_words;
            std::vector<int> prefix;
            enumerate_words(s.inputs_a, a_len, prefix, a_words);
            enumerate_words(s.inputs_b, total - a_len, prefix, b_words);
            for (const auto& aw : a_words)
            {
                for (const auto& bw : b_words)
                {
                    basis.push_back({aw, bw});
                }
            }
        }
    }
    return basis;
}

std::optional<int> SymbolicMomentMatrix::class_of(const Monomial& m) const
{
    auto it = index.find(adjoint_class_representative(m));
    if (it == index.end())
    {
        return std::nullopt;
    }
    return it->second;
}

std::vector<std::vector<std::pair<int, int>>> SymbolicMomentMatrix::class_cells() const
{
    std::vector<std::vector<std::pair<int, int>>> cells(classes.size());
    const int size = static_cast<int>(n());
    for (int i = 0; i < size; ++i)
    {
        for (int j = i; j < size; ++j)
        {
            cells[static_cast<std::size_t>(entry_class(i, j))].emplace_back(i, j);
        }
    }
    return cells;
}

SymbolicMomentMatrix build_moment_matrix(const Scenario& s, std::vector<Monomial> basis)
{
    if (basis.empty() || !basis.front().is_identity())
    {
        throw std::invalid_argument("moment matrix basis must start with the identity");
    }

    SymbolicMomentMatrix mm;
    mm.scenario = s;
    mm.basis = std::move(basis);
    const Eigen::Index n = mm.n();
    mm.entry_class.resize(n, n);

    std::vector<Monomial> adjoints;
    adjoints.reserve(mm.basis.size());
    for (const auto& w : mm.basis)
    {
        adjoints.push_back(adjoint(w));
    }

    for (Eigen::Index i = 0; i < n; ++i)
    {
        for (Eigen::Index j = i; j < n; ++j)
        {
            Monomial rep = adjoint_class_representative(multiply(adjoints[i], mm.basis[j]));
            auto [it, inserted] = mm.index.try_emplace(rep, static_cast<int>(mm.classes.size()));
            if (inserted)
            {
                mm.classes.push_back(std::move(rep));
            }
            mm.entry_class(i, j) = it->second;
            mm.entry_class(j, i) = it->second;
        }
    }
    return mm;
}

}  // namespace npabound
