#include "npabound/monomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace npabound {

namespace {

void push_reduced(std::vector<int>& word, int letter)
{
    if (!word.empty() && word.back() == letter)
    {
        word.pop_back();
    }
    else
    {
        word.push_back(letter);
    }
}

}  // namespace

std::strong_ordering operator<=>(const Monomial& lhs, const Monomial& rhs)
{
    if (auto c = lhs.length() <=> rhs.length(); c != 0)
    {
        return c;
    }
    // Equal total length: a longer Alice prefix ranks first, since at the first
    // position where one word switches to Bob the other still holds an A letter.
    if (lhs.a_word.size() != rhs.a_word.size())
    {
        const std::size_t common = std::min(lhs.a_word.size(), rhs.a_word.size());
        for (std::size_t i = 0; i < common; ++i)
        {
            if (auto c = lhs.a_word[i] <=> rhs.a_word[i]; c != 0)
            {
                return c;
            }
        }
        return lhs.a_word.size() > rhs.a_word.size() ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (auto c = lhs.a_word <=> rhs.a_word; c != 0)
    {
        return c;
    }
    return lhs.b_word <=> rhs.b_word;
}

std::string to_string(const Monomial& m)
{
    if (m.is_identity())
    {
        return "1";
    }
    std::string out;
    for (int x : m.a_word)
    {
        out += 'A' + std::to_string(x + 1);
    }
    for (int y : m.b_word)
    {
        out += 'B' + std::to_string(y + 1);
    }
    return out;
}

Monomial reduce(std::span<const Letter> word, const Scenario& s)
{
    Monomial out;
    for (const Letter& l : word)
    {
        const int limit = l.party == Party::A ? s.inputs_a : s.inputs_b;
        if (l.setting < 0 || l.setting >= limit)
        {
            throw std::invalid_argument("setting index " + std::to_string(l.setting + 1) + " outside scenario");
        }
        push_reduced(l.party == Party::A ? out.a_word : out.b_word, l.setting);
    }
    return out;
}

Monomial multiply(const Monomial& lhs, const Monomial& rhs)
{
    Monomial out = lhs;
    for (int x : rhs.a_word)
    {
        push_reduced(out.a_word, x);
    }
    for (int y : rhs.b_word)
    {
        push_reduced(out.b_word, y);
    }
    return out;
}

Monomial adjoint(const Monomial& m)
{
    return {{m.a_word.rbegin(), m.a_word.rend()}, {m.b_word.rbegin(), m.b_word.rend()}};
}

Monomial adjoint_class_representative(const Monomial& m)
{
    Monomial adj = adjoint(m);
    return adj < m ? adj : m;
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept
{
    std::size_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::size_t v) { h = (h ^ v) * 0x100000001b3ULL; };
    for (int x : m.a_word)
    {
        mix(static_cast<std::size_t>(x) + 1);
    }
    mix(0x9e3779b97f4a7c15ULL);
    for (int y : m.b_word)
    {
        mix(static_cast<std::size_t>(y) + 1);
    }
    return h;
}

}  // namespace npabound
