#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "npabound/bell.hpp"

namespace npabound {

enum class Party : unsigned char
{
    A,
    B
};

// One observable: party plus 0-based setting index.
struct Letter
{
    Party party;
    int setting;

    bool operator==(const Letter&) const = default;
};

// Reduced product of +-1 observables. Alice's letters come first since the two
// parties commute; each word has no two equal adjacent letters (X^2 = 1).
struct Monomial
{
    std::vector<int> a_word;
    std::vector<int> b_word;

    static Monomial identity() { return {}; }
    static Monomial alice(int x) { return {{x}, {}}; }
    static Monomial bob(int y) { return {{}, {y}}; }
    static Monomial correlator(int x, int y) { return {{x}, {y}}; }

    bool is_identity() const { return a_word.empty() && b_word.empty(); }
    std::size_t length() const { return a_word.size() + b_word.size(); }

    bool operator==(const Monomial&) const = default;
};

// Basis order: total length, then lexicographic over the letter sequence with
// every A letter ranked before every B letter.
std::strong_ordering operator<=>(const Monomial& lhs, const Monomial& rhs);

// 1-based label such as "A1A2B3"; the identity prints as "1".
std::string to_string(const Monomial& m);

// Reduces a raw operator sequence. Throws std::invalid_argument on a setting
// outside the scenario.
Monomial reduce(std::span<const Letter> word, const Scenario& s);

// Product of two reduced monomials.
Monomial multiply(const Monomial& lhs, const Monomial& rhs);

// Reverses each party's word.
Monomial adjoint(const Monomial& m);

// Representative of {m, adjoint(m)}: the smaller of the two in basis order.
Monomial adjoint_class_representative(const Monomial& m);

struct MonomialHash
{
    std::size_t operator()(const Monomial& m) const noexcept;
};

}  // namespace npabound
