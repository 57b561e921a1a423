#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace npabound {

// Two-party scenario with +-1 valued observables on each side.
struct Scenario
{
    int inputs_a = 1;
    int inputs_b = 1;

    Scenario() = default;
    Scenario(int a, int b);

    static constexpr int outcomes = 2;

    bool operator==(const Scenario&) const = default;
};

// Coefficients of <A_x>, <B_y> and <A_x B_y>, plus a constant term.
//
// Indices are 0-based in memory; the text format and printed labels are
// 1-based.
struct BellFunctional
{
    Scenario scenario;
    Eigen::VectorXd marginal_a;
    Eigen::VectorXd marginal_b;
    Eigen::MatrixXd correlator;  // correlator(x, y)
    double constant_offset = 0.0;

    BellFunctional() : BellFunctional(Scenario{}) {}
    explicit BellFunctional(Scenario s);

    // Throws std::invalid_argument if dimensions disagree with the scenario
    // or a coefficient is not finite.
    void validate() const;

    Eigen::Index coefficient_count() const
    {
        return marginal_a.size() + marginal_b.size() + correlator.size();
    }

    BellFunctional operator-() const;
};

// Bit-exact comparison (every coefficient compared with ==).
bool operator==(const BellFunctional& lhs, const BellFunctional& rhs);

BellFunctional chsh();
BellFunctional i3322();

// Random functional with x settings per side and every coefficient uniform in
// [-1, 1). Draw order: marginal_a, marginal_b, then correlator row-major.
// See Xoshiro256 for the generator.
BellFunctional random_rxx22(int x, std::uint64_t seed);

class ParseError : public std::runtime_error
{
public:
    ParseError(int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

BellFunctional parse_functional(std::istream& in);
BellFunctional parse_functional(std::string_view text);
BellFunctional load_functional(const std::string& path);

// Writes every term (zeros included) with shortest round-trip formatting.
std::string serialize_functional(const BellFunctional& f);

// Maximum of the functional over deterministic +-1 assignments to every A_x and
// B_y. Refuses scenarios with inputs_a + inputs_b > max_total_inputs.
double local_bound_bruteforce(const BellFunctional& f, int max_total_inputs = 26);

// xoshiro256** seeded through splitmix64.
class Xoshiro256
{
public:
    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next();

    // Uniform in [-1, 1): top 53 bits scaled to [0, 1), then 2u - 1.
    double uniform_pm1();

private:
    std::uint64_t s_[4];
};

}  // namespace npabound
