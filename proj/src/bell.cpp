#include "npabound/bell.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

namespace npabound {

Scenario::Scenario(int a, int b) : inputs_a(a), inputs_b(b)
{
    if (a < 1 || b < 1)
    {
        throw std::invalid_argument("scenario needs at least one setting per party");
    }
}

BellFunctional::BellFunctional(Scenario s)
    : scenario(s),
      marginal_a(Eigen::VectorXd::Zero(s.inputs_a)),
      marginal_b(Eigen::VectorXd::Zero(s.inputs_b)),
      correlator(Eigen::MatrixXd::Zero(s.inputs_a, s.inputs_b))
{
}

void BellFunctional::validate() const
{
    if (scenario.inputs_a < 1 || scenario.inputs_b < 1)
    {
        throw std::invalid_argument("invalid scenario");
    }
    if (marginal_a.size() != scenario.inputs_a || marginal_b.size() != scenario.inputs_b ||
        correlator.rows() != scenario.inputs_a || correlator.cols() != scenario.inputs_b)
    {
        throw std::invalid_argument("coefficient dimensions do not match the scenario");
    }
    if (!marginal_a.allFinite() || !marginal_b.allFinite() || !correlator.allFinite() ||
        !std::isfinite(constant_offset))
    {
        throw std::invalid_argument("non-finite coefficient");
    }
}

BellFunctional BellFunctional::operator-() const
{
    BellFunctional out = *this;
    out.marginal_a = -marginal_a;
    out.marginal_b = -marginal_b;
    out.correlator = -correlator;
    out.constant_offset = -constant_offset;
    return out;
}

bool operator==(const BellFunctional& lhs, const BellFunctional& rhs)
{
    if (!(lhs.scenario == rhs.scenario) || lhs.marginal_a.size() != rhs.marginal_a.size() ||
        lhs.marginal_b.size() != rhs.marginal_b.size() || lhs.correlator.rows() != rhs.correlator.rows() ||
        lhs.correlator.cols() != rhs.correlator.cols())
    {
        return false;
    }
    return lhs.constant_offset == rhs.constant_offset && (lhs.marginal_a.array() == rhs.marginal_a.array()).all() &&
           (lhs.marginal_b.array() == rhs.marginal_b.array()).all() &&
           (lhs.correlator.array() == rhs.correlator.array()).all();
}

BellFunctional chsh()
{
    BellFunctional f(Scenario(2, 2));
    f.correlator << 1, 1,
                    1, -1;
    return f;
}

BellFunctional i3322()
{
    BellFunctional f(Scenario(3, 3));
    f.marginal_a << 1, -1, 0;
    f.marginal_b << 1, -1, 0;
    f.correlator << -1, 1, 1,
                     1, -1, 1,
                     1, 1, 0;
    return f;
}

// ---------------------------------------------------------------------------
// PRNG

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k)
{
    return (x << k) | (x >> (64 - k));
}

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed)
{
    for (auto& word : s_)
    {
        word = splitmix64(seed);
    }
}

std::uint64_t Xoshiro256::next()
{
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256::uniform_pm1()
{
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

BellFunctional random_rxx22(int x, std::uint64_t seed)
{
    if (x < 1)
    {
        throw std::invalid_argument("random_rxx22 needs x >= 1");
    }
    BellFunctional f(Scenario(x, x));
    Xoshiro256 rng(seed);
    for (int i = 0; i < x; ++i)
    {
        f.marginal_a(i) = rng.uniform_pm1();
    }
    for (int i = 0; i < x; ++i)
    {
        f.marginal_b(i) = rng.uniform_pm1();
    }
    for (int a = 0; a < x; ++a)
    {
        for (int b = 0; b < x; ++b)
        {
            f.correlator(a, b) = rng.uniform_pm1();
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// Text format

ParseError::ParseError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line)
{
}

namespace {

std::vector<std::string_view> tokenize(std::string_view line)
{
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size())
    {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])))
        {
            ++pos;
        }
        std::size_t end = pos;
        while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end])))
        {
            ++end;
        }
        if (end > pos)
        {
            tokens.push_back(line.substr(pos, end - pos));
        }
        pos = end;
    }
    return tokens;
}

template <typename T>
bool parse_number(std::string_view token, T& value)
{
    if (!token.empty() && token.front() == '+')
    {
        token.remove_prefix(1);
    }
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last;
}

struct Setting
{
    char party;
    int index;  // 0-based
};

Setting parse_setting(std::string_view token, const Scenario& s, int line)
{
    if (token.size() < 2 || (token[0] != 'A' && token[0] != 'B'))
    {
        throw ParseError(line, "malformed token '" + std::string(token) + "'");
    }
    int index = 0;
    if (!parse_number(token.substr(1), index) || token[1] == '+' || token[1] == '-')
    {
        throw ParseError(line, "malformed token '" + std::string(token) + "'");
    }
    const int limit = token[0] == 'A' ? s.inputs_a : s.inputs_b;
    if (index < 1 || index > limit)
    {
        throw ParseError(line, "setting index " + std::to_string(index) + " exceeds m_" + token[0] + "=" +
                                   std::to_string(limit));
    }
    return {token[0], index - 1};
}

double parse_coefficient(std::string_view token, int line)
{
    double value = 0.0;
    if (!parse_number(token, value))
    {
        throw ParseError(line, "malformed coefficient '" + std::string(token) + "'");
    }
    if (!std::isfinite(value))
    {
        throw ParseError(line, "non-finite coefficient");
    }
    return value;
}

std::string format_double(double v)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

}  // namespace

BellFunctional parse_functional(std::istream& in)
{
    std::string raw;
    int line_no = 0;
    bool have_scenario = false;
    BellFunctional f;
    // (kind, a, b): kind 0 = A marginal, 1 = B marginal, 2 = correlator, 3 = offset
    std::set<std::array<int, 3>> seen;

    while (std::getline(in, raw))
    {
        ++line_no;
        std::string_view line(raw);
        if (auto hash = line.find('#'); hash != std::string_view::npos)
        {
            line = line.substr(0, hash);
        }
        const auto tokens = tokenize(line);
        if (tokens.empty())
        {
            continue;
        }

        if (!have_scenario)
        {
            int a = 0;
            int b = 0;
            if (tokens.size() != 3 || tokens[0] != "scenario" || !parse_number(tokens[1], a) ||
                !parse_number(tokens[2], b))
            {
                throw ParseError(line_no, "expected 'scenario <m_A> <m_B>'");
            }
            if (a < 1 || b < 1)
            {
                throw ParseError(line_no, "scenario sizes must be positive");
            }
            f = BellFunctional(Scenario(a, b));
            have_scenario = true;
            continue;
        }

        std::array<int, 3> key{};
        if (tokens.size() == 2 && tokens[0] == "offset")
        {
            key = {3, 0, 0};
            if (!seen.insert(key).second)
            {
                throw ParseError(line_no, "duplicate term");
            }
            f.constant_offset = parse_coefficient(tokens[1], line_no);
        }
        else if (tokens.size() == 2)
        {
            const Setting s = parse_setting(tokens[0], f.scenario, line_no);
            const double c = parse_coefficient(tokens[1], line_no);
            key = {s.party == 'A' ? 0 : 1, s.index, 0};
            if (!seen.insert(key).second)
            {
                throw ParseError(line_no, "duplicate term");
            }
            (s.party == 'A' ? f.marginal_a : f.marginal_b)(s.index) = c;
        }
        else if (tokens.size() == 3)
        {
            const Setting sa = parse_setting(tokens[0], f.scenario, line_no);
            const Setting sb = parse_setting(tokens[1], f.scenario, line_no);
            if (sa.party != 'A' || sb.party != 'B')
            {
                throw ParseError(line_no, "correlator terms are written 'A<x> B<y> <coeff>'");
            }
            const double c = parse_coefficient(tokens[2], line_no);
            key = {2, sa.index, sb.index};
            if (!seen.insert(key).second)
            {
                throw ParseError(line_no, "duplicate term");
            }
            f.correlator(sa.index, sb.index) = c;
        }
        else
        {
            throw ParseError(line_no, "expected a term of the form 'A<x> <c>', 'B<y> <c>' or 'A<x> B<y> <c>'");
        }
    }
    if (!have_scenario)
    {
        throw ParseError(line_no == 0 ? 1 : line_no, "missing 'scenario' line");
    }
    return f;
}

BellFunctional parse_functional(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_functional(in);
}

BellFunctional load_functional(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw std::runtime_error("cannot open functional file '" + path + "'");
    }
    return parse_functional(in);
}

std::string serialize_functional(const BellFunctional& f)
{
    f.validate();
    std::ostringstream out;
    out << "scenario " << f.scenario.inputs_a << ' ' << f.scenario.inputs_b << '\n';
    if (f.constant_offset != 0.0 || std::signbit(f.constant_offset))
    {
        out << "offset " << format_double(f.constant_offset) << '\n';
    }
    for (int x = 0; x < f.scenario.inputs_a; ++x)
    {
        out << 'A' << x + 1 << ' ' << format_double(f.marginal_a(x)) << '\n';
    }
    for (int y = 0; y < f.scenario.inputs_b; ++y)
    {
        out << 'B' << y + 1 << ' ' << format_double(f.marginal_b(y)) << '\n';
    }
    for (int x = 0; x < f.scenario.inputs_a; ++x)
    {
        for (int y = 0; y < f.scenario.inputs_b; ++y)
        {
            out << 'A' << x + 1 << " B" << y + 1 << ' ' << format_double(f.correlator(x, y)) << '\n';
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------

double local_bound_bruteforce(const BellFunctional& f, int max_total_inputs)
{
    f.validate();
    const int ma = f.scenario.inputs_a;
    const int mb = f.scenario.inputs_b;
    if (ma + mb > max_total_inputs)
    {
        throw std::length_error("scenario too large for brute-force local bound (" + std::to_string(ma + mb) +
                                " > " + std::to_string(max_total_inputs) + " settings)");
    }

    // Every assignment of the smaller party is enumerated; for a fixed one,
    // the best response of the other party is a sign choice per setting.
    const bool enumerate_a = ma <= mb;
    const Eigen::MatrixXd corr = enumerate_a ? f.correlator : Eigen::MatrixXd(f.correlator.transpose());
    const Eigen::VectorXd& own = enumerate_a ? f.marginal_a : f.marginal_b;
    const Eigen::VectorXd& other = enumerate_a ? f.marginal_b : f.marginal_a;
    const int k = static_cast<int>(own.size());

    double best = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd signs(k);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask)
    {
        for (int i = 0; i < k; ++i)
        {
            signs(i) = ((mask >> i) & 1) ? -1.0 : 1.0;
        }
        const Eigen::VectorXd field = other + corr.transpose() * signs;
        const double value = own.dot(signs) + field.cwiseAbs().sum();
        best = std::max(best, value);
    }
    return best + f.constant_offset;
}

}  // namespace npabound
