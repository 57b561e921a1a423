#include "support.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "npabound/bench.hpp"
#include "npabound/monomial.hpp"
#include "npabound/npa.hpp"
#include "npabound/projections.hpp"
#include "npabound/sdp.hpp"

namespace npatest {

using namespace npabound;

std::vector<int> cancel_pairs(const std::vector<int>& w)
{
    std::vector<int> out;
    for (int letter : w)
    {
        if (!out.empty() && out.back() == letter)
        {
            out.pop_back();
        }
        else
        {
            out.push_back(letter);
        }
    }
    return out;
}

namespace {

// Raw letters are 0..ma-1 for Alice and ma..ma+mb-1 for Bob.
Word reduce_raw(const std::vector<int>& raw, int ma)
{
    std::vector<int> a;
    std::vector<int> b;
    for (int letter : raw)
    {
        if (letter < ma)
        {
            a.push_back(letter);
        }
        else
        {
            b.push_back(letter - ma);
        }
    }
    return {cancel_pairs(a), cancel_pairs(b)};
}

std::vector<int> reversed(std::vector<int> w)
{
    std::reverse(w.begin(), w.end());
    return w;
}

}  // namespace

std::set<Word> enumerate_reduced_words(int inputs_a, int inputs_b, int level)
{
    const int letters = inputs_a + inputs_b;
    std::set<Word> out;
    std::vector<int> raw;
    std::function<void()> grow = [&] {
        out.insert(reduce_raw(raw, inputs_a));
        if (static_cast<int>(raw.size()) == level)
        {
            return;
        }
        for (int l = 0; l < letters; ++l)
        {
            raw.push_back(l);
            grow();
            raw.pop_back();
        }
    };
    grow();
    return out;
}

std::size_t count_words_no_repeat(int m, int length)
{
    std::size_t count = 0;
    std::vector<int> w(static_cast<std::size_t>(length), 0);
    while (true)
    {
        bool ok = true;
        for (int i = 1; i < length; ++i)
        {
            ok = ok && w[i] != w[i - 1];
        }
        count += ok ? 1 : 0;
        int pos = length - 1;
        while (pos >= 0 && ++w[pos] == m)
        {
            w[pos--] = 0;
        }
        if (pos < 0)
        {
            return count;
        }
    }
}

std::size_t count_adjoint_classes(int inputs_a, int inputs_b, int level)
{
    const std::set<Word> basis = enumerate_reduced_words(inputs_a, inputs_b, level);
    std::set<Word> classes;
    for (const Word& u : basis)
    {
        for (const Word& v : basis)
        {
            std::vector<int> a = reversed(u.first);
            a.insert(a.end(), v.first.begin(), v.first.end());
            std::vector<int> b = reversed(u.second);
            b.insert(b.end(), v.second.begin(), v.second.end());
            Word w{cancel_pairs(a), cancel_pairs(b)};
            Word adj{reversed(w.first), reversed(w.second)};
            classes.insert(std::min(w, adj));
        }
    }
    return classes.size();
}

double local_bound_full_enumeration(const BellFunctional& f)
{
    const int ma = f.scenario.inputs_a;
    const int mb = f.scenario.inputs_b;
    if (ma + mb > 22)
    {
        throw std::length_error("too many settings for full enumeration");
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << (ma + mb)); ++mask)
    {
        auto a = [&](int x) { return (mask >> x) & 1u ? -1.0 : 1.0; };
        auto b = [&](int y) { return (mask >> (ma + y)) & 1u ? -1.0 : 1.0; };
        double value = f.constant_offset;
        for (int x = 0; x < ma; ++x)
        {
            value += f.marginal_a(x) * a(x);
        }
        for (int y = 0; y < mb; ++y)
        {
            value += f.marginal_b(y) * b(y);
        }
        for (int x = 0; x < ma; ++x)
        {
            for (int y = 0; y < mb; ++y)
            {
                value += f.correlator(x, y) * a(x) * b(y);
            }
        }
        best = std::max(best, value);
    }
    return best;
}

SdpaProblem read_sdpa(std::istream& in)
{
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
    {
        if (line.empty() || line[0] == '*' || line[0] == '"')
        {
            continue;
        }
        std::replace_if(line.begin(), line.end(), [](char ch) { return ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')'; }, ' ');
        lines.push_back(line);
    }
    if (lines.size() < 4)
    {
        throw std::runtime_error("truncated SDPA file");
    }
    SdpaProblem p;
    int nblocks = 0;
    std::istringstream(lines[0]) >> p.m;
    std::istringstream(lines[1]) >> nblocks;
    std::istringstream(lines[2]) >> p.block_size;
    if (nblocks != 1 || p.block_size <= 0 || p.m < 0)
    {
        throw std::runtime_error("unsupported SDPA header");
    }
    p.c.resize(p.m);
    std::istringstream cline(lines[3]);
    for (int i = 0; i < p.m; ++i)
    {
        if (!(cline >> p.c(i)))
        {
            throw std::runtime_error("short c vector");
        }
    }
    const int n = p.block_size;
    p.F0 = Eigen::MatrixXd::Zero(n, n);
    p.F.assign(static_cast<std::size_t>(p.m), Eigen::MatrixXd::Zero(n, n));
    for (std::size_t k = 4; k < lines.size(); ++k)
    {
        std::istringstream entry(lines[k]);
        int matno = 0;
        int block = 0;
        int i = 0;
        int j = 0;
        double v = 0;
        if (!(entry >> matno >> block >> i >> j >> v) || block != 1 || matno < 0 || matno > p.m || i < 1 || j < 1 ||
            i > n || j > n)
        {
            throw std::runtime_error("bad SDPA entry: " + lines[k]);
        }
        Eigen::MatrixXd& M = matno == 0 ? p.F0 : p.F[static_cast<std::size_t>(matno - 1)];
        M(i - 1, j - 1) = v;
        M(j - 1, i - 1) = v;
    }
    return p;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd random_symmetric(Rng& rng, Eigen::Index n, double scale)
{
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::MatrixXd W(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        for (Eigen::Index j = i; j < n; ++j)
        {
            W(i, j) = W(j, i) = normal(rng);
        }
    }
    return W;
}

BellFunctional random_functional(Rng& rng, int max_inputs)
{
    std::uniform_int_distribution<int> inputs(1, max_inputs);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    BellFunctional f(Scenario(inputs(rng), inputs(rng)));
    for (Eigen::Index i = 0; i < f.marginal_a.size(); ++i)
    {
        f.marginal_a(i) = coeff(rng);
    }
    for (Eigen::Index i = 0; i < f.marginal_b.size(); ++i)
    {
        f.marginal_b(i) = coeff(rng);
    }
    for (Eigen::Index i = 0; i < f.correlator.size(); ++i)
    {
        f.correlator.data()[i] = coeff(rng);
    }
    return f;
}

void Outcome::record(bool ok, const std::string& what)
{
    ++cases;
    if (!ok)
    {
        if (failures == 0)
        {
            first_failure = what;
        }
        ++failures;
    }
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Letter> random_raw_word(Rng& rng, const Scenario& s, int max_len)
{
    std::uniform_int_distribution<int> len(0, max_len);
    std::uniform_int_distribution<int> letter(0, s.inputs_a + s.inputs_b - 1);
    std::vector<Letter> w(static_cast<std::size_t>(len(rng)));
    for (Letter& l : w)
    {
        const int k = letter(rng);
        l = k < s.inputs_a ? Letter{Party::A, k} : Letter{Party::B, k - s.inputs_a};
    }
    return w;
}

std::vector<Letter> letters_of(const Monomial& m)
{
    std::vector<Letter> out;
    for (int x : m.a_word)
    {
        out.push_back({Party::A, x});
    }
    for (int y : m.b_word)
    {
        out.push_back({Party::B, y});
    }
    return out;
}

Scenario random_scenario(Rng& rng, int max_inputs)
{
    std::uniform_int_distribution<int> inputs(1, max_inputs);
    return Scenario(inputs(rng), inputs(rng));
}

DualSdp<double> random_dual(Rng& rng)
{
    std::uniform_int_distribution<int> level(1, 2);
    BellFunctional f = random_functional(rng, 3);
    return dualize(assemble_primal<double>(f, build_moment_matrix(f.scenario, level(rng))));
}

}  // namespace

Outcome prop_reduce_idempotent(int cases, std::uint64_t seed)
{
    Outcome out{"monomial reduce idempotence and length bound", 0, 0, {}};
    Rng rng(seed);
    for (int c = 0; c < cases; ++c)
    {
        const Scenario s = random_scenario(rng, 4);
        const auto u = random_raw_word(rng, s, 8);
        const auto v = random_raw_word(rng, s, 8);
        const Monomial ru = reduce(u, s);
        const Monomial rv = reduce(v, s);
        const auto again = letters_of(ru);
        std::vector<Letter> uv = u;
        uv.insert(uv.end(), v.begin(), v.end());
        const Monomial ruv = reduce(uv, s);

        // test-local reduction of the same raw word
        std::vector<int> raw;
        for (const Letter& l : u)
        {
            raw.push_back(l.party == Party::A ? l.setting : s.inputs_a + l.setting);
        }
        const Word oracle = reduce_raw(raw, s.inputs_a);

        const bool ok = reduce(again, s) == ru && ruv.length() <= u.size() + v.size() &&
                        multiply(ru, rv) == ruv && oracle.first == ru.a_word && oracle.second == ru.b_word;
        out.record(ok, "word " + to_string(ru) + " / " + to_string(rv));
    }
    return out;
}

Outcome prop_adjoint_involution(int cases, std::uint64_t seed)
{
    Outcome out{"monomial adjoint involution", 0, 0, {}};
    Rng rng(seed);
    for (int c = 0; c < cases; ++c)
    {
        const Scenario s = random_scenario(rng, 4);
        const Monomial m = reduce(random_raw_word(rng, s, 10), s);
        const Monomial a = adjoint(m);
        const Monomial rep = adjoint_class_representative(m);
        const bool ok = adjoint(a) == m && a.length() == m.length() && (rep == m || rep == a) &&
                        adjoint_class_representative(a) == rep;
        out.record(ok, to_string(m));
    }
    return out;
}

Outcome prop_psd_nonexpansive(int cases, std::uint64_t seed)
{
    Outcome out{"PSD projection nonexpansiveness and idempotence", 0, 0, {}};
    Rng rng(seed);
    std::uniform_int_distribution<int> size(1, 12);
    for (int c = 0; c < cases; ++c)
    {
        const Eigen::Index n = size(rng);
        const Eigen::MatrixXd W1 = random_symmetric(rng, n);
        const Eigen::MatrixXd W2 = c % 2 == 0 ? random_symmetric(rng, n) : Eigen::MatrixXd(W1 + 1e-3 * random_symmetric(rng, n));
        const Eigen::MatrixXd P1 = project_psd(W1);
        const Eigen::MatrixXd P2 = project_psd(W2);
        const double scale = 1e-12 * (1.0 + W1.norm() + W2.norm());
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P1);
        const bool ok = (P1 - P2).norm() <= (W1 - W2).norm() + scale && (project_psd(P1) - P1).norm() <= scale &&
                        es.eigenvalues()(0) >= -scale;
        out.record(ok, "n=" + std::to_string(n));
    }
    return out;
}

Outcome prop_affine_nonexpansive(int cases, std::uint64_t seed)
{
    Outcome out{"affine projection nonexpansiveness and membership", 0, 0, {}};
    Rng rng(seed);
    for (int c = 0; c < cases; ++c)
    {
        const DualSdp<double> d = random_dual(rng);
        const AffineFamily<double> fam(d);
        const Eigen::MatrixXd W1 = random_symmetric(rng, d.n(), 2.0);
        const Eigen::MatrixXd W2 = random_symmetric(rng, d.n(), 2.0);
        const auto P1 = project_affine(fam, W1).point;
        const auto P2 = project_affine(fam, W2).point;
        const double scale = 1e-10 * (1.0 + W1.norm() + W2.norm() + d.C().norm());
        // membership: y recovered from the matrix reproduces it
        const Eigen::VectorXd y_back = recover_y(d, P1.matrix);
        const bool ok = (P1.matrix - P2.matrix).norm() <= (W1 - W2).norm() + scale &&
                        (y_back - P1.y).norm() <= 1e-10 * (1.0 + P1.y.norm()) &&
                        (project_affine(fam, P1.matrix).point.matrix - P1.matrix).norm() <= scale;
        out.record(ok, "n=" + std::to_string(d.n()) + " m=" + std::to_string(d.m()));
    }
    return out;
}

Outcome prop_fejer_monotone(int cases, std::uint64_t seed)
{
    Outcome out{"Fejer monotonicity of alternating projections", 0, 0, {}};
    Rng rng(seed);
    std::uniform_real_distribution<double> exile(0.0, 3.0);
    for (int c = 0; c < cases; ++c)
    {
        const DualSdp<double> d = random_dual(rng);
        const AffineFamily<double> fam(d);
        const auto start = project_affine(fam, exile_point(d, std::pow(10.0, exile(rng))).matrix).point;
        const auto res = alternate_project(fam, start, 1e-8, 300);
        bool ok = true;
        const auto& h = res.distance_history;
        for (std::size_t i = 1; i < h.size(); ++i)
        {
            ok = ok && h[i] <= h[i - 1] * (1 + 1e-9) + 1e-13;
        }
        out.record(ok, "n=" + std::to_string(d.n()));
    }
    return out;
}

Outcome prop_certificate_forced_negative(int cases, std::uint64_t seed)
{
    Outcome out{"certificate validity under forced negative eigenvalue", 0, 0, {}};
    Rng rng(seed);
    std::uniform_real_distribution<double> delta(1e-3, 2.0);
    SolverConfig cfg;
    cfg.refine_iters = 5;
    for (int c = 0; c < cases; ++c)
    {
        BellFunctional f = random_functional(rng, 4);
        const DualSdp<double> d = dualize(assemble_primal<double>(f, build_moment_matrix(f.scenario, 1)));
        const auto n = d.n();
        const SolveReport<double> report = solve(d, cfg);

        // push the slack below the cone by shrinking every diagonal multiplier
        const double dl = delta(rng);
        Eigen::VectorXd y = report.point.y;
        y.head(n).array() -= dl;
        const Certificate<double> cert = certify(d, y);
        const double lam = cert.min_eigenvalue;

        // shifting the diagonal multipliers back by |lambda_min| gives a PSD slack
        Eigen::VectorXd shifted = y;
        shifted.head(n).array() += std::max(0.0, -lam);
        const Eigen::MatrixXd Z = slack(d, shifted);
        const double zmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Z).eigenvalues()(0);
        const double scale = 1e-10 * (1.0 + Z.norm());

        const double trace_c = d.C().trace();  // <C, I>: I satisfies every primal constraint
        const bool ok = lam < 0 && std::abs(cert.certified_bound - (cert.raw_bound + n * (-lam))) <= scale &&
                        zmin >= -scale && std::abs(d.b().dot(shifted) - cert.certified_bound) <= scale &&
                        cert.certified_bound >= trace_c - 1e-9 &&
                        cert.certified_bound >= local_bound_full_enumeration(f) - 1e-9;
        out.record(ok, "case " + std::to_string(c));
    }
    return out;
}

namespace {

double random_coefficient(Rng& rng)
{
    std::uniform_int_distribution<int> kind(0, 7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-300, 300);
    std::uniform_int_distribution<int> integer(-1000, 1000);
    switch (kind(rng))
    {
        case 0: return 0.0;
        case 1: return -0.0;
        case 2: return integer(rng);
        case 3: return unit(rng) * std::pow(10.0, exponent(rng));
        case 4: return std::numeric_limits<double>::denorm_min() * integer(rng);
        case 5: return std::nextafter(unit(rng), 2.0);
        default: return unit(rng);
    }
}

bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
    {
        return false;
    }
    for (Eigen::Index i = 0; i < a.size(); ++i)
    {
        if (std::bit_cast<std::uint64_t>(a.data()[i]) != std::bit_cast<std::uint64_t>(b.data()[i]))
        {
            return false;
        }
    }
    return true;
}

}  // namespace

Outcome prop_parser_round_trip(int cases, std::uint64_t seed)
{
    Outcome out{"functional file round trip", 0, 0, {}};
    Rng rng(seed);
    for (int c = 0; c < cases; ++c)
    {
        BellFunctional f(random_scenario(rng, 7));
        for (Eigen::Index i = 0; i < f.marginal_a.size(); ++i)
        {
            f.marginal_a(i) = random_coefficient(rng);
        }
        for (Eigen::Index i = 0; i < f.marginal_b.size(); ++i)
        {
            f.marginal_b(i) = random_coefficient(rng);
        }
        for (Eigen::Index i = 0; i < f.correlator.size(); ++i)
        {
            f.correlator.data()[i] = random_coefficient(rng);
        }
        f.constant_offset = c % 3 == 0 ? random_coefficient(rng) : 0.0;

        const std::string text = serialize_functional(f);
        const BellFunctional g = parse_functional(text);
        const bool ok = g == f && bitwise_equal(g.marginal_a, f.marginal_a) &&
                        bitwise_equal(g.marginal_b, f.marginal_b) && bitwise_equal(g.correlator, f.correlator) &&
                        std::bit_cast<std::uint64_t>(g.constant_offset) ==
                            std::bit_cast<std::uint64_t>(f.constant_offset) &&
                        serialize_functional(g) == text;
        out.record(ok, text.substr(0, 60));
    }
    return out;
}

Outcome prop_bench_determinism(int cases, std::uint64_t seed)
{
    Outcome out{"bench determinism", 0, 0, {}};
    Rng rng(seed);
    std::uniform_int_distribution<int> xs(2, 5);
    std::uniform_int_distribution<std::uint64_t> seeds;
    BenchOptions options;
    options.solver.refine_iters = 3;
    for (int c = 0; c < cases; ++c)
    {
        const int x = xs(rng);
        const std::uint64_t s = seeds(rng);
        const BenchRecord r1 = bench_instance(x, s, options);
        const BenchRecord r2 = bench_instance(x, s, options);
        const bool ok = !r1.failed() && r1.bound && r2.bound &&
                        std::bit_cast<std::uint64_t>(*r1.bound) == std::bit_cast<std::uint64_t>(*r2.bound) &&
                        r1.inner_iterations == r2.inner_iterations && r1.n == r2.n && r1.m == r2.m;
        out.record(ok, r1.instance);
    }

    // the threaded sweep reproduces the sequential one row for row
    options.xs = {2, 3, 4};
    options.runs = 4;
    options.base_seed = seeds(rng);
    options.threads = 1;
    const auto sequential = run_bench(options);
    options.threads = 3;
    const auto threaded = run_bench(options);
    bool same = sequential.size() == threaded.size();
    for (std::size_t i = 0; same && i < sequential.size(); ++i)
    {
        same = sequential[i].instance == threaded[i].instance && sequential[i].agg == threaded[i].agg &&
               sequential[i].bound == threaded[i].bound;
    }
    out.record(same, "threaded sweep");
    return out;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, bool>> unit_oracle_checks()
{
    std::vector<std::pair<std::string, bool>> checks;
    auto check = [&](const std::string& name, auto&& fn) {
        bool ok = false;
        try
        {
            ok = fn();
        }
        catch (const std::exception&)
        {
            ok = false;
        }
        checks.emplace_back(name, ok);
    };

    const Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(2, 2);
    check("project_psd(identity) = identity", [&] { return (project_psd(I2) - I2).norm() <= 1e-15; });
    check("project_psd(diag(3,-2)) = diag(3,0)", [&] {
        Eigen::MatrixXd W(2, 2);
        W << 3, 0, 0, -2;
        Eigen::MatrixXd expected(2, 2);
        expected << 3, 0, 0, 0;
        return (project_psd(W) - expected).norm() <= 1e-15;
    });
    check("project_psd([[0,1],[1,0]]) = 0.5 ones", [&] {
        Eigen::MatrixXd W(2, 2);
        W << 0, 1, 1, 0;
        return (project_psd(W) - Eigen::MatrixXd::Constant(2, 2, 0.5)).norm() <= 1e-15;
    });
    check("normal equation: A1 = E11, W = [[5,3],[3,7]] -> y = 5", [&] {
        StandardFormSdp<double> p;
        p.n = 2;
        p.C = Eigen::MatrixXd::Zero(2, 2);
        Eigen::SparseMatrix<double> A(2, 2);
        A.insert(0, 0) = 1.0;
        p.constraints.push_back(A);
        p.b = Eigen::VectorXd::Ones(1);
        const DualSdp<double> d = dualize(p);
        const AffineFamily<double> fam(d);
        Eigen::MatrixXd W(2, 2);
        W << 5, 3, 3, 7;
        Eigen::MatrixXd expected(2, 2);
        expected << 5, 0, 0, 0;
        const auto r = project_affine(fam, W).point;
        return r.y.size() == 1 && std::abs(r.y(0) - 5.0) <= 1e-15 && (r.matrix - expected).norm() <= 1e-15;
    });

    const std::pair<Scenario, int> counts[] = {{Scenario(3, 3), 1}, {Scenario(3, 3), 2}, {Scenario(3, 3), 3}};
    const std::size_t expected_counts[] = {7, 28, 88};
    for (int k = 0; k < 3; ++k)
    {
        const auto [s, level] = counts[k];
        check("basis size (3,3) level " + std::to_string(level) + " = " + std::to_string(expected_counts[k]), [&] {
            const std::size_t oracle = enumerate_reduced_words(3, 3, level).size();
            return build_basis(s, level).size() == expected_counts[k] && oracle == expected_counts[k] &&
                   basis_size(s, level) == expected_counts[k];
        });
    }
    check("basis size (130,130) level 1 = 261", [&] {
        const std::size_t oracle = 1 + count_words_no_repeat(130, 1) * 2;
        return build_basis(Scenario(130, 130), 1).size() == 261 && oracle == 261;
    });
    check("(3,3) level 2 size matches the reduced-word product count", [&] {
        std::size_t total = 0;
        for (int a = 0; a <= 2; ++a)
        {
            for (int b = 0; a + b <= 2; ++b)
            {
                total += count_words_no_repeat(3, a) * count_words_no_repeat(3, b);
            }
        }
        return total == 28;
    });
    check("CHSH level 1 has 11 classes", [&] {
        return build_moment_matrix(Scenario(2, 2), 1).class_count() == 11 && count_adjoint_classes(2, 2, 1) == 11;
    });
    check("moment matrix diagonal is the identity class", [&] {
        const auto mm = build_moment_matrix(Scenario(3, 3), 2);
        for (Eigen::Index i = 0; i < mm.n(); ++i)
        {
            if (mm.entry_class(i, i) != 0)
            {
                return false;
            }
        }
        return mm.classes[0].is_identity();
    });
    check("CHSH entry (A1, B1) is the class of A1B1", [&] {
        const auto mm = build_moment_matrix(Scenario(2, 2), 1);
        const auto find = [&](const Monomial& m) {
            return std::find(mm.basis.begin(), mm.basis.end(), m) - mm.basis.begin();
        };
        return mm.entry_class(find(Monomial::alice(0)), find(Monomial::bob(0))) ==
               *mm.class_of(Monomial::correlator(0, 0));
    });
    check("CHSH Tsirelson moment matrix contracts to 2 sqrt 2", [&] {
        const auto mm = build_moment_matrix(Scenario(2, 2), 1);
        const auto p = assemble_primal<double>(chsh(), mm);
        const auto find = [&](const Monomial& m) {
            return std::find(mm.basis.begin(), mm.basis.end(), m) - mm.basis.begin();
        };
        const double r = 1.0 / std::sqrt(2.0);
        const double corr[2][2] = {{r, r}, {r, -r}};
        Eigen::MatrixXd X = Eigen::MatrixXd::Identity(5, 5);
        for (int x = 0; x < 2; ++x)
        {
            for (int y = 0; y < 2; ++y)
            {
                const auto i = find(Monomial::alice(x));
                const auto j = find(Monomial::bob(y));
                X(i, j) = X(j, i) = corr[x][y];
            }
        }
        bool feasible = true;
        for (std::size_t k = 0; k < p.constraints.size(); ++k)
        {
            feasible = feasible && std::abs(Eigen::MatrixXd(p.constraints[k]).cwiseProduct(X).sum() - p.b(k)) <= 1e-15;
        }
        return feasible && std::abs(p.objective(X) - 2.0 * std::sqrt(2.0)) <= 1e-12;
    });
    check("all-zero functional gives C = 0 and b = (1..1, 0..0)", [&] {
        const auto mm = build_moment_matrix(Scenario(2, 3), 2);
        const auto p = assemble_primal<double>(BellFunctional(Scenario(2, 3)), mm);
        bool ok = p.C.isZero(0.0) && p.b.size() == static_cast<Eigen::Index>(p.constraints.size());
        for (Eigen::Index i = 0; i < p.b.size(); ++i)
        {
            ok = ok && p.b(i) == (i < p.n ? 1.0 : 0.0);
        }
        return ok;
    });
    check("project_affine of a family member returns it exactly", [&] {
        const DualSdp<double> d = dualize(assemble_primal<double>(i3322(), build_moment_matrix(Scenario(3, 3), 2)));
        const AffineFamily<double> fam(d);
        const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(d.m(), -1.0, 2.0);
        const auto member = family_point(d, y);
        const auto r = project_affine(fam, member.matrix).point;
        const auto again = project_affine(fam, r.matrix).point;
        return (r.matrix - member.matrix).norm() <= 1e-12 * member.matrix.norm() &&
               (r.y - y).norm() <= 1e-12 * y.norm() && (again.matrix - r.matrix).norm() <= 1e-12 * r.matrix.norm();
    });
    check("alternate_project from a PSD start takes 0 iterations", [&] {
        const DualSdp<double> d = dualize(assemble_primal<double>(chsh(), build_moment_matrix(Scenario(2, 2), 1)));
        const AffineFamily<double> fam(d);
        Eigen::VectorXd y = Eigen::VectorXd::Zero(d.m());
        y.head(d.n()).setConstant(10.0);
        const auto r = alternate_project(fam, family_point(d, y), 1e-8, 100);
        return r.iterations == 0 && r.converged && r.point.matrix == family_point(d, y).matrix;
    });
    check("dykstra_project of an intersection point returns it", [&] {
        const DualSdp<double> d = dualize(assemble_primal<double>(chsh(), build_moment_matrix(Scenario(2, 2), 1)));
        const AffineFamily<double> fam(d);
        Eigen::VectorXd y = Eigen::VectorXd::Zero(d.m());
        y.head(d.n()).setConstant(10.0);
        const Eigen::MatrixXd W = family_point(d, y).matrix;
        const auto r = dykstra_project(fam, W, 1e-10, 100);
        return r.converged && (r.matrix - W).norm() <= 1e-12 * W.norm();
    });
    check("Dykstra lands no farther than plain alternation", [&] {
        Rng rng(99);
        for (int c = 0; c < 20; ++c)
        {
            const DualSdp<double> d = random_dual(rng);
            const AffineFamily<double> fam(d);
            const Eigen::MatrixXd W = random_symmetric(rng, d.n(), 3.0);
            const auto dk = dykstra_project(fam, W, 1e-10, 20000);
            const auto ap = alternate_project(fam, project_affine(fam, W).point, 1e-10, 20000);
            if (!dk.converged || !ap.converged || (W - dk.matrix).norm() > (W - ap.point.matrix).norm() + 1e-8)
            {
                return false;
            }
        }
        return true;
    });
    check("direct and iterative affine paths agree", [&] {
        Rng rng(7);
        for (int c = 0; c < 20; ++c)
        {
            const DualSdp<double> d = random_dual(rng);
            const AffineFamily<double> direct(d, AffinePath::Direct);
            const AffineFamily<double> iterative(d, AffinePath::Iterative);
            const Eigen::MatrixXd W = random_symmetric(rng, d.n(), 2.0);
            const auto a = direct.project(W);
            const auto b = iterative.project(W);
            if (d.n() > 30 || (a.point.matrix - b.point.matrix).norm() > 1e-10 * (1.0 + a.point.matrix.norm()))
            {
                return false;
            }
        }
        return true;
    });
    return checks;
}

SolverConfig deep_config(int steps)
{
    SolverConfig cfg;
    cfg.refine_iters = steps;
    return cfg;
}

}  // namespace npatest
