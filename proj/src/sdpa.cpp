#include "npabound/sdpa.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace npabound {

namespace {

void put_double(std::ostream& out, double v)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.write(buf.data(), ptr - buf.data());
}

void put_entry(std::ostream& out, Eigen::Index matno, Eigen::Index i, Eigen::Index j, double v)
{
    out << matno << " 1 " << i + 1 << ' ' << j + 1 << ' ';
    put_double(out, v);
    out << '\n';
}

}  // namespace

void write_sdpa(const StandardFormSdp<double>& p, std::ostream& out)
{
    out << "* NPA moment-matrix SDP, single block of size " << p.n << "\n"
        << "* SDPA primal: min b.y s.t. sum_i y_i A_i - C PSD (F0 = C, F_i = A_i, c = b).\n"
        << "* Its optimum is the upper bound on the Bell functional; no sign flip is needed.\n";
    out << p.m() << '\n' << 1 << '\n' << p.n << '\n';
    for (Eigen::Index i = 0; i < p.b.size(); ++i)
    {
        if (i > 0)
        {
            out << ' ';
        }
        put_double(out, p.b(i));
    }
    out << '\n';

    for (Eigen::Index i = 0; i < p.n; ++i)
    {
        for (Eigen::Index j = i; j < p.n; ++j)
        {
            if (p.C(i, j) != 0.0)
            {
                put_entry(out, 0, i, j, p.C(i, j));
            }
        }
    }
    for (std::size_t k = 0; k < p.constraints.size(); ++k)
    {
        // row-major upper triangle for stable output
        const Eigen::SparseMatrix<double, Eigen::RowMajor> a = p.constraints[k];
        for (Eigen::Index i = 0; i < a.outerSize(); ++i)
        {
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a, i); it; ++it)
            {
                if (it.col() >= it.row() && it.value() != 0.0)
                {
                    put_entry(out, static_cast<Eigen::Index>(k) + 1, it.row(), it.col(), it.value());
                }
            }
        }
    }
    if (!out)
    {
        throw std::runtime_error("failed writing SDPA data");
    }
}

void write_sdpa(const StandardFormSdp<double>& p, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
    {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_sdpa(p, out);
    out.flush();
    if (!out)
    {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

}  // namespace npabound
