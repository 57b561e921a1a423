#pragma once

#include <iosfwd>
#include <string>

#include "npabound/sdp.hpp"

namespace npabound {

// Sparse SDPA (.dat-s) layout, single block:
//   m / nblocks=1 / n / b / "matno 1 i j value" per nonzero upper-triangular
//   entry (matno 0 = C, i = A_i, 1-based indices).
// SDPA's primal is min c.x s.t. sum F_i x_i - F_0 PSD; with c = b, F_0 = C and
// F_i = A_i that is exactly our dual, so a solver's reported primal optimum is
// the bound. Header comment lines start with '*'.
void write_sdpa(const StandardFormSdp<double>& p, std::ostream& out);
void write_sdpa(const StandardFormSdp<double>& p, const std::string& path);

}  // namespace npabound
