#pragma once

#include "parapack/module_solver.hpp"
#include "parapack/table.hpp"

namespace parapack {

/// t, cycle, phase, v_mod, i_mod, then i_k, temp_k, soc_k, r_sei_k for k = 1..n_p.
Table trace_table(const SimTrace& trace);

/// One row per cycle; see docs/formats.md for the columns.
Table summary_table(const SimTrace& trace);

}  // namespace parapack
