#pragma once

#include <iosfwd>
#include <string>

#include "funcito/path.hpp"

namespace funcito {

// CSV layout: header `t,x_1..x_d,v_11..v_dd,jump_flag`, one row per grid
// time. A flagged jump at t is written as two rows with the same t: first
// the left limits (jump_flag=1), then the right values (jump_flag=0).
// Doubles are printed with 17 significant digits, so finite values
// round-trip bit-exactly.
void write_lifted_csv(std::ostream& out, const LiftedPath& p);
LiftedPath read_lifted_csv(std::istream& in);

void write_lifted_csv_file(const std::string& filename, const LiftedPath& p);
LiftedPath read_lifted_csv_file(const std::string& filename);

}  // namespace funcito
