#pragma once

#include <iosfwd>
#include <string>

#include "growthbound/matrix.hpp"

namespace growthbound {

/// Text matrix format:
///
///   rows cols mode
///   a11 a12 ...
///   ...
///
/// `mode` is one of rational-real, rational-complex, binary64-real,
/// binary64-complex. Rationals are written "p/q" (or an integer), complex
/// entries "re,im". Binary64 entries are read as decimal literals.
AnyMatrix read_matrix(std::istream& in);
AnyMatrix read_matrix_file(const std::string& path);

void write_matrix(std::ostream& out, const AnyMatrix& m);

}  // namespace growthbound
