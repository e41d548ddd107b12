#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "pmpo/connection.hpp"

namespace pmpo {

inline constexpr int interchange_version = 1;

/// Connection document (JSON).  Values are written as decimal strings with 17
/// significant digits, which read back bit-exactly.
std::string write_connection(const Connection& c);
void write_connection(const Connection& c, std::ostream& out);

/// Parses a connection document.  Missing weights and eigenvalues are filled in
/// from Perron-Frobenius data.  Any structural problem raises InputError.
Connection read_connection(const std::string& text);
Connection read_connection_file(const std::string& path);

/// The square underlying a connection on the original four graphs.
SquareScheme scheme_of(const Connection& c);

/// Shortest decimal with 17 significant digits.
std::string format_double(double v);

}  // namespace pmpo
