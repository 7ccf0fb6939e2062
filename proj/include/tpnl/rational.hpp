#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace tpnl {

/// Exact scalar. mpq_class keeps values canonical (positive denominator,
/// reduced, zero as 0/1) after every arithmetic operation.
using Rational = mpq_class;

/// Raised for malformed inputs: shape mismatches, bad indices, unknown names,
/// unparsable files. The CLI maps it to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "p" or "p/q" (optional leading '-', decimal digits only).
Rational parse_rational(std::string_view text);

/// Canonical text form: "p" when the denominator is 1, otherwise "p/q".
std::string to_string(const Rational& value);

}  // namespace tpnl
