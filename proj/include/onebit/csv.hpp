#pragma once

#include <string>

namespace onebit {

/// Shortest decimal string that round-trips the double; '.' decimal point,
/// locale independent. Used for all CSV/JSON number output so identical
/// configs produce byte-identical files.
std::string format_double(double v);

}  // namespace onebit
