#pragma once

#include <string>

namespace rotstar {

/// Shortest decimal string that parses back to exactly `v` ("nan"/"inf" for non-finite values).
std::string format_double(double v);

} // namespace rotstar
