#include "rotstar/io.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace rotstar {

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

} // namespace rotstar
