#pragma once

// Minimal comma-separated helpers. Fields are never quoted: names containing
// commas, quotes or newlines are rejected on write.

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <furnish/error.hpp>

namespace furnish::csv {

inline std::vector<std::string> split(std::string_view line)
{
    if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

inline std::optional<double> parse_double(std::string_view s)
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty())
        return std::nullopt;
    return v;
}

inline std::optional<long long> parse_int(std::string_view s)
{
    long long v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty())
        return std::nullopt;
    return v;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline void check_field(std::string_view s)
{
    if (s.find_first_of(",\"\r\n") != std::string_view::npos)
        throw ValidationError("field '" + std::string(s) + "' contains a reserved CSV character");
}

/// Reads non-empty lines, tracking the 1-based line number of each.
class Reader {
public:
    explicit Reader(std::istream& in) : _in(in) {}

    bool next(std::vector<std::string>& fields)
    {
        std::string line;
        while (std::getline(_in, line)) {
            ++_line;
            if (line.empty() || line == "\r")
                continue;
            fields = split(line);
            return true;
        }
        return false;
    }

    int line() const { return _line; }

private:
    std::istream& _in;
    int _line = 0;
};

} // namespace furnish::csv
