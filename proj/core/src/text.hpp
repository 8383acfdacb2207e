#pragma once

#include <string_view>
#include <vector>

namespace tcx::detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline void split(std::string_view s, char delim, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(delim, pos);
        if (next == std::string_view::npos) {
            out.push_back(s.substr(pos));
            return;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
}

// Calls f(line, line_number) for every line; strips a trailing '\r'.
template <class F>
void for_each_line(std::string_view text, F&& f) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        f(line, ++line_no);
        pos = end + 1;
    }
}

}  // namespace tcx::detail
