#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace antmill {

// Shortest representation that round-trips a double exactly.
inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {
inline std::string csv_cell(double v) { return format_number(v); }
inline std::string csv_cell(int v) { return std::to_string(v); }
inline std::string csv_cell(long v) { return std::to_string(v); }
inline std::string csv_cell(long long v) { return std::to_string(v); }
inline std::string csv_cell(std::size_t v) { return std::to_string(v); }
inline std::string csv_cell(const char* v) { return v; }
inline std::string csv_cell(const std::string& v) { return v; }
}  // namespace detail

// Comma-separated rows with '\n' line ends, written byte-stably: numeric
// cells use full round-trip precision and the C locale.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
    }

    template <typename... Cells>
    void row(const Cells&... cells) {
        const std::array<std::string, sizeof...(Cells)> parts{detail::csv_cell(cells)...};
        std::string line;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) line += ',';
            line += parts[i];
        }
        line += '\n';
        out_ << line;
        if (!out_) throw std::runtime_error("failed writing csv row");
    }

  private:
    std::ofstream out_;
};

}  // namespace antmill
