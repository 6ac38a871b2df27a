#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace parapack {

/// Column-typed table used for every file the tools write.
struct Table {
    using Column = std::variant<std::vector<double>, std::vector<std::string>>;

    std::vector<std::string> names;
    std::vector<Column> columns;

    std::size_t rows() const;
    std::size_t index_of(std::string_view name) const;  // throws std::out_of_range
    bool has(std::string_view name) const;
    const std::vector<double>& numbers(std::string_view name) const;
    const std::vector<std::string>& strings(std::string_view name) const;

    void add(std::string name, std::vector<double> values);
    void add(std::string name, std::vector<std::string> values);

    friend bool operator==(const Table&, const Table&) = default;
};

/// Shortest text that parses back to the same double (at most 17 significant digits).
std::string format_number(double value);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

std::string to_csv(const Table& table);
/// Columns whose every cell parses as a number become numeric; others stay text.
Table parse_csv(std::string_view text);
void write_csv(const Table& table, const std::filesystem::path& path);
Table read_csv(const std::filesystem::path& path);

/// Compact binary: "PPKTAB01", u32 column count, u64 row count, then per column
/// u32 name length, name bytes, u8 type (0 = f64, 1 = text) and the values
/// (little-endian f64, or u32 length + bytes per text cell).
std::string to_binary(const Table& table);
Table parse_binary(std::string_view bytes);
void write_binary(const Table& table, const std::filesystem::path& path);
Table read_binary(const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace parapack
