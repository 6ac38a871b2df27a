#include "parapack/table.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

#include "parapack/error.hpp"

namespace parapack {

std::size_t Table::rows() const {
    if (columns.empty()) return 0;
    return std::visit([](const auto& c) { return c.size(); }, columns.front());
}

std::size_t Table::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    throw std::out_of_range("table has no column '" + std::string(name) + "'");
}

bool Table::has(std::string_view name) const {
    for (const auto& n : names)
        if (n == name) return true;
    return false;
}

const std::vector<double>& Table::numbers(std::string_view name) const {
    const auto* v = std::get_if<std::vector<double>>(&columns[index_of(name)]);
    if (!v) throw std::invalid_argument("column '" + std::string(name) + "' is not numeric");
    return *v;
}

const std::vector<std::string>& Table::strings(std::string_view name) const {
    const auto* v = std::get_if<std::vector<std::string>>(&columns[index_of(name)]);
    if (!v) throw std::invalid_argument("column '" + std::string(name) + "' is not text");
    return *v;
}

void Table::add(std::string name, std::vector<double> values) {
    names.push_back(std::move(name));
    columns.emplace_back(std::move(values));
}

void Table::add(std::string name, std::vector<std::string> values) {
    names.push_back(std::move(name));
    columns.emplace_back(std::move(values));
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace {

bool parse_number(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s == "nan") {
        out = std::nan("");
        return true;
    }
    if (s == "inf" || s == "-inf") {
        out = s[0] == '-' ? -INFINITY : INFINITY;
        return true;
    }
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::vector<std::string>> split_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(cell));
            cell.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !cell.empty()) {
                row.push_back(std::move(cell));
                rows.push_back(std::move(row));
            }
            row.clear();
            cell.clear();
            any = false;
        } else {
            cell += c;
            any = true;
        }
    }
    if (quoted) throw std::runtime_error("csv: unterminated quoted field");
    if (any || !cell.empty()) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t j = 0; j < table.names.size(); ++j) out += (j ? "," : "") + quote(table.names[j]);
    out += '\n';
    const std::size_t n = table.rows();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < table.columns.size(); ++j) {
            if (j) out += ',';
            if (const auto* v = std::get_if<std::vector<double>>(&table.columns[j])) out += format_number((*v)[r]);
            else out += quote(std::get<std::vector<std::string>>(table.columns[j])[r]);
        }
        out += '\n';
    }
    return out;
}

Table parse_csv(std::string_view text) {
    const auto rows = split_csv(text);
    if (rows.empty()) throw std::runtime_error("csv: missing header");
    Table t;
    const std::size_t m = rows[0].size();
    for (std::size_t r = 1; r < rows.size(); ++r)
        if (rows[r].size() != m)
            throw std::runtime_error("csv: row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                                     " fields, header has " + std::to_string(m));
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> nums;
        bool numeric = true;
        for (std::size_t r = 1; r < rows.size() && numeric; ++r) {
            double v;
            numeric = parse_number(rows[r][j], v);
            nums.push_back(v);
        }
        if (numeric) {
            t.add(rows[0][j], std::move(nums));
        } else {
            std::vector<std::string> s;
            for (std::size_t r = 1; r < rows.size(); ++r) s.push_back(rows[r][j]);
            t.add(rows[0][j], std::move(s));
        }
    }
    return t;
}

void write_csv(const Table& table, const std::filesystem::path& path) { write_file_atomic(path, to_csv(table)); }
Table read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

namespace {

constexpr char kMagic[] = "PPKTAB01";

template <class T>
void put(std::string& out, T v) {
    static_assert(std::endian::native == std::endian::little, "binary tables assume a little-endian host");
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    out.append(b, sizeof(T));
}

struct Reader {
    std::string_view s;
    std::size_t pos = 0;
    template <class T>
    T get() {
        if (pos + sizeof(T) > s.size()) throw std::runtime_error("binary table: truncated");
        T v;
        std::memcpy(&v, s.data() + pos, sizeof(T));
        pos += sizeof(T);
        return v;
    }
    std::string bytes(std::size_t n) {
        if (pos + n > s.size()) throw std::runtime_error("binary table: truncated");
        std::string out(s.substr(pos, n));
        pos += n;
        return out;
    }
};

}  // namespace

std::string to_binary(const Table& table) {
    std::string out(kMagic, 8);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(table.names.size()));
    put<std::uint64_t>(out, table.rows());
    for (std::size_t j = 0; j < table.names.size(); ++j) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(table.names[j].size()));
        out += table.names[j];
        if (const auto* v = std::get_if<std::vector<double>>(&table.columns[j])) {
            put<std::uint8_t>(out, 0);
            for (double x : *v) put<double>(out, x);
        } else {
            put<std::uint8_t>(out, 1);
            for (const auto& s : std::get<std::vector<std::string>>(table.columns[j])) {
                put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
                out += s;
            }
        }
    }
    return out;
}

Table parse_binary(std::string_view bytes) {
    if (bytes.size() < 8 || bytes.substr(0, 8) != std::string_view(kMagic, 8))
        throw std::runtime_error("binary table: bad magic");
    Reader r{bytes, 8};
    const auto cols = r.get<std::uint32_t>();
    const auto rows = r.get<std::uint64_t>();
    Table t;
    for (std::uint32_t j = 0; j < cols; ++j) {
        std::string name = r.bytes(r.get<std::uint32_t>());
        const auto type = r.get<std::uint8_t>();
        if (type == 0) {
            std::vector<double> v(rows);
            for (auto& x : v) x = r.get<double>();
            t.add(std::move(name), std::move(v));
        } else if (type == 1) {
            std::vector<std::string> v(rows);
            for (auto& x : v) x = r.bytes(r.get<std::uint32_t>());
            t.add(std::move(name), std::move(v));
        } else {
            throw std::runtime_error("binary table: unknown column type");
        }
    }
    if (r.pos != bytes.size()) throw std::runtime_error("binary table: trailing bytes");
    return t;
}

void write_binary(const Table& table, const std::filesystem::path& path) {
    write_file_atomic(path, to_binary(table));
}
Table read_binary(const std::filesystem::path& path) { return parse_binary(read_file(path)); }

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace parapack
