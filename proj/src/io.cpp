#include "flamespeed/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace flamespeed::io {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) {
            f.close();
            std::filesystem::remove(tmp);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size()) throw std::invalid_argument("csv: header/column count mismatch");
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) throw std::invalid_argument("csv: ragged columns");
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + format_double(columns[i][r]);
        out += "\n";
    }
    return out;
}

std::filesystem::path resolve_output_dir(const std::string& flag, const std::string& config_value) {
    if (!flag.empty()) return flag;
    if (!config_value.empty()) return config_value;
    if (const char* env = std::getenv("FLAMESPEED_OUT"); env && *env) return env;
    return "flamespeed_out";
}

}  // namespace flamespeed::io
