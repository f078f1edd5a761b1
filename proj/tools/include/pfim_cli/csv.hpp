#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pfim::cli {

/// 17 significant digits; "nan", "inf" and "-inf" for non-finite values.
[[nodiscard]] std::string format_double(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    [[nodiscard]] std::string str() const;
    void write(const std::filesystem::path& path) const;

    [[nodiscard]] std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace pfim::cli
