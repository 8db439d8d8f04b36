#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace torsolve {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_number(double value);

/// Comma-separated, LF-terminated writer with a mandatory header row.
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::vector<std::string> header);

    void row(std::initializer_list<double> values);
    void row(const std::vector<double>& values);
    /// Flushes and closes; throws on I/O failure.
    void close();

private:
    std::string path_;
    std::size_t columns_;
    std::ofstream out_;
};

}  // namespace torsolve
