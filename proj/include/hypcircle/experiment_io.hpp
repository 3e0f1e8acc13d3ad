#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace hypcircle {

inline constexpr const char* output_schema = "hypcircle-v1";

/// Deterministic CSV writer: fixed column order, %.17g floats, '\n' endings.
/// The first row is the schema tag, the second the header.
class CsvWriter {
public:
    CsvWriter(std::string path, std::vector<std::string> columns);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);
    void close();
    static std::string format(double v);

private:
    std::string path_;
    std::string buffer_;
    std::size_t ncols_;
    bool closed_ = false;
};

/// Run manifest: config echo, seeds, tolerances, per-check pass/fail, wall
/// clock. Written even when checks fail, with partial results flagged.
class Manifest {
public:
    explicit Manifest(std::string path);
    nlohmann::json& config() { return doc_["config"]; }
    void add_check(const std::string& name, bool passed, const std::string& detail);
    void set_partial(bool partial) { doc_["partial_results"] = partial; }
    bool all_passed() const;
    void write(double wall_seconds);

private:
    std::string path_;
    nlohmann::json doc_;
};

}  // namespace hypcircle
