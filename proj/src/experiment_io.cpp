#include "hypcircle/experiment_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hypcircle {

CsvWriter::CsvWriter(std::string path, std::vector<std::string> columns)
    : path_(std::move(path)), ncols_(columns.size()) {
    buffer_ = std::string(output_schema) + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        buffer_ += columns[i];
        buffer_ += i + 1 == columns.size() ? '\n' : ',';
    }
}

std::string CsvWriter::format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != ncols_) throw std::invalid_argument("CsvWriter: column mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        buffer_ += format(values[i]);
        buffer_ += i + 1 == values.size() ? '\n' : ',';
    }
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    if (values.size() != ncols_) throw std::invalid_argument("CsvWriter: column mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        buffer_ += values[i];
        buffer_ += i + 1 == values.size() ? '\n' : ',';
    }
}

void CsvWriter::close() {
    if (closed_) return;
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw std::runtime_error("CsvWriter: cannot open " + path_);
    out << buffer_;
    closed_ = true;
}

Manifest::Manifest(std::string path) : path_(std::move(path)) {
    doc_["schema"] = output_schema;
    doc_["checks"] = nlohmann::json::array();
    doc_["partial_results"] = false;
}

void Manifest::add_check(const std::string& name, bool passed, const std::string& detail) {
    doc_["checks"].push_back({{"name", name}, {"passed", passed}, {"detail", detail}});
}

bool Manifest::all_passed() const {
    for (const auto& c : doc_["checks"])
        if (!c["passed"].get<bool>()) return false;
    return true;
}

void Manifest::write(double wall_seconds) {
    doc_["wall_seconds"] = wall_seconds;
    doc_["all_passed"] = all_passed();
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw std::runtime_error("Manifest: cannot open " + path_);
    out << doc_.dump(2) << "\n";
}

}  // namespace hypcircle
