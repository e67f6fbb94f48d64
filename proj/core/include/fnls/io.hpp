#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "fnls/grid.hpp"
#include "fnls/solver.hpp"

namespace fnls {

/// CSV with a header row; UTF-8, LF line endings, '.' decimal separator,
/// doubles written with 17 significant digits.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);
    void row(std::span<const double> values);
    void row_mixed(const std::vector<std::string>& values);

private:
    std::ofstream out_;
    std::size_t ncols_;
};

std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

/// Little-endian float64 dump of all orbitals plus a JSON sidecar describing
/// dtype, byte order, layout and shape ([n_orbitals, n, ...n per axis]).
void dump_orbitals(const std::filesystem::path& base_path, const OrbitalSet& orbitals);

/// GroundStateResult serialized as a JSON object string (schema_version 1).
std::string ground_state_to_json(const GroundStateResult& r);

}  // namespace fnls
