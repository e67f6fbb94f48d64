#include "fnls/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace fnls {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), ncols_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "");
    }
    out_ << "\n";
}

void CsvWriter::row(std::span<const double> values) {
    if (values.size() != ncols_) throw std::invalid_argument("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        out_ << format_double(values[i]) << (i + 1 < values.size() ? "," : "");
    }
    out_ << "\n";
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    if (values.size() != ncols_) throw std::invalid_argument("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        out_ << values[i] << (i + 1 < values.size() ? "," : "");
    }
    out_ << "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << content;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

void dump_orbitals(const std::filesystem::path& base_path, const OrbitalSet& orbitals) {
    if (orbitals.orbitals.empty()) throw std::invalid_argument("no orbitals to dump");
    const Grid& g = orbitals.orbitals.front().grid();

    const auto bin_path = base_path.string() + ".bin";
    std::ofstream bin(bin_path, std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open '" + bin_path + "' for writing");
    static_assert(std::endian::native == std::endian::little,
                  "orbital dumps assume a little-endian host");
    for (const auto& u : orbitals.orbitals) {
        bin.write(reinterpret_cast<const char*>(u.data()),
                  static_cast<std::streamsize>(u.size() * sizeof(double)));
    }

    json sidecar;
    sidecar["dtype"] = "float64";
    sidecar["byte_order"] = "little";
    sidecar["layout"] = "row-major";
    std::vector<int> shape{static_cast<int>(orbitals.orbitals.size())};
    for (int a = 0; a < g.d; ++a) shape.push_back(g.n);
    sidecar["shape"] = shape;
    sidecar["grid"] = {{"d", g.d}, {"box", g.box}, {"n", g.n}, {"h", g.h}};
    sidecar["occupations"] = orbitals.occupations;
    sidecar["file"] = std::filesystem::path(bin_path).filename().string();
    write_text_file(base_path.string() + ".json", sidecar.dump(2) + "\n");
}

namespace {

json diagnostics_to_json(const DiagnosticsReport& d) {
    json j;
    j["virial_residual"] = d.virial_residual;
    j["el_residuals"] = d.el_residuals;
    j["aufbau_ok"] = d.aufbau_ok;
    j["aufbau_margin"] = d.aufbau_margin;
    j["near_degenerate"] = d.near_degenerate;
    j["mu_bounds_ok"] = d.mu_bounds_ok;
    j["mu_lower_bound"] = d.mu_lower_bound;
    j["mu_upper_bound"] = d.mu_upper_bound;
    j["decay_fit_available"] = d.decay_fit_available;
    j["decay_rate_fit"] = d.decay_rate_fit;
    j["decay_rate_target"] = d.decay_rate_target;
    j["orthonormality_error"] = d.orthonormality_error;
    j["max_gram_drift"] = d.max_gram_drift;
    return j;
}

}  // namespace

std::string ground_state_to_json(const GroundStateResult& r) {
    json j;
    j["schema_version"] = 1;
    j["params"] = {{"d", r.params.d}, {"p", r.params.p}, {"lambda", r.params.lambda}};
    j["grid"] = {{"d", r.grid.d}, {"box", r.grid.box}, {"n", r.grid.n}};
    j["energy"] = r.energy;
    j["mu"] = r.mu;
    if (r.mu_next) j["mu_next"] = *r.mu_next;
    j["occupations"] = r.orbitals.occupations;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["restart_energies"] = r.restart_energies;
    j["diagnostics"] = diagnostics_to_json(r.diagnostics);
    if (r.density.size() > 0) {
        double mn = r.density[0], mx = r.density[0];
        for (double v : r.density.values()) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        j["density_stats"] = {{"min", mn},
                              {"max", mx},
                              {"integral", integrate(r.density)},
                              {"local_maxima", count_local_maxima(r.density)}};
    }
    return j.dump(2);
}

}  // namespace fnls
