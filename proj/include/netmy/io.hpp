#ifndef NETMY_IO_HPP
#define NETMY_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "netmy/field.hpp"

#include "json.hpp"

namespace netmy {

// Raw array container: little-endian IEEE-754 float64, row-major, shape held
// by the accompanying JSON metadata.

void write_f64(const std::filesystem::path& path, const double* data, size_t count);
std::vector<double> read_f64(const std::filesystem::path& path, size_t expected_count);

void write_field_f64(const std::filesystem::path& path, const ScalarField& f);
ScalarField read_field_f64(const std::filesystem::path& path, int rows, int cols);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace netmy

#endif
