#include "netmy/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "netmy/errors.hpp"

namespace netmy {

static_assert(std::endian::native == std::endian::little,
              "raw .f64 container assumes a little-endian host");

void write_f64(const std::filesystem::path& path, const double* data, size_t count) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for write: " + path.string());
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  if (!out) throw IoError("short write: " + path.string());
}

std::vector<double> read_f64(const std::filesystem::path& path, size_t expected_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  in.seekg(0, std::ios::end);
  auto bytes = static_cast<size_t>(in.tellg());
  in.seekg(0);
  if (bytes != expected_count * sizeof(double))
    throw IoError("size mismatch in " + path.string() + ": got " + std::to_string(bytes) + " bytes, expected " +
                  std::to_string(expected_count * sizeof(double)));
  std::vector<double> v(expected_count);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw IoError("short read: " + path.string());
  return v;
}

void write_field_f64(const std::filesystem::path& path, const ScalarField& f) {
  write_f64(path, f.data(), static_cast<size_t>(f.size()));
}

ScalarField read_field_f64(const std::filesystem::path& path, int rows, int cols) {
  auto v = read_f64(path, static_cast<size_t>(rows) * cols);
  ScalarField f(rows, cols);
  std::memcpy(f.data(), v.data(), v.size() * sizeof(double));
  return f;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for write: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("short write: " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace netmy
