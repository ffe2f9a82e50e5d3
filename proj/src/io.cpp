#include "pcf/io.hpp"

#include "pcf/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace pcf {

namespace {

void put_u32(std::string& b, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

void put_u64(std::string& b, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

void put_f64(std::string& b, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  put_u64(b, bits);
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t x = 0;
  for (int i = 3; i >= 0; --i) x = (x << 8) | p[i];
  return x;
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t x = 0;
  for (int i = 7; i >= 0; --i) x = (x << 8) | p[i];
  return x;
}

double get_f64(const unsigned char* p) {
  std::uint64_t bits = get_u64(p);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

void rename_into_place(const std::string& tmp, const std::string& path) {
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("could not move output into place: " + path);
  }
}

void write_bytes_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      std::remove(tmp.c_str());
      throw std::runtime_error("short write: " + tmp);
    }
  }
  rename_into_place(tmp, path);
}

constexpr size_t kHeaderBytes = 4 + 4 + 4 + 8 + 8 + 1;

}  // namespace

void write_field(const std::string& path, const RealField& f, FieldKind kind,
                 std::uint64_t seed) {
  std::string bytes;
  bytes.reserve(kHeaderBytes + 8 * f.v.size());
  bytes += "PCF1";
  put_u32(bytes, 1u);
  put_u32(bytes, static_cast<std::uint32_t>(f.grid.n));
  put_f64(bytes, f.grid.mu);
  put_u64(bytes, seed);
  bytes.push_back(static_cast<char>(kind));
  for (double x : f.v) put_f64(bytes, x);
  write_bytes_atomic(path, bytes);
}

StoredField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open field file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderBytes)
    throw validation_error("corrupt PCF1 header (truncated): " + path);
  if (std::memcmp(bytes.data(), "PCF1", 4) != 0)
    throw validation_error("corrupt PCF1 header (bad magic): " + path);
  const std::uint32_t version = get_u32(bytes.data() + 4);
  if (version != 1)
    throw validation_error("unsupported PCF1 version " + std::to_string(version));
  const std::uint32_t n = get_u32(bytes.data() + 8);
  const double mu = get_f64(bytes.data() + 12);
  const std::uint64_t seed = get_u64(bytes.data() + 20);
  const std::uint8_t kind_tag = bytes[28];
  if (kind_tag > 5)
    throw validation_error("corrupt PCF1 header (unknown kind tag): " + path);

  GridSpec grid(static_cast<int>(n), mu);  // validates n and mu
  const size_t expect = kHeaderBytes + 8ull * n * n;
  if (bytes.size() != expect)
    throw validation_error("PCF1 payload size mismatch: " + path);

  StoredField out;
  out.kind = static_cast<FieldKind>(kind_tag);
  out.seed = seed;
  out.field = RealField(grid);
  double probe = 0.0;
  for (size_t i = 0; i < out.field.v.size(); ++i) {
    out.field.v[i] = get_f64(bytes.data() + kHeaderBytes + 8 * i);
    probe += std::abs(out.field.v[i]);
  }
  if (!std::isfinite(probe))
    throw validation_error("PCF1 payload contains non-finite samples: " + path);
  return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  write_bytes_atomic(path, content);
}

}  // namespace pcf
