#pragma once

#include <cstdint>
#include <string>

#include "pcf/torus.hpp"

// PCF1 container: magic "PCF1", u32 version (=1), u32 n, f64 mu, u64 seed
// (0 when meaningless), u8 kind tag, then n*n little-endian f64 samples in
// row-major order. Round trips are bit-exact; writes go through a temp file
// and an atomic rename so failed runs leave no partial outputs.

namespace pcf {

enum class FieldKind : std::uint8_t {
  generic = 0,
  xi = 1,
  theta = 2,
  wick = 3,
  u = 4,
  u_sharp = 5,
};

struct StoredField {
  RealField field;
  FieldKind kind = FieldKind::generic;
  std::uint64_t seed = 0;
};

void write_field(const std::string& path, const RealField& f, FieldKind kind,
                 std::uint64_t seed);
StoredField read_field(const std::string& path);

// atomic small-file text write (temp + rename), used for JSON/CSV outputs
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace pcf
