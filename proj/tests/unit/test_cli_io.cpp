#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "pcf/config.hpp"
#include "pcf/errors.hpp"
#include "pcf/io.hpp"
#include "pcf/torus.hpp"
#include "test_helpers.hpp"

using namespace pcf;
using namespace testutil;

namespace {

std::string temp_path(const std::string& stem) {
  return "pcf_test_" + stem;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

struct Cleanup {
  std::string path;
  ~Cleanup() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("field files round trip bit exactly") {
  const GridSpec g(16, 0.75);
  const RealField f = rough_field(g, 301);
  const std::string path = temp_path("roundtrip.pcf");
  Cleanup c{path};
  write_field(path, f, FieldKind::theta, 42);

  const StoredField back = read_field(path);
  CHECK(back.kind == FieldKind::theta);
  CHECK(back.seed == 42);
  CHECK(back.field.grid.n == 16);
  CHECK(back.field.grid.mu == 0.75);
  REQUIRE(back.field.v.size() == f.v.size());
  for (size_t i = 0; i < f.v.size(); ++i) CHECK(back.field.v[i] == f.v[i]);

  // two writes of the same field produce identical bytes
  const std::string path2 = temp_path("roundtrip2.pcf");
  Cleanup c2{path2};
  write_field(path2, f, FieldKind::theta, 42);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("header layout is stable") {
  const GridSpec g(8, 1.0);
  RealField f(g);
  const std::string path = temp_path("header.pcf");
  Cleanup c{path};
  write_field(path, f, FieldKind::xi, 7);
  const std::string bytes = slurp(path);
  REQUIRE(bytes.size() == 29u + 8u * 64u);
  CHECK(bytes.substr(0, 4) == "PCF1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);   // version, LE
  CHECK(static_cast<unsigned char>(bytes[8]) == 8);   // n, LE
  CHECK(static_cast<unsigned char>(bytes[28]) == 1);  // kind tag
}

TEST_CASE("corrupt field files are rejected") {
  const GridSpec g(8, 1.0);
  const RealField f = rough_field(g, 302);
  const std::string path = temp_path("corrupt.pcf");
  Cleanup c{path};
  write_field(path, f, FieldKind::generic, 0);
  const std::string good = slurp(path);

  CHECK_THROWS_AS(read_field(temp_path("missing.pcf")), validation_error);

  std::string bad = good;
  bad[0] = 'X';  // magic
  spit(path, bad);
  CHECK_THROWS_AS(read_field(path), validation_error);

  bad = good;
  bad[4] = 2;  // version
  spit(path, bad);
  CHECK_THROWS_AS(read_field(path), validation_error);

  bad = good;
  bad[28] = 9;  // kind tag
  spit(path, bad);
  CHECK_THROWS_AS(read_field(path), validation_error);

  spit(path, good.substr(0, good.size() - 5));  // truncated payload
  CHECK_THROWS_AS(read_field(path), validation_error);

  spit(path, good.substr(0, 12));  // truncated header
  CHECK_THROWS_AS(read_field(path), validation_error);

  bad = good;
  for (int i = 0; i < 8; ++i) bad[29 + i] = static_cast<char>(0xff);  // NaN sample
  spit(path, bad);
  CHECK_THROWS_AS(read_field(path), validation_error);
}

TEST_CASE("atomic text writes") {
  const std::string path = temp_path("note.txt");
  Cleanup c{path};
  write_text_atomic(path, "alpha,beta\n1,2\n");
  CHECK(slurp(path) == "alpha,beta\n1,2\n");
  // overwrite in place
  write_text_atomic(path, "x");
  CHECK(slurp(path) == "x");
  std::ifstream tmp(path + ".tmp");
  CHECK(!tmp);  // no temp file left behind
}

TEST_CASE("config defaults") {
  const RunConfig rc = parse_config_text("");
  CHECK(rc.n == 128);
  CHECK(rc.mu == 1.0);
  CHECK(rc.seed == 1);
  CHECK(rc.eps == 0.0);
  CHECK(rc.alpha == 0.8);
  CHECK(rc.kappa == 0.1);
  CHECK(rc.tol == 1e-8);
  CHECK(rc.max_iter == 5000);
  CHECK(rc.grad_coeff == 2.0);
  CHECK(rc.nonlinearity == "zero");
  CHECK_NOTHROW(validate_config(rc));
}

TEST_CASE("config parsing") {
  const std::string text =
      "# run setup\n"
      "n = 64\n"
      "mu = 2.5\n"
      "\n"
      "seed = 99  # trailing comment\n"
      "eps = 0.125\n"
      "nonlinearity = cubic:0.5\n"
      "max_iter = 250\n";
  const RunConfig rc = parse_config_text(text);
  CHECK(rc.n == 64);
  CHECK(rc.mu == 2.5);
  CHECK(rc.seed == 99);
  CHECK(rc.eps == 0.125);
  CHECK(rc.nonlinearity == "cubic:0.5");
  CHECK(rc.max_iter == 250);
  CHECK(rc.alpha == 0.8);  // untouched default
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS_AS(parse_config_text("n 64\n"), validation_error);
  CHECK_THROWS_AS(parse_config_text("= 64\n"), validation_error);
  CHECK_THROWS_AS(parse_config_text("n =\n"), validation_error);
  CHECK_THROWS_AS(parse_config_text("n = twelve\n"), validation_error);
  CHECK_THROWS_AS(parse_config_text("n = 64.5\n"), validation_error);
  CHECK_THROWS_AS(parse_config_text("unknown_key = 3\n"), validation_error);
  CHECK_THROWS_AS(parse_config_text("n = 64\nn = 128\n"), validation_error);

  // the reported line number names the offender
  try {
    parse_config_text("n = 64\nmu = 1.0\nbogus = 1\n");
    CHECK(false);
  } catch (const validation_error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("config validation windows") {
  RunConfig rc;
  rc.n = 100;
  CHECK_THROWS_AS(validate_config(rc), validation_error);
  rc = RunConfig{};
  rc.mu = 0.0;
  CHECK_THROWS_AS(validate_config(rc), validation_error);
  rc = RunConfig{};
  rc.eps = -0.1;
  CHECK_THROWS_AS(validate_config(rc), validation_error);
  rc = RunConfig{};
  rc.alpha = 0.5;  // at or below 2/3 is out
  CHECK_THROWS_AS(validate_config(rc), validation_error);
  rc.alpha = 1.0;
  CHECK_THROWS_AS(validate_config(rc), validation_error);
  rc = RunConfig{};
  rc.kappa = 0.3;  // needs kappa < 1 - alpha = 0.2
  CHECK_THROWS_AS(validate_config(rc), validation_error);
  rc = RunConfig{};
  rc.dealias_fraction = 0.0;
  CHECK_THROWS_AS(validate_config(rc), validation_error);
  rc = RunConfig{};
  rc.tol = 0.0;
  CHECK_THROWS_AS(validate_config(rc), validation_error);
  rc = RunConfig{};
  rc.max_iter = 0;
  CHECK_THROWS_AS(validate_config(rc), validation_error);

  rc = RunConfig{};
  rc.n = 256;
  rc.alpha = 0.75;
  rc.kappa = 0.2;
  CHECK_NOTHROW(validate_config(rc));
  const GridSpec g = grid_of(rc);
  CHECK(g.n == 256);
  CHECK(g.mu == 1.0);
}

TEST_CASE("load config from disk") {
  const std::string path = temp_path("run.cfg");
  Cleanup c{path};
  spit(path, "n = 32\nseed = 5\n");
  const RunConfig rc = load_config(path);
  CHECK(rc.n == 32);
  CHECK(rc.seed == 5);
  CHECK_THROWS_AS(load_config(temp_path("absent.cfg")), validation_error);
}
