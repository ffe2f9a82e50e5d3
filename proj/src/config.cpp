#include "pcf/config.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "pcf/errors.hpp"

namespace pcf {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw validation_error("config line " + std::to_string(line) + ": " + msg);
}

template <typename T>
T parse_number(const std::string& s, int line, const std::string& key);

template <>
double parse_number<double>(const std::string& s, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(line, "bad numeric value '" + s + "' for key '" + key + "'");
  }
}

template <>
int parse_number<int>(const std::string& s, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size() || v < -(1L << 31) || v >= (1L << 31))
      throw std::invalid_argument("");
    return static_cast<int>(v);
  } catch (...) {
    fail(line, "bad integer value '" + s + "' for key '" + key + "'");
  }
}

template <>
std::uint64_t parse_number<std::uint64_t>(const std::string& s, int line,
                                          const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return static_cast<std::uint64_t>(v);
  } catch (...) {
    fail(line, "bad seed value '" + s + "' for key '" + key + "'");
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig rc;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(lineno, "expected 'key = value' (no '=' found)");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    if (val.empty()) fail(lineno, "empty value for key '" + key + "'");
    if (!seen.insert(key).second) fail(lineno, "duplicate key '" + key + "'");

    if (key == "n")
      rc.n = parse_number<int>(val, lineno, key);
    else if (key == "mu")
      rc.mu = parse_number<double>(val, lineno, key);
    else if (key == "seed")
      rc.seed = parse_number<std::uint64_t>(val, lineno, key);
    else if (key == "eps")
      rc.eps = parse_number<double>(val, lineno, key);
    else if (key == "kappa")
      rc.kappa = parse_number<double>(val, lineno, key);
    else if (key == "alpha")
      rc.alpha = parse_number<double>(val, lineno, key);
    else if (key == "dealias_fraction")
      rc.dealias_fraction = parse_number<double>(val, lineno, key);
    else if (key == "tol")
      rc.tol = parse_number<double>(val, lineno, key);
    else if (key == "max_iter")
      rc.max_iter = parse_number<int>(val, lineno, key);
    else if (key == "grad_coeff")
      rc.grad_coeff = parse_number<double>(val, lineno, key);
    else if (key == "nonlinearity")
      rc.nonlinearity = val;
    else
      fail(lineno, "unknown key '" + key + "'");
  }
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate_config(const RunConfig& rc) {
  if (rc.n < 8 || !std::has_single_bit(static_cast<unsigned>(rc.n)))
    throw validation_error("n must be a power of two >= 8");
  if (!(rc.mu > 0.0) || !std::isfinite(rc.mu))
    throw validation_error("mu must be positive and finite");
  if (rc.eps < 0.0 || !std::isfinite(rc.eps))
    throw validation_error("eps must be >= 0");
  if (!(rc.alpha > 2.0 / 3.0) || !(rc.alpha < 1.0))
    throw validation_error("alpha must lie in (2/3, 1)");
  if (!(rc.kappa > 0.0) || !(rc.kappa < 1.0 - rc.alpha))
    throw validation_error("kappa must lie in (0, 1 - alpha)");
  if (!(rc.dealias_fraction > 0.0) || rc.dealias_fraction > 1.0)
    throw validation_error("dealias_fraction must lie in (0, 1]");
  if (!(rc.tol > 0.0)) throw validation_error("tol must be positive");
  if (rc.max_iter < 1) throw validation_error("max_iter must be >= 1");
}

GridSpec grid_of(const RunConfig& rc) {
  validate_config(rc);
  return GridSpec(rc.n, rc.mu, rc.dealias_fraction);
}

}  // namespace pcf
