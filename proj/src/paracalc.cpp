#include "pcf/paracalc.hpp"

#include <cmath>
#include <stdexcept>

namespace pcf {

namespace {

void check_grids(const DyadicPartition& part, const GridSpec& a, const GridSpec& b) {
  if (part.grid != a || a != b)
    throw std::invalid_argument("paraproduct: grid mismatch");
}

}  // namespace

std::vector<RealField> block_prefix_sums(const std::vector<RealField>& blocks) {
  std::vector<RealField> prefix;
  prefix.reserve(blocks.size());
  prefix.push_back(blocks[0]);
  for (size_t i = 1; i < blocks.size(); ++i) {
    RealField next = prefix.back();
    for (size_t k = 0; k < next.v.size(); ++k) next.v[k] += blocks[i].v[k];
    prefix.push_back(std::move(next));
  }
  return prefix;
}

RealField para_from_blocks(const std::vector<RealField>& f_prefix,
                           const std::vector<RealField>& g_blocks,
                           const DyadicPartition& part) {
  RealField acc(part.grid);
  for (int j = 1; j <= part.j_max; ++j) {
    const RealField& s = f_prefix[static_cast<size_t>(j - 2) + 1];
    const RealField& b = g_blocks[static_cast<size_t>(j) + 1];
    for (size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += s.v[i] * b.v[i];
  }
  return dealias(acc);
}

RealField resonant_from_blocks(const std::vector<RealField>& f_blocks,
                               const std::vector<RealField>& g_blocks,
                               const DyadicPartition& part) {
  RealField acc(part.grid);
  for (int j = -1; j <= part.j_max; ++j) {
    const RealField& fb = f_blocks[static_cast<size_t>(j) + 1];
    for (int i = std::max(-1, j - 1); i <= std::min(part.j_max, j + 1); ++i) {
      const RealField& gb = g_blocks[static_cast<size_t>(i) + 1];
      for (size_t k = 0; k < acc.v.size(); ++k) acc.v[k] += fb.v[k] * gb.v[k];
    }
  }
  return dealias(acc);
}

RealField para_lt(const RealField& f, const RealField& g, const DyadicPartition& part) {
  check_grids(part, f.grid, g.grid);
  std::vector<RealField> fb = lp_blocks(f, part);
  std::vector<RealField> gb = lp_blocks(g, part);
  return para_from_blocks(block_prefix_sums(fb), gb, part);
}

RealField para_gt(const RealField& f, const RealField& g, const DyadicPartition& part) {
  return para_lt(g, f, part);
}

RealField resonant(const RealField& f, const RealField& g, const DyadicPartition& part) {
  check_grids(part, f.grid, g.grid);
  return resonant_from_blocks(lp_blocks(f, part), lp_blocks(g, part), part);
}

RealField prod_dealias(const RealField& f, const RealField& g) {
  return dealias(pointwise(f, g));
}

RealField commutator_C(const RealField& f, const RealField& g, const RealField& h,
                       const DyadicPartition& part) {
  RealField lhs = resonant(para_lt(f, g, part), h, part);
  RealField rhs = prod_dealias(f, resonant(g, h, part));
  return lhs - rhs;
}

double trilinear_D(const RealField& f, const RealField& g, const RealField& h,
                   const DyadicPartition& part) {
  return inner(f, resonant(h, g, part)) - inner(para_lt(f, g, part), h);
}

RealField l_commutator(const RealField& f, const RealField& g,
                       const DyadicPartition& part) {
  return apply_L(para_lt(f, g, part)) - para_lt(f, apply_L(g), part);
}

LocalizedField localize(const RealField& f, const DyadicPartition& part,
                        double threshold) {
  if (part.grid != f.grid) throw std::invalid_argument("localize: grid mismatch");
  if (threshold < -1.0 || threshold > part.j_max)
    throw std::invalid_argument("localize: threshold outside [-1, j_max]");
  const int T = static_cast<int>(std::floor(threshold));
  SpectralField s = fft_forward(f);
  RealField round_trip = fft_inverse(s);
  const std::vector<double>& lam = part.level_multiplier(T);
  for (size_t i = 0; i < s.c.size(); ++i) s.c[i] *= lam[i];
  LocalizedField out;
  out.low = fft_inverse(s);
  out.high = round_trip - out.low;
  return out;
}

}  // namespace pcf
