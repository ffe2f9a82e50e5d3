#pragma once

#include <utility>
#include <vector>

#include "pcf/partition.hpp"
#include "pcf/torus.hpp"

// Bony calculus on grid fields. Every product operator multiplies block
// fields pointwise on the grid and dealiases its output, so
//   para_lt + resonant + para_gt == dealias(f*g)
// holds at grid-value level for arbitrary fields (the pairwise sums
// reassemble the pointwise product exactly, aliasing included).
//
// Localization splits f along the level cutoff lambda_T (T = floor of the
// threshold): low = blocks j <= T and high = f - low after one spectral
// round trip, so low + high reproduces the round-tripped field bit-exactly.

namespace pcf {

// prefix sums S_i f = sum_{l <= i} block_l f, indexed i = -1 .. j_max
std::vector<RealField> block_prefix_sums(const std::vector<RealField>& blocks);

RealField para_lt(const RealField& f, const RealField& g, const DyadicPartition& part);
RealField para_gt(const RealField& f, const RealField& g, const DyadicPartition& part);
RealField resonant(const RealField& f, const RealField& g, const DyadicPartition& part);

// dealias(f*g), the full renormalizable product route
RealField prod_dealias(const RealField& f, const RealField& g);

// block-level kernels reused by the threshold scanner and the remainder map
RealField para_from_blocks(const std::vector<RealField>& f_prefix,
                           const std::vector<RealField>& g_blocks,
                           const DyadicPartition& part);
RealField resonant_from_blocks(const std::vector<RealField>& f_blocks,
                               const std::vector<RealField>& g_blocks,
                               const DyadicPartition& part);

// C(f,g,h) = (f para< g) resonant h - f * (g resonant h)
RealField commutator_C(const RealField& f, const RealField& g, const RealField& h,
                       const DyadicPartition& part);

// D(f,g,h) = <f, h resonant g> - <f para< g, h>
double trilinear_D(const RealField& f, const RealField& g, const RealField& h,
                   const DyadicPartition& part);

// L(f para< g) - f para< (L g)
RealField l_commutator(const RealField& f, const RealField& g,
                       const DyadicPartition& part);

struct LocalizedField {
  RealField low;   // U_<= f
  RealField high;  // U_>  f
};

LocalizedField localize(const RealField& f, const DyadicPartition& part,
                        double threshold);

struct LocalizationParams {
  double L = -1.0;  // threshold for xi
  double K = -1.0;  // threshold for the Wick area
};

}  // namespace pcf
