#pragma once

#include <cstddef>

#include "vlab/domain.hpp"
#include "vlab/geometry.hpp"

namespace vlab {

// No-exclusion marker for induced_velocity.
inline constexpr std::size_t kNoExclude = static_cast<std::size_t>(-1);

// out[q] = sum_j gamma[j] K_delta(query[q], src[j]), eight-lane compensated
// accumulation in fixed source order (bit-reproducible). A coincident source
// contributes zero. exclude may be null; otherwise exclude[q] names one source
// index whose contribution is removed from query q (atom self-interaction).
void induced_velocity(const Domain& dom, double delta,
                      const Vec2* src, const double* gamma, std::size_t n_src,
                      const Vec2* query, const std::size_t* exclude, std::size_t n_query,
                      Vec2* out);

} // namespace vlab
