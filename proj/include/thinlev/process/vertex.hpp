#pragma once

#include "thinlev/params.hpp"
#include "thinlev/process/path.hpp"

namespace thinlev::process {

// The exploration process seen from vertex i: starts at c_i, drifts with
// beta_i = (beta_tilde + 1) - c_i^2, and clock i is excluded from the head
// sum (build the PathLaw with excluded = i). i = 1 recovers the vertex-1
// process exactly.
inline StartDrift make_vertex_process(const ModelParams& params, long long i) {
  const double ci = clock_weight(i, params);
  return {ci, params.beta_tilde + 1.0 - ci * ci};
}

}  // namespace thinlev::process
