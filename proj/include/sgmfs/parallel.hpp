#pragma once

namespace sgmfs {

/// Number of worker threads the parallel kernels may use. Resolves to
/// min(omp_get_max_threads(), SGMFS_THREADS) when the environment variable is
/// set, overridden by set_thread_override() when nonzero.
int max_threads();

/// Force a specific worker count (0 restores env/OpenMP resolution).
void set_thread_override(int threads);

}  // namespace sgmfs
