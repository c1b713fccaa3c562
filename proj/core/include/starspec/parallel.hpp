#pragma once

#include <cstddef>
#include <functional>

namespace starspec {

/// Worker cap for parallel sections.  Zero (the default) means: the
/// STAR_SPECTRA_THREADS environment variable if set, else hardware
/// concurrency.
void set_max_threads(int threads);
int max_threads();

/// Runs body(i) for i in [0, count) on up to max_threads() workers.  Indices
/// are handed out dynamically; callers must write results by index so the
/// outcome does not depend on scheduling.  The first exception thrown by any
/// body is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace starspec
