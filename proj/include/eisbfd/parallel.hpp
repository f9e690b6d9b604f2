#pragma once

namespace eisbfd {

/// Worker cap for line sweeps: EISBFD_THREADS if set and positive,
/// otherwise the hardware concurrency.
int worker_count();

}  // namespace eisbfd
