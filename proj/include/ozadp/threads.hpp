#pragma once

namespace ozadp {

// Caps the OpenMP worker count. All kernels produce bitwise-identical results
// for any cap; this only affects speed. n <= 0 leaves the runtime default.
void set_thread_cap(int n);

// Current worker count the runtime would use.
int thread_cap();

// Applies the OZADP_THREADS environment variable, if set and positive.
void apply_thread_env();

}  // namespace ozadp
