#pragma once

#include <cstddef>

namespace ssg {

/// Sets the number of worker threads used by internal parallel loops.
/// Results are bitwise independent of this value: loops partition work
/// statically and never reduce floating point values across threads.
void set_num_threads(int n);
int num_threads();

}  // namespace ssg
