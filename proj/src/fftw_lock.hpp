#pragma once

#include <mutex>

namespace levyhjb::detail {

/// FFTW planning is not thread-safe; plan creation and destruction go through this lock.
std::mutex& fftw_planner_mutex();

} // namespace levyhjb::detail
