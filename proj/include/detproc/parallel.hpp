#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <type_traits>
#include <vector>

#include "detproc/random.hpp"

namespace detproc {

// Batch drivers. Draw i always consumes root.split(i), so the serial and the
// OpenMP versions produce identical batches whatever the thread count.

template <class Draw>
auto generate_batch_serial(std::size_t count, const RandomStream& root,
                           Draw&& draw) {
  using Result = std::invoke_result_t<Draw&, RandomStream&>;
  std::vector<Result> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RandomStream stream = root.split(i);
    out.push_back(draw(stream));
  }
  return out;
}

template <class Draw>
auto generate_batch(std::size_t count, const RandomStream& root, Draw&& draw) {
  using Result = std::invoke_result_t<Draw&, RandomStream&>;
  std::vector<Result> out(count);
  std::exception_ptr failure;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      RandomStream stream = root.split(static_cast<std::uint64_t>(i));
      out[static_cast<std::size_t>(i)] = draw(stream);
    } catch (...) {
#pragma omp critical(detproc_batch_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace detproc
