#include "sbts/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sbts {

namespace {
std::atomic<std::size_t> g_threads{ 0 };
// Nested loops run inline on the worker that reached them.
thread_local bool t_in_parallel = false;

struct ParallelScope
{
  bool previous = t_in_parallel;
  ParallelScope() { t_in_parallel = true; }
  ~ParallelScope() { t_in_parallel = previous; }
};
}

void
set_thread_count(std::size_t threads)
{
  g_threads.store(threads);
}

std::size_t
thread_count()
{
  std::size_t n = g_threads.load();
  if (n == 0)
    n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  return n;
}

void
parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn)
{
  const std::size_t workers =
    t_in_parallel ? 1 : std::min(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }

  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    ParallelScope scope;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count)
        return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error)
          error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w)
    pool.emplace_back(work);
  work();
  for (auto& t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

} // namespace sbts
