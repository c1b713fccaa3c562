#include "starspec/parallel.hpp"

#include <doctest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

using namespace starspec;

TEST_CASE("every index runs exactly once") {
  for (int threads : {1, 2, 4}) {
    set_max_threads(threads);
    CHECK(max_threads() == threads);
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
  set_max_threads(0);
  CHECK(max_threads() >= 1);
}

TEST_CASE("exceptions reach the caller") {
  set_max_threads(3);
  CHECK_THROWS_AS(parallel_for(50,
                               [](std::size_t i) {
                                 if (i == 17) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  parallel_for(0, [](std::size_t) { FAIL("no work expected"); });
  set_max_threads(0);
}
