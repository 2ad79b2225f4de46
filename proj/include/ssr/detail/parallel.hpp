// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>

namespace ssr {

template <typename T>
std::vector<T> ordered_parallel_map(std::size_t n, std::size_t concurrency,
                                    const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };

  const std::size_t workers = std::min(std::max<std::size_t>(concurrency, 1), n);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace ssr
