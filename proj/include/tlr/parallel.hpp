#pragma once

namespace tlr {

/// Worker count used by the OpenMP loops in this library.
int max_threads();

/// Sets the OpenMP worker count for the lifetime of the guard.
class ThreadScope {
 public:
  explicit ThreadScope(int threads);
  ~ThreadScope();
  ThreadScope(const ThreadScope&) = delete;
  ThreadScope& operator=(const ThreadScope&) = delete;

 private:
  int previous_;
};

}  // namespace tlr
