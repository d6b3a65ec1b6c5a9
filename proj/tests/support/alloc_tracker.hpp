#pragma once
// Global operator new/delete replacement that records allocation sizes
// while a Scope is active. Include from exactly one translation unit.

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <new>

namespace nfse::test {

struct AllocStats {
  std::atomic<bool> active{false};
  std::atomic<std::size_t> largest{0};
  std::atomic<std::size_t> total{0};
  std::atomic<std::size_t> count{0};
};

inline AllocStats& alloc_stats() {
  static AllocStats s;
  return s;
}

class AllocScope {
 public:
  AllocScope() {
    auto& s = alloc_stats();
    s.largest = 0;
    s.total = 0;
    s.count = 0;
    s.active = true;
  }
  ~AllocScope() { alloc_stats().active = false; }
  std::size_t largest() const { return alloc_stats().largest; }
  std::size_t total() const { return alloc_stats().total; }
  std::size_t count() const { return alloc_stats().count; }
};

inline void record(std::size_t n) {
  auto& s = alloc_stats();
  if (!s.active.load(std::memory_order_relaxed)) return;
  s.total += n;
  ++s.count;
  std::size_t prev = s.largest.load();
  while (n > prev && !s.largest.compare_exchange_weak(prev, n)) {
  }
}

}  // namespace nfse::test

void* operator new(std::size_t n) {
  nfse::test::record(n);
  if (void* p = std::malloc(n == 0 ? 1 : n)) return p;
  throw std::bad_alloc();
}
void* operator new[](std::size_t n) { return ::operator new(n); }
void* operator new(std::size_t n, std::align_val_t al) {
  nfse::test::record(n);
  const auto a = static_cast<std::size_t>(al);
  if (void* p = std::aligned_alloc(a, (n + a - 1) / a * a)) return p;
  throw std::bad_alloc();
}
void* operator new[](std::size_t n, std::align_val_t al) { return ::operator new(n, al); }
void operator delete(void* p) noexcept { std::free(p); }
void operator delete[](void* p) noexcept { std::free(p); }
void operator delete(void* p, std::size_t) noexcept { std::free(p); }
void operator delete[](void* p, std::size_t) noexcept { std::free(p); }
void operator delete(void* p, std::align_val_t) noexcept { std::free(p); }
void operator delete[](void* p, std::align_val_t) noexcept { std::free(p); }
void operator delete(void* p, std::size_t, std::align_val_t) noexcept { std::free(p); }
void operator delete[](void* p, std::size_t, std::align_val_t) noexcept { std::free(p); }
