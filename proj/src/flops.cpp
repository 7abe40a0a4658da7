#include "adjblas/flops.hpp"

namespace adjblas {

namespace {
thread_local FlopCounter* tls_counter = nullptr;
}

FlopCounter& global_flop_counter() {
  static FlopCounter counter;
  return counter;
}

FlopCounter& flop_counter() {
  return tls_counter != nullptr ? *tls_counter : global_flop_counter();
}

ScopedFlopCounter::ScopedFlopCounter(FlopCounter& counter) : previous_(tls_counter) {
  tls_counter = &counter;
}

ScopedFlopCounter::~ScopedFlopCounter() { tls_counter = previous_; }

}  // namespace adjblas
