#pragma once

#include <cstdint>

// Arithmetic-operation counting hook. In normal builds CERTIQP_COUNT compiles
// to nothing. Targets compiled with -DCERTIQP_COUNT_FLOPS accumulate into a
// thread-local counter so tests can assert the certified closed-form counts
// against the operations actually executed.
//
// Counted: +, -, *, / and unary negation on problem data. Not counted:
// comparisons, fabs, copies, and the O(1) transcendental parameter setup.

namespace certiqp {

#ifdef CERTIQP_COUNT_FLOPS
extern thread_local std::uint64_t flop_counter;
inline void count_flops(std::uint64_t n) { flop_counter += n; }
#else
inline void count_flops(std::uint64_t) {}
#endif

}  // namespace certiqp

#define CERTIQP_COUNT(n) ::certiqp::count_flops(n)
