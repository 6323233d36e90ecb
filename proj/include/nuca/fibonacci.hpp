// Fibonacci numeration and exact Beatty-sequence arithmetic.
//
// Provides the integer kernel used by the lattice labelling code:
//  - the Fibonacci sequence A_1=1, A_2=2, A_{k+2}=A_{k+1}+A_k,
//  - Zeckendorf (Fibonacci) representations of positive integers,
//  - exact floor(phi^2 * n) and floor(n / phi^2) where phi is the golden
//    ratio, evaluated with integer square roots only (no floating point),
//  - the auxiliary row functions J, P, C built on top of them.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nuca {

// Fibonacci representation: digits alpha_1..alpha_m stored least-significant
// first (digit(0) multiplies A_1).  Valid representations have no two
// adjacent 1-digits and no leading zero.
struct FibRep {
    std::vector<uint8_t> digits;  // LSB first

    bool valid() const;
    // Human-readable form, most-significant digit first (e.g. 12 -> "10101").
    std::string to_string() const;
};

// A_n with A_1=1, A_2=2.  Throws std::domain_error for n < 1 and
// std::overflow_error if A_n exceeds the int64 range (n > 90).
int64_t fib(int n);

// Greedy Zeckendorf decomposition of v >= 1; throws std::domain_error on v<1.
FibRep zeckendorf(int64_t v);

// Exact inverse of zeckendorf(); throws std::domain_error on invalid reps.
int64_t fib_value(const FibRep& r);

// floor(sqrt(x)) for x >= 0 over the unsigned 128-bit range.
uint64_t isqrt_u128(unsigned __int128 x);

// floor(phi^2 * n) for n >= 0, where phi^2 = (3 + sqrt 5)/2.
int64_t beatty_floor_mul(int64_t n);

// floor(n / phi^2) = floor(n * (3 - sqrt 5)/2) for n >= 0.
int64_t beatty_floor_div(int64_t n);

// Indicator of black rows: J(j) = 1 iff j = floor(phi^2 * ceil(j / phi^2)),
// with J(0) = 0.
int J54(int64_t j);

// Parent row: P(j) = floor(j / phi^2).
int64_t P54(int64_t j);

// Preferred-child row: C(j) = floor(phi^2 (j+1)) if J(j)=1, else that - 1.
int64_t C54(int64_t j);

}  // namespace nuca
