#include "nuca/fibonacci.hpp"

#include <algorithm>

namespace nuca {

bool FibRep::valid() const {
    if (digits.empty() || digits.back() == 0) return false;
    for (size_t i = 0; i < digits.size(); ++i) {
        if (digits[i] > 1) return false;
        if (i + 1 < digits.size() && digits[i] == 1 && digits[i + 1] == 1) return false;
    }
    return true;
}

std::string FibRep::to_string() const {
    std::string s;
    s.reserve(digits.size());
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) s.push_back(char('0' + *it));
    return s;
}

namespace {
// A_1..A_90 precomputed once (A_90 is the largest member fitting in int64).
const std::vector<int64_t>& fib_table() {
    static const std::vector<int64_t> table = [] {
        std::vector<int64_t> t(91, 0);
        t[1] = 1;
        t[2] = 2;
        for (int k = 3; k <= 90; ++k) t[k] = t[k - 1] + t[k - 2];
        return t;
    }();
    return table;
}
}  // namespace

int64_t fib(int n) {
    if (n < 1) throw std::domain_error("fib: index must be >= 1");
    if (n > 90) throw std::overflow_error("fib: index exceeds 64-bit range");
    return fib_table()[size_t(n)];
}

FibRep zeckendorf(int64_t v) {
    if (v < 1) throw std::domain_error("zeckendorf: value must be >= 1");
    const auto& A = fib_table();
    // Find the largest index m with A_m <= v.
    int m = 1;
    while (m < 90 && A[size_t(m + 1)] <= v) ++m;
    FibRep r;
    r.digits.assign(size_t(m), 0);
    int64_t rem = v;
    for (int k = m; k >= 1; --k) {
        if (A[size_t(k)] <= rem) {
            r.digits[size_t(k - 1)] = 1;
            rem -= A[size_t(k)];
        }
    }
    return r;
}

int64_t fib_value(const FibRep& r) {
    if (!r.valid()) throw std::domain_error("fib_value: invalid Fibonacci representation");
    int64_t v = 0;
    for (size_t i = 0; i < r.digits.size(); ++i)
        if (r.digits[i]) v += fib(int(i) + 1);
    return v;
}

uint64_t isqrt_u128(unsigned __int128 x) {
    if (x == 0) return 0;
    // Newton iteration seeded from the double approximation; converges in a
    // couple of steps, then corrected to the exact floor.
    unsigned __int128 r = (unsigned __int128)__builtin_sqrtl((long double)x);
    while (r * r > x) --r;
    while ((r + 1) * (r + 1) <= x) ++r;
    return (uint64_t)r;
}

// For n > 0, sqrt(5 n^2) is irrational, so with s = floor(sqrt(5 n^2)):
//   floor((3n + sqrt(5 n^2)) / 2) = floor((3n + s) / 2)
//   floor((3n - sqrt(5 n^2)) / 2) = floor((3n - s - 1) / 2)
// Both identities rely only on 0 < frac(sqrt(5 n^2)) < 1.
int64_t beatty_floor_mul(int64_t n) {
    if (n < 0) throw std::domain_error("beatty_floor_mul: negative argument");
    if (n == 0) return 0;
    unsigned __int128 nn = (unsigned __int128)n;
    uint64_t s = isqrt_u128(5 * nn * nn);
    return (3 * n + int64_t(s)) / 2;
}

int64_t beatty_floor_div(int64_t n) {
    if (n < 0) throw std::domain_error("beatty_floor_div: negative argument");
    if (n == 0) return 0;
    unsigned __int128 nn = (unsigned __int128)n;
    uint64_t s = isqrt_u128(5 * nn * nn);
    return (3 * n - int64_t(s) - 1) / 2;
}

int J54(int64_t j) {
    if (j <= 0) return 0;
    return j == beatty_floor_mul(beatty_floor_div(j) + 1) ? 1 : 0;
}

int64_t P54(int64_t j) { return beatty_floor_div(j); }

int64_t C54(int64_t j) {
    int64_t c = beatty_floor_mul(j + 1);
    return J54(j) ? c : c - 1;
}

}  // namespace nuca
