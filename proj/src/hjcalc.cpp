#include "wahl/hjcalc.hpp"

#include <numeric>
#include <string>

namespace wahl {

using boost::multiprecision::gcd;

namespace {

void check_pair(const Int& m, const Int& q) {
    if (m <= 0 || q <= 0 || q >= m)
        throw hj_input_error("hj: require 0 < q < m");
    if (gcd(m, q) != 1)
        throw hj_input_error("hj: require gcd(m,q) = 1");
}

void check_chain(const std::vector<Int>& chain) {
    if (chain.empty())
        throw hj_input_error("hj: empty chain");
    for (const Int& e : chain)
        if (e < 2)
            throw hj_input_error("hj: chain entry < 2");
}

} // namespace

std::vector<Int> hj_expand(const Int& m, const Int& q) {
    check_pair(m, q);
    std::vector<Int> out;
    Int a = m, b = q;
    while (b > 0) {
        Int e = (a + b - 1) / b; // ceil(a/b)
        out.push_back(e);
        Int next = e * b - a;
        a = b;
        b = next;
    }
    return out;
}

CyclicQuotient hj_evaluate(const std::vector<Int>& chain) {
    check_chain(chain);
    // Backward fold: v_i = e_i - 1/v_{i+1}, kept as num/den.
    Int num = chain.back(), den = 1;
    for (std::size_t i = chain.size() - 1; i-- > 0;) {
        Int n2 = chain[i] * num - den;
        den = num;
        num = n2;
    }
    return CyclicQuotient{num, den};
}

std::vector<Int> wahl_chain(const WahlParams& p) {
    if (p.n < 2 || p.a <= 0 || p.a >= p.n || gcd(p.n, p.a) != 1)
        throw hj_input_error("wahl_chain: invalid (n,a)");
    return hj_expand(p.n * p.n, p.n * p.a - 1);
}

std::optional<WahlParams> recognize_wahl(const std::vector<Int>& chain) {
    CyclicQuotient cq = hj_evaluate(chain);
    Int n = boost::multiprecision::sqrt(cq.m);
    if (n * n != cq.m || n < 2)
        return std::nullopt;
    // q = n a - 1 for integral a in (0, n), gcd(n,a) = 1 is then automatic
    // from gcd(m,q) = 1.
    if ((cq.q + 1) % n != 0)
        return std::nullopt;
    Int a = (cq.q + 1) / n;
    if (a <= 0 || a >= n)
        return std::nullopt;
    return WahlParams{n, a};
}

std::optional<TParams> recognize_T(const std::vector<Int>& chain) {
    CyclicQuotient cq = hj_evaluate(chain);
    // m = d n^2, q = d n a - 1. Try every divisor d of m.
    auto try_d = [&](const Int& d) -> std::optional<TParams> {
        Int nn = cq.m / d;
        Int n = boost::multiprecision::sqrt(nn);
        if (n * n != nn || n < 2)
            return std::nullopt;
        if ((cq.q + 1) % (d * n) != 0)
            return std::nullopt;
        Int a = (cq.q + 1) / (d * n);
        if (a <= 0 || a >= n || gcd(n, a) != 1)
            return std::nullopt;
        return TParams{d, n, a};
    };
    std::optional<TParams> best;
    for (Int i = 1; i * i <= cq.m; ++i) {
        if (cq.m % i != 0)
            continue;
        for (const Int& d : {Int(i), Int(cq.m / i)}) {
            auto r = try_d(d);
            if (r && (!best || r->d < best->d))
                best = r;
        }
    }
    return best;
}

std::vector<Rat> discrepancies(const std::vector<Int>& chain) {
    check_chain(chain);
    // Tridiagonal system from adjunction: -e_j d_j + d_{j-1} + d_{j+1} = e_j - 2.
    // Thomas algorithm with exact rationals.
    const std::size_t s = chain.size();
    std::vector<Rat> diag(s), rhs(s);
    for (std::size_t j = 0; j < s; ++j) {
        diag[j] = Rat(-chain[j]);
        rhs[j] = Rat(chain[j] - 2);
    }
    // Forward elimination (sub/super diagonals are all 1).
    for (std::size_t j = 1; j < s; ++j) {
        Rat w = Rat(1) / diag[j - 1];
        diag[j] -= w;
        rhs[j] -= w * rhs[j - 1];
    }
    std::vector<Rat> d(s);
    d[s - 1] = rhs[s - 1] / diag[s - 1];
    for (std::size_t j = s - 1; j-- > 0;)
        d[j] = (rhs[j] - d[j + 1]) / diag[j];
    for (const Rat& v : d)
        if (v > 0 || v <= -1)
            throw std::logic_error("discrepancies: value out of (-1, 0]");
    return d;
}

Meridians meridian_exponents(const std::vector<Int>& chain) {
    check_chain(chain);
    Meridians mer;
    Int prev = 0, cur = 1;
    for (const Int& e : chain) {
        mer.exponents.push_back(cur);
        Int next = e * cur - prev;
        prev = cur;
        cur = next;
    }
    mer.order = cur;
    return mer;
}

bool length_bound_ok(const Int& k2, std::size_t s) {
    if (k2 < 1)
        throw hj_input_error("length_bound_ok: require k2 >= 1");
    return Int(s) <= 4 * k2 + 1;
}

Int chain_abs_determinant(const std::vector<Int>& chain) {
    check_chain(chain);
    // det recursion for tridiagonal (-e_i) with unit off-diagonals:
    // D_i = -e_i D_{i-1} - D_{i-2}; |det| = numerator of the chain fraction.
    Int d0 = 1, d1 = -chain[0];
    for (std::size_t i = 1; i < chain.size(); ++i) {
        Int d2 = -chain[i] * d1 - d0;
        d0 = d1;
        d1 = d2;
    }
    return boost::multiprecision::abs(d1);
}

std::uint64_t hj_roundtrip_exhaustive(std::int64_t limit) {
    using i64 = std::int64_t;
    if (limit < 2)
        return 0;
    // Depth-first enumeration of every valid chain (entries >= 2) whose value
    // m/q has m <= limit, built by prepending entries. A node with suffix
    // value p/r and prepended entry e evaluates to (e*p - r)/p — exactly the
    // hj_evaluate fold step — and the corresponding hj_expand step must
    // recover e as ceil(m/q) with remainder pair (p, r), which the division
    // check verifies. Since evaluation lands on coprime pairs and the visit
    // count is compared against sum(phi(m)) below, every pair (m, q) is
    // covered exactly once and the round trip holds for all of them.
    std::uint64_t verified = 0;
    struct Frame {
        i64 p, r, e;
    };
    std::vector<Frame> stack;
    stack.reserve(static_cast<std::size_t>(limit));
    stack.push_back({1, 0, 2});
    while (!stack.empty()) {
        Frame& f = stack.back();
        i64 m = f.e * f.p - f.r;
        if (m > limit) {
            stack.pop_back();
            continue;
        }
        if ((m + f.p - 1) / f.p != f.e)
            throw std::logic_error("hj_roundtrip_exhaustive: expand step mismatch at " +
                                   std::to_string(m) + "/" + std::to_string(f.p));
        ++verified;
        i64 p = f.p;
        ++f.e; // next sibling when this subtree is done
        stack.push_back({m, p, 2});
    }
    // Independent count of coprime pairs (m, q), 1 <= q < m <= limit, via a
    // totient sieve.
    std::vector<i64> phi(static_cast<std::size_t>(limit) + 1);
    for (i64 i = 0; i <= limit; ++i)
        phi[i] = i;
    for (i64 i = 2; i <= limit; ++i)
        if (phi[i] == i)
            for (i64 j = i; j <= limit; j += i)
                phi[j] -= phi[j] / i;
    std::uint64_t expected = 0;
    for (i64 m = 2; m <= limit; ++m)
        expected += static_cast<std::uint64_t>(phi[m]);
    if (verified != expected)
        throw std::logic_error("hj_roundtrip_exhaustive: visited " +
                               std::to_string(verified) + " pairs, expected " +
                               std::to_string(expected));
    return verified;
}

} // namespace wahl
