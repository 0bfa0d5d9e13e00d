#ifndef TILER_BITSET_HPP
#define TILER_BITSET_HPP

#include <bit>
#include <cstdint>
#include <cassert>
#include <vector>

namespace tiler {

// Fixed-universe bitset over uint64_t words. Doubles as VertexSet.
struct VertexSet {
    int n = 0;
    std::vector<uint64_t> w;

    VertexSet() = default;
    explicit VertexSet(int n_) : n(n_), w((n_ + 63) / 64, 0) {}

    static VertexSet full(int n_) {
        VertexSet s(n_);
        for (int v = 0; v < n_; ++v) s.set(v);
        return s;
    }

    void set(int i) { assert(i >= 0 && i < n); w[i >> 6] |= (uint64_t{1} << (i & 63)); }
    void reset(int i) { assert(i >= 0 && i < n); w[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
    bool test(int i) const { assert(i >= 0 && i < n); return (w[i >> 6] >> (i & 63)) & 1; }

    int count() const {
        int c = 0;
        for (uint64_t x : w) c += std::popcount(x);
        return c;
    }
    bool any() const {
        for (uint64_t x : w) if (x) return true;
        return false;
    }
    bool empty() const { return !any(); }

    VertexSet operator&(const VertexSet& o) const {
        assert(n == o.n);
        VertexSet r(n);
        for (size_t i = 0; i < w.size(); ++i) r.w[i] = w[i] & o.w[i];
        return r;
    }
    VertexSet operator|(const VertexSet& o) const {
        assert(n == o.n);
        VertexSet r(n);
        for (size_t i = 0; i < w.size(); ++i) r.w[i] = w[i] | o.w[i];
        return r;
    }
    VertexSet and_not(const VertexSet& o) const {
        assert(n == o.n);
        VertexSet r(n);
        for (size_t i = 0; i < w.size(); ++i) r.w[i] = w[i] & ~o.w[i];
        return r;
    }
    VertexSet complement() const {
        VertexSet r(n);
        for (size_t i = 0; i < w.size(); ++i) r.w[i] = ~w[i];
        if (n & 63) r.w.back() &= (uint64_t{1} << (n & 63)) - 1;
        return r;
    }
    VertexSet& operator|=(const VertexSet& o) {
        assert(n == o.n);
        for (size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
        return *this;
    }
    VertexSet& operator&=(const VertexSet& o) {
        assert(n == o.n);
        for (size_t i = 0; i < w.size(); ++i) w[i] &= o.w[i];
        return *this;
    }
    bool operator==(const VertexSet& o) const { return n == o.n && w == o.w; }

    bool subset_of(const VertexSet& o) const {
        assert(n == o.n);
        for (size_t i = 0; i < w.size(); ++i)
            if (w[i] & ~o.w[i]) return false;
        return true;
    }
    bool intersects(const VertexSet& o) const {
        assert(n == o.n);
        for (size_t i = 0; i < w.size(); ++i)
            if (w[i] & o.w[i]) return true;
        return false;
    }
    int intersect_count(const VertexSet& o) const {
        assert(n == o.n);
        int c = 0;
        for (size_t i = 0; i < w.size(); ++i) c += std::popcount(w[i] & o.w[i]);
        return c;
    }

    // lowest set bit, or -1
    int first() const {
        for (size_t i = 0; i < w.size(); ++i)
            if (w[i]) return int(i * 64 + std::countr_zero(w[i]));
        return -1;
    }
    // next set bit strictly after i, or -1
    int next(int i) const {
        ++i;
        if (i >= n) return -1;
        size_t wi = i >> 6;
        uint64_t x = w[wi] & ~((uint64_t{1} << (i & 63)) - 1);
        while (true) {
            if (x) return int(wi * 64 + std::countr_zero(x));
            if (++wi >= w.size()) return -1;
            x = w[wi];
        }
    }

    std::vector<int> to_vector() const {
        std::vector<int> out;
        out.reserve(count());
        for (int v = first(); v >= 0; v = next(v)) out.push_back(v);
        return out;
    }

    static VertexSet of(int n_, const std::vector<int>& ids) {
        VertexSet s(n_);
        for (int v : ids) s.set(v);
        return s;
    }
};

} // namespace tiler

#endif
