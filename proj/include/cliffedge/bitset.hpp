#pragma once

#include <cstdint>
#include <cstddef>
#include <functional>
#include <vector>

namespace cliffedge {

// Fixed-universe dynamic bitset. All sets of events/conditions in a prefix
// use this; the universe size is pinned when the set is created.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(std::size_t nbits)
        : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    std::size_t universe() const { return nbits_; }

    bool test(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::size_t i) { words_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
        return n;
    }
    bool empty() const {
        for (auto w : words_) if (w) return false;
        return true;
    }

    bool subset_of(const Bitset& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }
    bool intersects(const Bitset& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    Bitset& operator|=(const Bitset& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    Bitset& operator&=(const Bitset& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    Bitset& subtract(const Bitset& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }

    // OR in a set over a smaller (prefix) universe.
    Bitset& merge_prefix(const Bitset& o) {
        std::size_t n = std::min(words_.size(), o.words_.size());
        for (std::size_t i = 0; i < n; ++i) words_[i] |= o.words_[i];
        return *this;
    }

    friend bool operator==(const Bitset& a, const Bitset& b) {
        return a.nbits_ == b.nbits_ && a.words_ == b.words_;
    }
    friend bool operator<(const Bitset& a, const Bitset& b) {
        return a.words_ < b.words_;  // lexicographic on words, universe equal by use
    }

    // Calls f(i) for every set bit, ascending.
    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            std::uint64_t w = words_[wi];
            while (w) {
                unsigned b = static_cast<unsigned>(__builtin_ctzll(w));
                f(wi * 64 + b);
                w &= w - 1;
            }
        }
    }

    std::vector<std::uint32_t> to_vector() const {
        std::vector<std::uint32_t> out;
        out.reserve(count());
        for_each([&](std::size_t i) { out.push_back(static_cast<std::uint32_t>(i)); });
        return out;
    }

    std::size_t hash() const {
        std::size_t h = 0x9e3779b97f4a7c15ull;
        for (auto w : words_) h = h * 1099511628211ull ^ w;
        return h;
    }

private:
    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

struct BitsetHash {
    std::size_t operator()(const Bitset& b) const { return b.hash(); }
};

}  // namespace cliffedge
