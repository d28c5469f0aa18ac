#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "teich/errors.hpp"

namespace teich {

// A freely reduced word in the generators of a finitely generated group.
// Letters are stored as +(i+1) for generator i and -(i+1) for its inverse;
// adjacent cancelling pairs are removed as letters are appended. Words are
// inline values with a fixed capacity, which covers every word this library
// forms (ball words, relators, mapping-class images of ball words).
class Word {
public:
    static constexpr int max_length = 30;

    Word() = default;

    static Word generator(int index, bool inverse = false) {
        Word w;
        w.push(inverse ? -(index + 1) : (index + 1));
        return w;
    }

    int size() const { return n_; }
    bool empty() const { return n_ == 0; }

    // Generator index and sign of the k-th letter.
    int index(int k) const { return std::abs(l_[k]) - 1; }
    bool inverted(int k) const { return l_[k] < 0; }

    void push(int8_t letter) {
        if (n_ > 0 && l_[n_ - 1] == -letter) { --n_; return; }
        if (n_ >= max_length)
            fail(errc::word_too_long, "word exceeds " + std::to_string(max_length) + " letters");
        l_[n_++] = letter;
    }

    void push_generator(int index, bool inverse = false) {
        push(inverse ? static_cast<int8_t>(-(index + 1)) : static_cast<int8_t>(index + 1));
    }

    // Remove the last letter. Only valid when the preceding push appended
    // rather than cancelled (ball walks guarantee this).
    void pop() { --n_; }

    Word operator*(const Word& o) const {
        Word w = *this;
        for (int k = 0; k < o.n_; ++k) w.push(o.l_[k]);
        return w;
    }

    Word inverse() const {
        Word w;
        for (int k = n_ - 1; k >= 0; --k) w.push(static_cast<int8_t>(-l_[k]));
        return w;
    }

    bool operator==(const Word& o) const {
        if (n_ != o.n_) return false;
        for (int k = 0; k < n_; ++k)
            if (l_[k] != o.l_[k]) return false;
        return true;
    }

    // Shortlex: length first, then letter ranks with A < A' < B < B' < ...
    static int letter_rank(int8_t letter) {
        return 2 * (std::abs(letter) - 1) + (letter < 0 ? 1 : 0);
    }

    bool shortlex_less(const Word& o) const {
        if (n_ != o.n_) return n_ < o.n_;
        for (int k = 0; k < n_; ++k) {
            int r = letter_rank(l_[k]), s = letter_rank(o.l_[k]);
            if (r != s) return r < s;
        }
        return false;
    }

    int max_index() const {
        int m = -1;
        for (int k = 0; k < n_; ++k) m = std::max(m, index(k));
        return m;
    }

private:
    uint8_t n_ = 0;
    std::array<int8_t, max_length> l_{};
};

// "A B A' B'" with A' (or the UTF-8 superscript -1) denoting the inverse.
inline Word parse_word(const std::string& text, std::span<const std::string> names) {
    Word w;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        std::string token = text.substr(i, j - i);
        i = j;
        bool inv = false;
        if (token.size() >= 1 && token.back() == '\'') {
            inv = true;
            token.pop_back();
        } else if (token.size() >= 5 && token.substr(token.size() - 5) == "⁻¹") {
            inv = true;
            token.resize(token.size() - 5);
        }
        int idx = -1;
        for (size_t g = 0; g < names.size(); ++g)
            if (names[g] == token) { idx = static_cast<int>(g); break; }
        if (idx < 0) fail(errc::unknown_generator, "unknown generator '" + token + "'");
        w.push_generator(idx, inv);
    }
    return w;
}

inline std::string format_word(const Word& w, std::span<const std::string> names) {
    if (w.empty()) return "";
    std::string out;
    for (int k = 0; k < w.size(); ++k) {
        if (k) out += ' ';
        out += names[w.index(k)];
        if (w.inverted(k)) out += '\'';
    }
    return out;
}

} // namespace teich
