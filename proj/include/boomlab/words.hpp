#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace boomlab {

// generator 0 is a, generator i >= 1 is b_i
struct Letter {
    int gen = 0;
    int exp = 1;  // +1 or -1
    auto operator<=>(const Letter&) const = default;
    Letter inv() const { return {gen, -exp}; }
};

class WordError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Word {
public:
    Word() = default;
    // throws WordError if the sequence is not reduced
    explicit Word(std::vector<Letter> letters);
    static Word reduce(std::vector<Letter> letters);

    static Word a(int power = 1);
    static Word b(int i, int power = 1);

    const std::vector<Letter>& letters() const { return letters_; }
    std::size_t length() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    const Letter& operator[](std::size_t i) const { return letters_[i]; }

    Word inverse() const;
    Word power(int k) const;
    int max_gen() const;

    // shortlex
    bool operator<(const Word& o) const;
    bool operator==(const Word& o) const { return letters_ == o.letters_; }
    bool operator!=(const Word& o) const { return !(*this == o); }

    std::string str() const;

private:
    std::vector<Letter> letters_;
};

Word multiply(const Word& u, const Word& v);
inline Word operator*(const Word& u, const Word& v) { return multiply(u, v); }

int c_a(const Word& w);

struct CyclicReduction {
    Word core;
    Word conjugator;  // w = conjugator * core * conjugator^-1
};
CyclicReduction cyclic_reduce(const Word& w);
bool is_cyclically_reduced(const Word& w);

std::optional<int> conjugate_power_of_a(const Word& w);

std::set<Word> ball(int radius, const std::vector<int>& gens);

// "a b1^-1 b2", "a^3" is expanded; "" or "1" or "e" is the identity
Word parse_word(const std::string& text, bool auto_reduce = false);

// uniformly random reduced word of the given length in a, b_1..b_nb
Word random_reduced_word(std::mt19937_64& rng, int length, int nb);

}  // namespace boomlab
