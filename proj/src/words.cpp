#include "boomlab/words.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

namespace boomlab {

namespace {

bool cancels(const Letter& x, const Letter& y) { return x.gen == y.gen && x.exp == -y.exp; }

void check_letter(const Letter& l) {
    if (l.gen < 0) throw WordError("negative generator index");
    if (l.exp != 1 && l.exp != -1) throw WordError("exponent must be +1 or -1");
}

}  // namespace

Word::Word(std::vector<Letter> letters) : letters_(std::move(letters)) {
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        check_letter(letters_[i]);
        if (i > 0 && cancels(letters_[i - 1], letters_[i]))
            throw WordError("word is not reduced at position " + std::to_string(i));
    }
}

Word Word::reduce(std::vector<Letter> letters) {
    std::vector<Letter> out;
    out.reserve(letters.size());
    for (const auto& l : letters) {
        check_letter(l);
        if (!out.empty() && cancels(out.back(), l))
            out.pop_back();
        else
            out.push_back(l);
    }
    Word w;
    w.letters_ = std::move(out);
    return w;
}

Word Word::a(int power) { return b(0, power); }

Word Word::b(int i, int power) {
    std::vector<Letter> ls(static_cast<std::size_t>(power < 0 ? -power : power),
                           Letter{i, power < 0 ? -1 : 1});
    return Word(std::move(ls));
}

Word Word::inverse() const {
    Word w;
    w.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(it->inv());
    return w;
}

Word Word::power(int k) const {
    Word base = k < 0 ? inverse() : *this;
    Word r;
    for (int i = 0; i < (k < 0 ? -k : k); ++i) r = multiply(r, base);
    return r;
}

int Word::max_gen() const {
    int m = -1;
    for (const auto& l : letters_) m = std::max(m, l.gen);
    return m;
}

bool Word::operator<(const Word& o) const {
    if (letters_.size() != o.letters_.size()) return letters_.size() < o.letters_.size();
    return letters_ < o.letters_;
}

std::string Word::str() const {
    std::string s;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        if (i) s += ' ';
        const auto& l = letters_[i];
        s += l.gen == 0 ? std::string("a") : "b" + std::to_string(l.gen);
        if (l.exp < 0) s += "^-1";
    }
    return s;
}

Word multiply(const Word& u, const Word& v) {
    std::vector<Letter> ls(u.letters());
    ls.insert(ls.end(), v.letters().begin(), v.letters().end());
    return Word::reduce(std::move(ls));
}

int c_a(const Word& w) {
    int s = 0;
    for (const auto& l : w.letters())
        if (l.gen == 0) s += l.exp;
    return s;
}

CyclicReduction cyclic_reduce(const Word& w) {
    const auto& ls = w.letters();
    std::size_t lo = 0, hi = ls.size();
    while (hi - lo >= 2 && cancels(ls[lo], ls[hi - 1])) {
        ++lo;
        --hi;
    }
    std::vector<Letter> core(ls.begin() + static_cast<long>(lo), ls.begin() + static_cast<long>(hi));
    std::vector<Letter> conj(ls.begin(), ls.begin() + static_cast<long>(lo));
    return {Word(std::move(core)), Word(std::move(conj))};
}

bool is_cyclically_reduced(const Word& w) {
    return w.length() < 2 || !cancels(w.letters().front(), w.letters().back());
}

std::optional<int> conjugate_power_of_a(const Word& w) {
    Word core = cyclic_reduce(w).core;
    if (core.empty()) return std::nullopt;
    for (const auto& l : core.letters())
        if (l.gen != 0) return std::nullopt;
    return c_a(core);
}

std::set<Word> ball(int radius, const std::vector<int>& gens) {
    std::set<Word> out;
    out.insert(Word());
    std::vector<Word> frontier{Word()};
    for (int r = 0; r < radius; ++r) {
        std::vector<Word> next;
        for (const auto& w : frontier) {
            for (int g : gens) {
                for (int e : {1, -1}) {
                    Letter l{g, e};
                    if (!w.empty() && cancels(w.letters().back(), l)) continue;
                    std::vector<Letter> ls(w.letters());
                    ls.push_back(l);
                    Word nw(std::move(ls));
                    if (out.insert(nw).second) next.push_back(std::move(nw));
                }
            }
        }
        frontier = std::move(next);
    }
    return out;
}

Word parse_word(const std::string& text, bool auto_reduce) {
    std::istringstream in(text);
    std::string tok;
    std::vector<Letter> ls;
    while (in >> tok) {
        if (tok == "1" || tok == "e") continue;
        std::size_t pos = 0;
        int gen;
        if (tok[0] == 'a') {
            gen = 0;
            pos = 1;
        } else if (tok[0] == 'b') {
            pos = 1;
            std::size_t st = pos;
            while (pos < tok.size() && std::isdigit(static_cast<unsigned char>(tok[pos]))) ++pos;
            if (pos == st) throw WordError("missing index in token '" + tok + "'");
            gen = std::stoi(tok.substr(st, pos - st));
            if (gen < 1) throw WordError("b-index must be >= 1 in '" + tok + "'");
        } else {
            throw WordError("unknown token '" + tok + "'");
        }
        int power = 1;
        if (pos < tok.size()) {
            if (tok[pos] != '^') throw WordError("bad token '" + tok + "'");
            std::string ex = tok.substr(pos + 1);
            if (ex.empty()) throw WordError("empty exponent in '" + tok + "'");
            std::size_t used = 0;
            try {
                power = std::stoi(ex, &used);
            } catch (const std::exception&) {
                throw WordError("bad exponent in '" + tok + "'");
            }
            if (used != ex.size() || power == 0) throw WordError("bad exponent in '" + tok + "'");
        }
        for (int i = 0; i < std::abs(power); ++i) ls.push_back({gen, power < 0 ? -1 : 1});
    }
    if (auto_reduce) return Word::reduce(std::move(ls));
    return Word(std::move(ls));
}

Word random_reduced_word(std::mt19937_64& rng, int length, int nb) {
    std::vector<Letter> ls;
    std::uniform_int_distribution<int> pick(0, 2 * nb + 1);
    while (static_cast<int>(ls.size()) < length) {
        int x = pick(rng);
        Letter l{x / 2, x % 2 ? -1 : 1};
        if (!ls.empty() && cancels(ls.back(), l)) continue;
        ls.push_back(l);
    }
    return Word(std::move(ls));
}

}  // namespace boomlab
