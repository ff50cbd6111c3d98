#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fofin/error.hpp"

namespace fofin {

class Alphabet {
 public:
  explicit Alphabet(std::string_view letters) : letters_(letters) {
    if (letters_.empty()) throw Error("alphabet must not be empty");
    for (char c : letters_)
      if (c < 'a' || c > 'z') throw Error(std::string("alphabet letter '") + c + "' is not lowercase ASCII");
    std::sort(letters_.begin(), letters_.end());
    if (std::adjacent_find(letters_.begin(), letters_.end()) != letters_.end())
      throw Error("alphabet has duplicate letters: " + std::string(letters));
  }

  const std::string& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  char at(std::size_t i) const { return letters_[i]; }
  bool contains(char c) const { return letters_.find(c) != std::string::npos; }
  std::size_t index(char c) const { return letters_.find(c); }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::string letters_;
};

// Read-only view of letters at positions 0..size()-1. run_end lets evaluators skip runs.
class LetterSource {
 public:
  virtual ~LetterSource() = default;
  virtual std::int64_t size() const = 0;
  virtual char letter_at(std::int64_t p) const = 0;
  // Smallest q > p with a different letter than p, or size().
  virtual std::int64_t run_end(std::int64_t p) const = 0;
};

class Word : public LetterSource {
 public:
  Word(Alphabet alphabet, std::string symbols) : alphabet_(std::move(alphabet)), symbols_(std::move(symbols)) {
    for (char c : symbols_)
      if (!alphabet_.contains(c))
        throw Error(std::string("letter '") + c + "' is not in alphabet {" + alphabet_.letters() + "}");
    build_runs();
  }

  const Alphabet& alphabet() const { return alphabet_; }
  const std::string& str() const { return symbols_; }
  std::int64_t size() const override { return static_cast<std::int64_t>(symbols_.size()); }

  char letter_at(std::int64_t p) const override {
    if (p < 0 || p >= size())
      throw EvalError("position " + std::to_string(p) + " read outside word of length " + std::to_string(size()));
    return symbols_[static_cast<std::size_t>(p)];
  }

  std::int64_t run_end(std::int64_t p) const override {
    if (p < 0 || p >= size()) throw EvalError("run_end outside word");
    return run_end_[static_cast<std::size_t>(p)];
  }

  Word concat(const Word& o) const { return Word(alphabet_, symbols_ + o.symbols_); }

  friend bool operator==(const Word& a, const Word& b) { return a.symbols_ == b.symbols_; }

 private:
  void build_runs() {
    run_end_.assign(symbols_.size(), 0);
    std::int64_t end = size();
    for (std::int64_t i = size() - 1; i >= 0; --i) {
      if (i + 1 < size() && symbols_[i] != symbols_[i + 1]) end = i + 1;
      run_end_[static_cast<std::size_t>(i)] = end;
    }
  }

  Alphabet alphabet_;
  std::string symbols_;
  std::vector<std::int64_t> run_end_;
};

// The word u e^N v without materializing the padding block.
class PaddedWord : public LetterSource {
 public:
  PaddedWord(const Word& u, char e, std::int64_t n, const Word& v) : u_(u), v_(v), e_(e), n_(n) {
    if (n < 0) throw Error("negative padding length");
  }

  std::int64_t size() const override { return u_.size() + n_ + v_.size(); }

  char letter_at(std::int64_t p) const override {
    if (p < 0 || p >= size())
      throw EvalError("position " + std::to_string(p) + " read outside word of length " + std::to_string(size()));
    if (p < u_.size()) return u_.letter_at(p);
    if (p < u_.size() + n_) return e_;
    return v_.letter_at(p - u_.size() - n_);
  }

  std::int64_t run_end(std::int64_t p) const override {
    if (p < 0 || p >= size()) throw EvalError("run_end outside word");
    // Runs may continue across the u/e^N/v seams; stopping at a seam is still exact for callers.
    if (p < u_.size()) return u_.run_end(p);
    if (p < u_.size() + n_) return u_.size() + n_;
    return u_.size() + n_ + v_.run_end(p - u_.size() - n_);
  }

  std::int64_t u_size() const { return u_.size(); }
  std::int64_t padding() const { return n_; }
  std::int64_t v_size() const { return v_.size(); }
  char neutral() const { return e_; }

  Word materialize() const {
    std::string s = u_.str() + std::string(static_cast<std::size_t>(n_), e_) + v_.str();
    return Word(u_.alphabet(), std::move(s));
  }

 private:
  Word u_;
  Word v_;
  char e_;
  std::int64_t n_;
};

// Words of length `len` in lexicographic order; index 0 is a^len for the least letter a.
inline Word word_from_index(const Alphabet& a, std::size_t len, std::uint64_t idx) {
  std::string s(len, a.at(0));
  for (std::size_t i = len; i-- > 0;) {
    s[i] = a.at(idx % a.size());
    idx /= a.size();
  }
  return Word(a, std::move(s));
}

// |A|^len saturating at 2^62.
inline std::uint64_t word_count(const Alphabet& a, std::size_t len) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < len; ++i) {
    if (n > (std::uint64_t{1} << 62) / a.size()) return std::uint64_t{1} << 62;
    n *= a.size();
  }
  return n;
}

template <class F>
void for_each_word(const Alphabet& a, std::size_t len, F&& f) {
  std::uint64_t n = word_count(a, len);
  for (std::uint64_t i = 0; i < n; ++i) f(word_from_index(a, len, i));
}

}  // namespace fofin
