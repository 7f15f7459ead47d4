#include "qrot/subst.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace qrot {

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], static_cast<Letter>(i)).second)
      throw ParseError("duplicate letter '" + names_[i] + "'");
  }
}

Letter Alphabet::index(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ParseError("unknown letter '" + std::string(name) + "'");
  return it->second;
}

bool Alphabet::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

Word Alphabet::parse_word(std::string_view text) const {
  Word w;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const Letter l = index(text.substr(i, 1));
    ++i;
    long reps = 1;
    if (i < text.size() && text[i] == '^') {
      std::size_t j = ++i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j == i) throw ParseError("expected exponent in word '" + std::string(text) + "'");
      reps = std::stol(std::string(text.substr(i, j - i)));
      i = j;
    }
    w.insert(w.end(), static_cast<std::size_t>(reps), l);
  }
  return w;
}

std::string Alphabet::format(const Word& w) const {
  std::string out;
  bool multi = false;
  for (const auto& n : names_) multi = multi || n.size() != 1;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (multi && i > 0) out += ' ';
    out += name(w[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

BigMatrix mat_identity(std::size_t n) {
  BigMatrix m(n, std::vector<BigInt>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

BigMatrix mat_mul(const BigMatrix& a, const BigMatrix& b) {
  const std::size_t rows = a.size();
  const std::size_t inner = b.size();
  const std::size_t cols = inner ? b[0].size() : 0;
  BigMatrix c(rows, std::vector<BigInt>(cols, 0));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

BigMatrix mat_pow(const BigMatrix& m, unsigned long n) {
  BigMatrix result = mat_identity(m.size());
  BigMatrix base = m;
  while (n > 0) {
    if (n & 1) result = mat_mul(result, base);
    n >>= 1;
    if (n > 0) base = mat_mul(base, base);
  }
  return result;
}

std::vector<BigInt> mat_apply(const BigMatrix& m, const std::vector<BigInt>& v) {
  std::vector<BigInt> out(m.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

std::vector<BigInt> char_poly(const BigMatrix& m) {
  // Faddeev-LeVerrier over the rationals; all coefficients end up integral.
  const std::size_t n = m.size();
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
  std::vector<Rational> c(n + 1);
  c[n] = 1;
  std::vector<std::vector<Rational>> mk(n, std::vector<Rational>(n, 0));  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    // M_k = A M_{k-1} + c_{n-k+1} I
    std::vector<std::vector<Rational>> next(n, std::vector<Rational>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t l = 0; l < n; ++l) next[i][j] += a[i][l] * mk[l][j];
        if (i == j) next[i][j] += c[n - k + 1];
      }
    mk = std::move(next);
    Rational tr = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) tr += a[i][l] * mk[l][i];
    c[n - k] = -tr / static_cast<long>(k);
  }
  std::vector<BigInt> out;
  for (auto& r : c) {
    if (r.get_den() != 1) throw ArithmeticError("non-integral characteristic polynomial");
    out.push_back(r.get_num());
  }
  return out;
}

// ---------------------------------------------------------------------------

Substitution::Substitution(std::shared_ptr<const Alphabet> source,
                           std::shared_ptr<const Alphabet> target, std::vector<Word> images)
    : source_(std::move(source)), target_(std::move(target)), images_(std::move(images)) {
  if (images_.size() != source_->size())
    throw ParseError("substitution needs one image per source letter");
  for (const auto& w : images_)
    for (Letter l : w)
      if (l < 0 || static_cast<std::size_t>(l) >= target_->size())
        throw ParseError("image letter outside the target alphabet");
}

Word Substitution::apply(const Word& w) const {
  Word out;
  for (Letter l : w) {
    if (l < 0 || static_cast<std::size_t>(l) >= images_.size())
      throw ParseError("letter outside the source alphabet");
    const Word& img = images_[static_cast<std::size_t>(l)];
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

Word Substitution::iterate(const Word& w, unsigned n) const {
  if (!is_endomorphism()) throw ArithmeticError("iterating a non-endomorphism");
  Word cur = w;
  for (unsigned k = 0; k < n; ++k) cur = apply(cur);
  return cur;
}

Substitution Substitution::reversed() const {
  std::vector<Word> imgs = images_;
  for (auto& w : imgs) std::reverse(w.begin(), w.end());
  return {source_, target_, std::move(imgs)};
}

Substitution Substitution::after(const Substitution& inner) const {
  if (inner.target_ != source_) throw ArithmeticError("composition alphabet mismatch");
  std::vector<Word> imgs;
  for (std::size_t l = 0; l < inner.source().size(); ++l)
    imgs.push_back(apply(inner.image(static_cast<Letter>(l))));
  return {inner.source_, target_, std::move(imgs)};
}

std::size_t Substitution::max_image_length() const {
  std::size_t m = 0;
  for (const auto& w : images_) m = std::max(m, w.size());
  return m;
}

BigMatrix Substitution::incidence() const {
  BigMatrix m(target_->size(), std::vector<BigInt>(source_->size(), 0));
  for (std::size_t l = 0; l < images_.size(); ++l)
    for (Letter t : images_[l]) m[static_cast<std::size_t>(t)][l] += 1;
  return m;
}

std::vector<BigInt> Substitution::letter_counts(const Word& w, unsigned long n) const {
  std::vector<BigInt> v(source_->size(), 0);
  for (Letter l : w) v.at(static_cast<std::size_t>(l)) += 1;
  if (n == 0) return v;
  if (!is_endomorphism()) throw ArithmeticError("iterating a non-endomorphism");
  return mat_apply(mat_pow(incidence(), n), v);
}

std::vector<BigInt> Substitution::letter_counts(Letter l, unsigned long n) const {
  return letter_counts(Word{l}, n);
}

BigInt Substitution::length(Letter l, unsigned long n) const {
  BigInt s = 0;
  for (const auto& c : letter_counts(l, n)) s += c;
  return s;
}

BigInt Substitution::tau_length(const Word& w, unsigned long n,
                                const std::vector<BigInt>& weights) const {
  const auto counts = letter_counts(w, n);
  if (weights.size() != counts.size()) throw ArithmeticError("weight vector size mismatch");
  BigInt s = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) s += counts[i] * weights[i];
  return s;
}

BigInt Substitution::tau_length(Letter l, unsigned long n, const std::vector<BigInt>& weights) const {
  return tau_length(Word{l}, n, weights);
}

Word fixed_point_prefix(const Substitution& s, Letter seed, std::size_t n) {
  Word w{seed};
  while (w.size() < n) {
    Word next = s.apply(w);
    if (next.size() <= w.size()) throw ArithmeticError("substitution does not grow from the seed");
    w = std::move(next);
  }
  w.resize(n);
  return w;
}

bool thue_morse_check(std::size_t n) {
  if (n == 0) return true;
  auto bin = std::make_shared<const Alphabet>(std::vector<std::string>{"0", "1"});
  // Thue-Morse word until it has more than n complete runs; runs have
  // length at most 2, so 2n + 2 letters suffice.
  const Substitution tm(bin, bin, {{0, 1}, {1, 0}});
  const Word t = fixed_point_prefix(tm, 0, 2 * n + 2);
  std::vector<Letter> runs;
  std::size_t i = 0;
  while (runs.size() < n) {
    std::size_t j = i;
    while (j < t.size() && t[j] == t[i]) ++j;
    if (j == t.size()) return false;  // incomplete run
    runs.push_back(static_cast<Letter>(j - i - 1));
    i = j;
  }
  const Substitution s(bin, bin, {bin->parse_word("010"), bin->parse_word("01110")});
  if (fixed_point_prefix(s, 0, n) != runs) return false;

  const Substitution g(bin, bin, {bin->parse_word("0"), bin->parse_word("101101")});
  return g.apply(bin->parse_word("10")) == bin->parse_word("10 110 10");
}

}  // namespace qrot
