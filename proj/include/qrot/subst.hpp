#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qrot/qfield.hpp"

namespace qrot {

using Letter = int;
using Word = std::vector<Letter>;

/// Finite set of named letters; a letter is an index into the name list.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(Letter l) const { return names_.at(static_cast<std::size_t>(l)); }
  /// Throws ParseError for unknown names.
  Letter index(std::string_view name) const;
  bool contains(std::string_view name) const;

  /// Parses a word. Whitespace-separated tokens; inside a token each
  /// character is one letter, and "c^k" repeats letter c k times.
  Word parse_word(std::string_view text) const;
  std::string format(const Word& w) const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, Letter, std::less<>> index_;
};

using BigMatrix = std::vector<std::vector<BigInt>>;

BigMatrix mat_mul(const BigMatrix& a, const BigMatrix& b);
BigMatrix mat_identity(std::size_t n);
BigMatrix mat_pow(const BigMatrix& m, unsigned long n);
std::vector<BigInt> mat_apply(const BigMatrix& m, const std::vector<BigInt>& v);
/// Coefficients c0..cn of det(t I - M), lowest degree first.
std::vector<BigInt> char_poly(const BigMatrix& m);

/// Morphism from words over `source` to words over `target`.
class Substitution {
 public:
  Substitution(std::shared_ptr<const Alphabet> source, std::shared_ptr<const Alphabet> target,
               std::vector<Word> images);

  const Alphabet& source() const { return *source_; }
  const Alphabet& target() const { return *target_; }
  std::shared_ptr<const Alphabet> source_ptr() const { return source_; }
  std::shared_ptr<const Alphabet> target_ptr() const { return target_; }
  bool is_endomorphism() const { return source_ == target_; }

  const Word& image(Letter l) const { return images_.at(static_cast<std::size_t>(l)); }
  Word apply(const Word& w) const;
  /// sigma^n(w); requires an endomorphism.
  Word iterate(const Word& w, unsigned n) const;
  /// The letterwise reversal: each image read backwards.
  Substitution reversed() const;
  /// (*this)(inner(l)).
  Substitution after(const Substitution& inner) const;

  std::size_t max_image_length() const;

  /// M[l'][l] = number of l' in sigma(l).
  BigMatrix incidence() const;
  /// Counts of each letter in sigma^n(w).
  std::vector<BigInt> letter_counts(const Word& w, unsigned long n) const;
  std::vector<BigInt> letter_counts(Letter l, unsigned long n) const;
  BigInt length(Letter l, unsigned long n) const;
  /// Sum of weights over the letters of sigma^n(w).
  BigInt tau_length(const Word& w, unsigned long n, const std::vector<BigInt>& weights) const;
  BigInt tau_length(Letter l, unsigned long n, const std::vector<BigInt>& weights) const;

 private:
  std::shared_ptr<const Alphabet> source_;
  std::shared_ptr<const Alphabet> target_;
  std::vector<Word> images_;
};

/// Run lengths of the Thue-Morse word minus one against the fixed point of
/// 0 -> 010, 1 -> 01110, plus the golden-mean image identity
/// sigma(10) = (10)(110)(10) for 0 -> 0, 1 -> 101101. Checks n terms.
bool thue_morse_check(std::size_t n);

/// First n letters of the fixed point of an endomorphism starting with `seed`.
Word fixed_point_prefix(const Substitution& s, Letter seed, std::size_t n);

}  // namespace qrot
