#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "prequant/errors.hpp"
#include "prequant/integer_lattice.hpp"

namespace prequant {

/// One letter of a group word: generator index with exponent +1 or -1.
struct Letter {
  size_t gen = 0;
  int exp = 1;

  friend bool operator==(const Letter&, const Letter&) = default;
};

using Word = std::vector<Letter>;

inline Word inverse_word(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    out.push_back({it->gen, -it->exp});
  return out;
}

inline Word free_reduce(Word w) {
  Word out;
  for (const auto& l : w) {
    if (!out.empty() && out.back().gen == l.gen && out.back().exp == -l.exp)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

enum class GroupKind { trivial, free_abelian, free_group, surface };

inline const char* group_kind_name(GroupKind k) {
  switch (k) {
    case GroupKind::trivial: return "Trivial";
    case GroupKind::free_abelian: return "FreeAbelian";
    case GroupKind::free_group: return "Free";
    case GroupKind::surface: return "Surface";
  }
  return "?";
}

/// Finite presentation of the fundamental group, restricted to the families
/// the engine can decide words in: trivial, free abelian, free, and
/// hyperbolic surface groups (genus >= 2, one relator, Dehn's algorithm).
class Presentation {
public:
  static Presentation trivial() {
    Presentation p;
    p.kind_ = GroupKind::trivial;
    return p;
  }

  static Presentation free_abelian(std::vector<std::string> generators) {
    Presentation p;
    p.kind_ = GroupKind::free_abelian;
    p.gens_ = std::move(generators);
    require(!p.gens_.empty(), errc::invalid_argument, "rank zero: use trivial");
    // Defining relations: all pairwise commutators.
    for (size_t i = 0; i < p.gens_.size(); ++i)
      for (size_t j = i + 1; j < p.gens_.size(); ++j)
        p.relations_.push_back({{i, 1}, {j, 1}, {i, -1}, {j, -1}});
    return p;
  }

  static Presentation free_group(std::vector<std::string> generators) {
    Presentation p;
    p.kind_ = GroupKind::free_group;
    p.gens_ = std::move(generators);
    require(!p.gens_.empty(), errc::invalid_argument, "rank zero: use trivial");
    return p;
  }

  /// Surface group of the given genus with the standard single relator
  /// [a1,b1]...[ag,bg]. Generator names default to a1,b1,...,ag,bg.
  static Presentation surface(size_t genus,
                              std::vector<std::string> generators = {}) {
    require(genus >= 2, errc::invalid_argument,
            "surface presentations need genus >= 2 (use FreeAbelian for 1)");
    Presentation p;
    p.kind_ = GroupKind::surface;
    p.genus_ = genus;
    if (generators.empty()) {
      for (size_t i = 1; i <= genus; ++i) {
        generators.push_back("a" + std::to_string(i));
        generators.push_back("b" + std::to_string(i));
      }
    }
    require(generators.size() == 2 * genus, errc::invalid_argument,
            "surface genus g needs 2g generators");
    p.gens_ = std::move(generators);
    Word rel;
    for (size_t i = 0; i < genus; ++i) {
      const size_t a = 2 * i, b = 2 * i + 1;
      rel.push_back({a, 1});
      rel.push_back({b, 1});
      rel.push_back({a, -1});
      rel.push_back({b, -1});
    }
    p.relations_.push_back(std::move(rel));
    return p;
  }

  GroupKind kind() const { return kind_; }
  size_t rank() const { return gens_.size(); }
  size_t genus() const { return genus_; }
  const std::vector<std::string>& generators() const { return gens_; }
  const std::vector<Word>& relations() const { return relations_; }

  size_t generator_index(const std::string& name) const {
    for (size_t i = 0; i < gens_.size(); ++i)
      if (gens_[i] == name) return i;
    raise(errc::schema_error, "unknown generator '" + name + "'");
  }

  /// Parses a space-separated word such as "A B A^-1 B^2".
  Word parse_word(const std::string& text) const {
    Word out;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
      long exp = 1;
      std::string name = tok;
      auto caret = tok.find('^');
      if (caret != std::string::npos) {
        name = tok.substr(0, caret);
        try {
          exp = std::stol(tok.substr(caret + 1));
        } catch (const std::exception&) {
          raise(errc::parse_error, "bad exponent in '" + tok + "'");
        }
      }
      const size_t g = generator_index(name);
      const int sign = exp < 0 ? -1 : 1;
      for (long i = 0; i < std::labs(exp); ++i) out.push_back({g, sign});
    }
    return out;
  }

  std::string format_word(const Word& w) const {
    if (w.empty()) return "1";
    std::ostringstream os;
    size_t i = 0;
    while (i < w.size()) {
      size_t j = i;
      while (j < w.size() && w[j] == w[i]) ++j;
      if (i) os << " ";
      os << gens_[w[i].gen];
      const long e = static_cast<long>(j - i) * w[i].exp;
      if (e != 1) os << "^" << e;
      i = j;
    }
    return os.str();
  }

  /// Exponent-sum vector (image in the abelianization).
  std::vector<long> abelianize(const Word& w) const {
    std::vector<long> e(gens_.size(), 0);
    for (const auto& l : w) e[l.gen] += l.exp;
    return e;
  }

  /// Abelianization as an invariant-factor descriptor input: free rank and
  /// torsion factors of Z^gens / <relation exponent vectors>.
  void abelianization(long& free_rank, std::vector<mpz_class>& torsion) const {
    torsion.clear();
    if (gens_.empty()) {
      free_rank = 0;
      return;
    }
    if (relations_.empty()) {
      free_rank = static_cast<long>(gens_.size());
      return;
    }
    ZMat rel;
    for (const auto& w : relations_) {
      ZRow row;
      for (long e : abelianize(w)) row.push_back(e);
      rel.push_back(std::move(row));
    }
    auto inv = smith_invariant_factors(std::move(rel));
    free_rank = static_cast<long>(gens_.size()) - static_cast<long>(inv.size());
    for (const auto& d : inv)
      if (d > 1) torsion.push_back(d);
  }

private:
  GroupKind kind_ = GroupKind::trivial;
  size_t genus_ = 0;
  std::vector<std::string> gens_;
  std::vector<Word> relations_;
};

namespace detail {

/// One pass of Dehn reduction against the cyclic rotations of the relator
/// and its inverse: any subword strictly longer than half the relator is
/// replaced by the inverse of the complementary piece. Returns true if a
/// replacement happened.
inline bool dehn_step(Word& w, const Word& relator) {
  const size_t R = relator.size();
  const size_t half = R / 2;
  std::vector<Word> rotations;
  for (int side = 0; side < 2; ++side) {
    Word r = side == 0 ? relator : inverse_word(relator);
    for (size_t s = 0; s < R; ++s) {
      Word rot(r.begin() + static_cast<long>(s), r.end());
      rot.insert(rot.end(), r.begin(), r.begin() + static_cast<long>(s));
      rotations.push_back(std::move(rot));
    }
  }
  for (size_t len = w.size() < R ? w.size() : R; len > half; --len) {
    for (size_t at = 0; at + len <= w.size(); ++at) {
      for (const auto& rot : rotations) {
        if (!std::equal(w.begin() + static_cast<long>(at),
                        w.begin() + static_cast<long>(at + len), rot.begin()))
          continue;
        // w = u * rot[0:len] * v and rot[0:len] = inverse(rot[len:R])
        Word repl = inverse_word(
            Word(rot.begin() + static_cast<long>(len), rot.end()));
        Word out(w.begin(), w.begin() + static_cast<long>(at));
        out.insert(out.end(), repl.begin(), repl.end());
        out.insert(out.end(), w.begin() + static_cast<long>(at + len),
                   w.end());
        w = free_reduce(std::move(out));
        return true;
      }
    }
  }
  return false;
}

}  // namespace detail

/// Group element in a canonical normal form decided by the presentation
/// kind: exponent vector (free abelian), freely reduced word (free),
/// Dehn-reduced word (surface). Equality of normal forms is equality in
/// the group for these families.
class GroupElement {
public:
  GroupElement() = default;

  static GroupElement identity(const Presentation& p) {
    GroupElement e;
    e.pres_ = &p;
    e.exps_.assign(p.rank(), 0);
    return e;
  }

  static GroupElement from_word(const Presentation& p, const Word& w) {
    for (const auto& l : w)
      require(l.gen < p.rank() && (l.exp == 1 || l.exp == -1),
              errc::invalid_argument, "letter out of range");
    GroupElement e = identity(p);
    switch (p.kind()) {
      case GroupKind::trivial:
        require(w.empty() || free_reduce(w).empty(), errc::invalid_argument,
                "nonempty word in the trivial group");
        break;
      case GroupKind::free_abelian:
        for (const auto& l : w) e.exps_[l.gen] += l.exp;
        break;
      case GroupKind::free_group:
        e.word_ = free_reduce(w);
        break;
      case GroupKind::surface: {
        e.word_ = free_reduce(w);
        const Word& rel = p.relations().front();
        bool again = true;
        while (again && !e.word_.empty())
          again = detail::dehn_step(e.word_, rel);
        break;
      }
    }
    return e;
  }

  static GroupElement from_exponents(const Presentation& p,
                                     std::vector<long> exps) {
    require(p.kind() == GroupKind::free_abelian ||
                (p.kind() == GroupKind::trivial && exps.empty()),
            errc::invalid_argument, "exponent form needs a free abelian group");
    require(exps.size() == p.rank(), errc::invalid_argument,
            "exponent count mismatch");
    GroupElement e = identity(p);
    e.exps_ = std::move(exps);
    return e;
  }

  const Presentation& presentation() const { return *pres_; }

  bool is_identity() const {
    if (pres_->kind() == GroupKind::free_abelian)
      return std::all_of(exps_.begin(), exps_.end(),
                         [](long x) { return x == 0; });
    return word_.empty();
  }

  const std::vector<long>& exponents() const {
    require(pres_->kind() == GroupKind::free_abelian ||
                pres_->kind() == GroupKind::trivial,
            errc::invalid_argument, "exponent form needs a free abelian group");
    return exps_;
  }

  /// A canonical word spelling the element (used for table keys, basis
  /// loop construction, and display).
  Word word() const {
    if (pres_->kind() != GroupKind::free_abelian) return word_;
    Word w;
    for (size_t g = 0; g < exps_.size(); ++g) {
      const int sign = exps_[g] < 0 ? -1 : 1;
      for (long i = 0; i < std::labs(exps_[g]); ++i)
        w.push_back({g, sign});
    }
    return w;
  }

  std::vector<long> abelianized() const {
    if (pres_->kind() == GroupKind::free_abelian) return exps_;
    return pres_->abelianize(word_);
  }

  std::string key() const { return pres_->format_word(word()); }

  friend GroupElement operator*(const GroupElement& x, const GroupElement& y) {
    require(x.pres_ == y.pres_, errc::invalid_argument,
            "elements of different presentations");
    if (x.pres_->kind() == GroupKind::free_abelian) {
      GroupElement e = identity(*x.pres_);
      for (size_t i = 0; i < e.exps_.size(); ++i)
        e.exps_[i] = x.exps_[i] + y.exps_[i];
      return e;
    }
    Word w = x.word_;
    w.insert(w.end(), y.word_.begin(), y.word_.end());
    return from_word(*x.pres_, w);
  }

  GroupElement inverse() const {
    if (pres_->kind() == GroupKind::free_abelian) {
      GroupElement e = identity(*pres_);
      for (size_t i = 0; i < exps_.size(); ++i) e.exps_[i] = -exps_[i];
      return e;
    }
    return from_word(*pres_, inverse_word(word_));
  }

  friend bool operator==(const GroupElement& x, const GroupElement& y) {
    require(x.pres_ == y.pres_, errc::invalid_argument,
            "elements of different presentations");
    if (x.pres_->kind() == GroupKind::free_abelian) return x.exps_ == y.exps_;
    return x.word_ == y.word_;
  }

  friend bool operator!=(const GroupElement& x, const GroupElement& y) {
    return !(x == y);
  }

private:
  const Presentation* pres_ = nullptr;
  std::vector<long> exps_;  // free abelian normal form
  Word word_;               // free / surface normal form
};

}  // namespace prequant
