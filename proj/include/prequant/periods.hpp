#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "prequant/errors.hpp"
#include "prequant/exact.hpp"
#include "prequant/integer_lattice.hpp"

namespace prequant {

/// Finitely generated subgroup of (R, +) whose generators are exact values
/// over one symbol registry. Internally the group is a Z-lattice in the
/// rational coefficient space: denominators are cleared by one common
/// multiple and the integer rows are kept in Hermite normal form, so
/// membership and reduction are exact.
class PeriodGroup {
public:
  PeriodGroup(SymbolTablePtr table, std::vector<ExactReal> generators)
      : table_(std::move(table)), generators_(std::move(generators)) {
    dim_ = 1;
    for (const auto& g : generators_) {
      require(!g.has_table() || g.table() == table_, errc::basis_mismatch,
              "generator over a different registry");
      dim_ = std::max(dim_, g.coefficient_count());
    }
    den_ = 1;
    for (const auto& g : generators_)
      for (size_t i = 0; i < g.coefficient_count(); ++i)
        mpz_lcm(den_.get_mpz_t(), den_.get_mpz_t(),
                g.coefficient(i).get_den().get_mpz_t());
    ZMat rows;
    for (const auto& g : generators_) {
      if (g.is_zero()) continue;
      ZRow row(dim_, mpz_class(0));
      for (size_t i = 0; i < g.coefficient_count(); ++i) {
        mpq_class scaled = g.coefficient(i) * mpq_class(den_);
        row[i] = scaled.get_num();  // integral by construction of den_
      }
      rows.push_back(std::move(row));
    }
    hnf_ = hermite_normal_form(std::move(rows));
    // Rows used for reduction are sign-fixed so each pivot direction has a
    // positive float value; the span is unchanged.
    reduce_rows_ = hnf_;
    for (auto& row : reduce_rows_)
      if (row_value(row) < 0.0)
        for (auto& v : row) v = -v;
  }

  const SymbolTablePtr& table() const { return table_; }
  const std::vector<ExactReal>& generators() const { return generators_; }

  size_t rank() const { return hnf_.size(); }
  bool is_trivial() const { return hnf_.empty(); }

  /// A rank <= 1 subgroup of R is discrete; rank >= 2 combinations of
  /// rationally independent values are dense.
  bool is_discrete() const { return rank() <= 1; }

  /// For rank 1: the positive generator g with P = gZ. Empty otherwise.
  std::optional<ExactReal> canonical_generator() const {
    if (rank() != 1) return std::nullopt;
    return row_to_exact(reduce_rows_[0]);
  }

  bool contains(const ExactReal& x) const {
    if (x.has_table() && x.table() != table_)
      raise(errc::basis_mismatch, "membership over a different registry");
    if (x.is_zero()) return true;
    if (x.coefficient_count() > dim_) {
      for (size_t i = dim_; i < x.coefficient_count(); ++i)
        if (x.coefficient(i) != 0) return false;
    }
    ZRow v(dim_, mpz_class(0));
    for (size_t i = 0; i < std::min(x.coefficient_count(), dim_); ++i) {
      mpq_class scaled = x.coefficient(i) * mpq_class(den_);
      if (scaled.get_den() != 1) return false;
      v[i] = scaled.get_num();
    }
    return in_z_span(hnf_, std::move(v));
  }

  /// Canonical representative of x + P in coefficient space: pivot
  /// coordinates are reduced into [0, pivot) against the sign-fixed rows.
  /// For a discrete rank-1 group with positive generator g this lands a
  /// commensurate x in [0, g); incommensurate coordinates pass through.
  ExactReal reduce(const ExactReal& x) const {
    if (x.has_table() && x.table() != table_)
      raise(errc::basis_mismatch, "reduction over a different registry");
    if (hnf_.empty()) return x;
    mpz_class big_den = den_;
    for (size_t i = 0; i < x.coefficient_count(); ++i)
      mpz_lcm(big_den.get_mpz_t(), big_den.get_mpz_t(),
              x.coefficient(i).get_den().get_mpz_t());
    const size_t n = std::max(dim_, x.coefficient_count());
    ZRow v(n, mpz_class(0));
    for (size_t i = 0; i < x.coefficient_count(); ++i) {
      mpq_class scaled = x.coefficient(i) * mpq_class(big_den);
      v[i] = scaled.get_num();
    }
    mpz_class lift = big_den / den_;
    for (const auto& row : reduce_rows_) {
      size_t c = 0;
      while (c < row.size() && row[c] == 0) ++c;
      if (c == row.size()) continue;
      mpz_class pivot = row[c] * lift;
      mpz_class q;
      mpz_fdiv_q(q.get_mpz_t(), v[c].get_mpz_t(), pivot.get_mpz_t());
      for (size_t k = 0; k < row.size(); ++k) v[k] -= q * row[k] * lift;
    }
    ExactReal out(table_);
    for (size_t i = 0; i < n; ++i) {
      if (v[i] == 0) continue;
      mpq_class c(v[i]);
      c /= mpq_class(big_den);
      c.canonicalize();
      out += ExactReal::symbol(table_, i) * c;
    }
    return out;
  }

  /// Float-level distance from v to the nearest group element. Only
  /// meaningful for rank <= 1 (dense groups make it vacuous); rank >= 2
  /// returns |v| unchanged and callers should rely on exact membership.
  double float_distance(double v) const {
    if (hnf_.empty()) return std::abs(v);
    if (rank() == 1) {
      double g = std::abs(row_to_exact(reduce_rows_[0]).value());
      if (g <= 0.0) return std::abs(v);
      double r = std::remainder(v, g);
      return std::abs(r);
    }
    return std::abs(v);
  }

  std::string describe() const {
    if (is_trivial()) return "{0}";
    if (rank() == 1) {
      auto g = canonical_generator();
      return "(" + g->to_string() + ")Z";
    }
    std::ostringstream os;
    os << "rank-" << rank() << " (non-discrete): <";
    for (size_t i = 0; i < reduce_rows_.size(); ++i) {
      if (i) os << ", ";
      os << row_to_exact(reduce_rows_[i]).to_string();
    }
    os << ">";
    return os.str();
  }

  std::string describe_torus() const {
    if (is_trivial()) return "R";
    if (rank() == 1) return "R/(" + canonical_generator()->to_string() + ")Z";
    return "R/" + describe() + " (non-Hausdorff)";
  }

private:
  ExactReal row_to_exact(const ZRow& row) const {
    ExactReal out(table_);
    for (size_t i = 0; i < row.size(); ++i) {
      if (row[i] == 0) continue;
      mpq_class c(row[i]);
      c /= mpq_class(den_);
      c.canonicalize();
      out += ExactReal::symbol(table_, i) * c;
    }
    return out;
  }

  double row_value(const ZRow& row) const {
    double acc = 0.0;
    for (size_t i = 0; i < row.size(); ++i)
      acc += mpq_class(mpq_class(row[i]) / mpq_class(den_)).get_d() *
             table_->symbol(i).approx;
    return acc;
  }

  SymbolTablePtr table_;
  std::vector<ExactReal> generators_;
  size_t dim_ = 1;
  mpz_class den_ = 1;
  ZMat hnf_;
  ZMat reduce_rows_;
};

using PeriodGroupPtr = std::shared_ptr<const PeriodGroup>;

inline PeriodGroupPtr generate(SymbolTablePtr table,
                               std::vector<ExactReal> generators) {
  return std::make_shared<PeriodGroup>(std::move(table),
                                       std::move(generators));
}

/// Element of the quotient torus R/P for one period group P. The stored
/// representative is kept as constructed (arithmetic does not canonicalize;
/// call reduce() for the canonical representative). Equality is exact:
/// the difference of representatives must belong to P.
class TorusElement {
public:
  TorusElement() = default;

  TorusElement(PeriodGroupPtr group, ExactReal representative)
      : group_(std::move(group)), rep_(std::move(representative)) {
    require(!rep_.has_table() || rep_.table() == group_->table(),
            errc::basis_mismatch, "representative over a different registry");
  }

  static TorusElement zero(PeriodGroupPtr group) {
    ExactReal z(group->table());
    return TorusElement(std::move(group), std::move(z));
  }

  const PeriodGroupPtr& group() const { return group_; }
  const ExactReal& representative() const { return rep_; }
  double float_representative() const { return rep_.value(); }

  TorusElement reduce() const {
    return TorusElement(group_, group_->reduce(rep_));
  }

  /// Reinterprets the representative modulo a larger group. Valid when
  /// target contains this group's periods (quotient map R/P -> R/P').
  TorusElement rebase(PeriodGroupPtr target) const {
    return TorusElement(std::move(target), rep_);
  }

  bool is_zero() const { return group_->contains(rep_); }

  TorusElement operator-() const { return TorusElement(group_, -rep_); }

  TorusElement& operator+=(const TorusElement& o) {
    require(group_ == o.group_, errc::invalid_argument,
            "torus elements over different period groups");
    rep_ += o.rep_;
    return *this;
  }

  TorusElement& operator-=(const TorusElement& o) { return *this += -o; }

  friend TorusElement operator+(TorusElement a, const TorusElement& b) {
    return a += b;
  }
  friend TorusElement operator-(TorusElement a, const TorusElement& b) {
    return a -= b;
  }

  friend TorusElement operator*(long n, const TorusElement& a) {
    return TorusElement(a.group_, a.rep_ * mpq_class(n));
  }

  bool equals(const TorusElement& o) const {
    require(group_ == o.group_, errc::invalid_argument,
            "torus elements over different period groups");
    return group_->contains(rep_ - o.rep_);
  }

  /// Circular float distance to another element (group rank <= 1 exact
  /// wraparound; dense groups compare representatives directly).
  double float_distance(const TorusElement& o) const {
    return group_->float_distance(rep_.value() - o.rep_.value());
  }

  std::string to_string() const {
    return rep_.to_string() + " mod " + group_->describe();
  }

private:
  PeriodGroupPtr group_;
  ExactReal rep_;
};

/// Total group of periods: the toric periods together with representatives
/// of the accumulated relation values.
inline PeriodGroupPtr total_periods(const PeriodGroupPtr& toric,
                                    const std::vector<TorusElement>& values) {
  std::vector<ExactReal> gens = toric->generators();
  for (const auto& v : values) {
    require(v.group() == toric || v.group()->table() == toric->table(),
            errc::basis_mismatch, "relation value over a different registry");
    gens.push_back(v.representative());
  }
  return generate(toric->table(), std::move(gens));
}

/// Finitely generated abelian group in invariant-factor form:
/// Z^free_rank + sum of Z/d_i with d_1 | d_2 | ...
struct AbelianGroupDescriptor {
  long free_rank = 0;
  std::vector<mpz_class> torsion;

  bool is_trivial() const { return free_rank == 0 && torsion.empty(); }

  std::string to_string() const {
    if (is_trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    if (free_rank > 0) {
      os << "Z";
      if (free_rank > 1) os << "^" << free_rank;
      first = false;
    }
    for (const auto& d : torsion) {
      if (!first) os << " + ";
      os << "Z/" << d.get_str();
      first = false;
    }
    return os.str();
  }
};

/// Group of the form T^k + torsion, where T = R/P is the period torus.
struct CharacterGroupDescriptor {
  long torus_rank = 0;
  std::vector<mpz_class> torsion;

  bool is_trivial() const { return torus_rank == 0 && torsion.empty(); }

  std::string to_string() const {
    if (is_trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    if (torus_rank > 0) {
      os << "T_omega";
      if (torus_rank > 1) os << "^" << torus_rank;
      first = false;
    }
    for (const auto& d : torsion) {
      if (!first) os << " + ";
      os << "Z/" << d.get_str();
      first = false;
    }
    return os.str();
  }
};

/// Extensions of Z^r + sum Z/d_i by a discrete period group P of rank k:
/// the free part contributes nothing and each Z/d contributes (Z/d)^k.
/// (d-torsion of R/P is (Z/d)^rank: divide each lattice generator by d.)
inline AbelianGroupDescriptor moduli_ext(long free_rank,
                                         const std::vector<mpz_class>& torsion,
                                         const PeriodGroup& periods) {
  require(free_rank >= 0, errc::invalid_argument, "negative free rank");
  (void)free_rank;  // Ext(Z^r, P) = 0
  AbelianGroupDescriptor out;
  const long k = static_cast<long>(periods.rank());
  for (const auto& d : torsion) {
    require(d > 1, errc::invalid_argument,
            "torsion invariant factors must exceed 1");
    for (long i = 0; i < k; ++i) out.torsion.push_back(d);
  }
  // Input factors are in divisibility order; k-fold repetition keeps it.
  return out;
}

/// Characters (first cohomology with T = R/P coefficients) of a group with
/// abelianization Z^r + sum Z/d_i: Hom(Z^r, T) = T^r and Hom(Z/d, T) is the
/// d-torsion of T, which for discrete P of rank k is (Z/d)^k.
inline CharacterGroupDescriptor characters_h1(
    long free_rank, const std::vector<mpz_class>& torsion,
    const PeriodGroup& periods) {
  require(free_rank >= 0, errc::invalid_argument, "negative free rank");
  CharacterGroupDescriptor out;
  out.torus_rank = free_rank;
  const long k = static_cast<long>(periods.rank());
  for (const auto& d : torsion) {
    require(d > 1, errc::invalid_argument,
            "torsion invariant factors must exceed 1");
    for (long i = 0; i < k; ++i) out.torsion.push_back(d);
  }
  return out;
}

}  // namespace prequant
