#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "prequant/errors.hpp"

namespace prequant {

inline mpq_class make_rational(long num, long den = 1) {
  require(den != 0, errc::invalid_argument, "rational with zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

/// Parses "p", "-p", or "p/q" into a canonical rational.
inline mpq_class parse_rational(const std::string& text) {
  mpq_class q;
  if (q.set_str(text, 10) != 0)
    raise(errc::parse_error, "not a rational literal: '" + text + "'");
  require(q.get_den() != 0, errc::parse_error,
          "zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

/// Registry of basis constants: named reals declared pairwise rationally
/// independent. Exact values are rational combinations of these symbols.
/// The registry is append-only and mutex guarded, so coefficient vectors
/// held by existing values never get invalidated by later additions.
class SymbolTable {
public:
  struct Symbol {
    std::string name;
    double approx = 0.0;
    bool independent = true;  // false for snapped-in numeric unknowns
  };

  SymbolTable() { symbols_.push_back({"one", 1.0, true}); }

  static std::shared_ptr<SymbolTable> create() {
    return std::make_shared<SymbolTable>();
  }

  size_t size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return symbols_.size();
  }

  Symbol symbol(size_t i) const {
    std::lock_guard<std::mutex> lock(mutex_);
    require(i < symbols_.size(), errc::invalid_argument, "symbol index");
    return symbols_[i];
  }

  std::optional<size_t> index_of(const std::string& name) const {
    std::lock_guard<std::mutex> lock(mutex_);
    for (size_t i = 0; i < symbols_.size(); ++i)
      if (symbols_[i].name == name) return i;
    return std::nullopt;
  }

  /// Declares a new independent constant. Name must be unused, the
  /// approximation finite and nonzero.
  size_t add(const std::string& name, double approx) {
    return add_impl(name, approx, true);
  }

  /// Admits an unexplained numeric value as a formal unknown. Returns the
  /// new index; the generated name is "num_<k>".
  size_t add_fresh(double approx) {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string name = "num_" + std::to_string(fresh_counter_++);
    while (find_locked(name)) name = "num_" + std::to_string(fresh_counter_++);
    symbols_.push_back({name, approx, false});
    return symbols_.size() - 1;
  }

  /// Brute-force integer-relation probe on the declared approximations.
  /// Returns warning strings for suspicious near-relations; never throws.
  /// Small coefficients only; this is a diagnostic, not a proof.
  std::vector<std::string> independence_warnings(int coeff_limit = 12) const {
    std::vector<Symbol> snapshot;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      snapshot = symbols_;
    }
    std::vector<std::string> warnings;
    for (size_t i = 1; i < snapshot.size(); ++i) {
      if (!snapshot[i].independent) continue;
      for (size_t j = i + 1; j < snapshot.size(); ++j) {
        if (!snapshot[j].independent) continue;
        double x = snapshot[i].approx, y = snapshot[j].approx;
        double scale = std::abs(x) + std::abs(y) + 1.0;
        for (int a = -coeff_limit; a <= coeff_limit; ++a)
          for (int b = -coeff_limit; b <= coeff_limit; ++b) {
            if (b == 0 && a == 0) continue;
            if (b == 0) continue;  // pure-integer term alone is no relation
            for (int c = -coeff_limit; c <= coeff_limit; ++c) {
              if (a == 0 && c == 0) continue;
              double r = a + b * x + c * y;
              if (std::abs(r) < 1e-9 * scale * coeff_limit) {
                std::ostringstream os;
                os << "near-relation " << a << " + " << b << "*"
                   << snapshot[i].name << " + " << c << "*" << snapshot[j].name
                   << " ~ 0: declared independence looks suspicious";
                warnings.push_back(os.str());
                goto next_pair;
              }
            }
          }
      next_pair:;
      }
    }
    return warnings;
  }

private:
  bool find_locked(const std::string& name) const {
    for (const auto& s : symbols_)
      if (s.name == name) return true;
    return false;
  }

  size_t add_impl(const std::string& name, double approx, bool independent) {
    require(std::isfinite(approx) && approx != 0.0, errc::invalid_argument,
            "symbol approximation must be finite and nonzero");
    std::lock_guard<std::mutex> lock(mutex_);
    require(!find_locked(name), errc::invalid_argument,
            "duplicate symbol '" + name + "'");
    symbols_.push_back({name, approx, independent});
    return symbols_.size() - 1;
  }

  mutable std::mutex mutex_;
  std::vector<Symbol> symbols_;
  uint64_t fresh_counter_ = 0;
};

using SymbolTablePtr = std::shared_ptr<SymbolTable>;

/// A real number represented exactly as a rational combination of the basis
/// constants of one SymbolTable. Coefficient 0 is the rational part (symbol
/// "one"). Arithmetic is exact; value() gives the float approximation.
class ExactReal {
public:
  ExactReal() = default;

  explicit ExactReal(SymbolTablePtr table) : table_(std::move(table)) {}

  ExactReal(SymbolTablePtr table, const mpq_class& rational)
      : table_(std::move(table)) {
    if (rational != 0) coeff_.push_back(rational);
  }

  static ExactReal symbol(SymbolTablePtr table, size_t index) {
    require(index < table->size(), errc::invalid_argument,
            "symbol index out of range");
    ExactReal x(std::move(table));
    x.coeff_.resize(index + 1, mpq_class(0));
    x.coeff_[index] = 1;
    return x;
  }

  static ExactReal symbol(const SymbolTablePtr& table,
                          const std::string& name) {
    auto idx = table->index_of(name);
    require(idx.has_value(), errc::invalid_argument,
            "unknown symbol '" + name + "'");
    return symbol(table, *idx);
  }

  const SymbolTablePtr& table() const { return table_; }
  bool has_table() const { return table_ != nullptr; }

  mpq_class coefficient(size_t i) const {
    return i < coeff_.size() ? coeff_[i] : mpq_class(0);
  }

  size_t coefficient_count() const { return coeff_.size(); }

  bool is_zero() const { return coeff_.empty(); }

  /// True when the value is a plain rational (only the "one" coordinate).
  bool is_rational() const { return coeff_.size() <= 1; }

  mpq_class rational_part() const { return coefficient(0); }

  double value() const {
    double acc = 0.0;
    for (size_t i = 0; i < coeff_.size(); ++i)
      acc += coeff_[i].get_d() * table_->symbol(i).approx;
    return acc;
  }

  ExactReal operator-() const {
    ExactReal r(*this);
    for (auto& c : r.coeff_) c = -c;
    return r;
  }

  ExactReal& operator+=(const ExactReal& o) {
    merge_tables(o);
    if (coeff_.size() < o.coeff_.size()) coeff_.resize(o.coeff_.size(), 0);
    for (size_t i = 0; i < o.coeff_.size(); ++i) coeff_[i] += o.coeff_[i];
    trim();
    return *this;
  }

  ExactReal& operator-=(const ExactReal& o) { return *this += -o; }

  ExactReal& operator*=(const mpq_class& s) {
    for (auto& c : coeff_) c *= s;
    trim();
    return *this;
  }

  friend ExactReal operator+(ExactReal a, const ExactReal& b) { return a += b; }
  friend ExactReal operator-(ExactReal a, const ExactReal& b) { return a -= b; }
  friend ExactReal operator*(ExactReal a, const mpq_class& s) { return a *= s; }
  friend ExactReal operator*(const mpq_class& s, ExactReal a) { return a *= s; }

  friend bool operator==(const ExactReal& a, const ExactReal& b) {
    if (a.table_ && b.table_ && a.table_ != b.table_)
      raise(errc::basis_mismatch, "comparing values over different registries");
    size_t n = std::max(a.coeff_.size(), b.coeff_.size());
    for (size_t i = 0; i < n; ++i)
      if (a.coefficient(i) != b.coefficient(i)) return false;
    return true;
  }

  friend bool operator!=(const ExactReal& a, const ExactReal& b) {
    return !(a == b);
  }

  std::string to_string() const {
    if (coeff_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < coeff_.size(); ++i) {
      if (coeff_[i] == 0) continue;
      mpq_class c = coeff_[i];
      if (!first) {
        os << (c < 0 ? " - " : " + ");
        if (c < 0) c = -c;
      } else if (c < 0 && i != 0) {
        // keep the sign attached for leading symbolic terms
      }
      if (i == 0) {
        os << c.get_str();
      } else {
        if (c == 1)
          ;
        else if (c == -1 && first)
          os << "-";
        else
          os << c.get_str() << "*";
        os << table_->symbol(i).name;
      }
      first = false;
    }
    return os.str();
  }

private:
  void merge_tables(const ExactReal& o) {
    if (!table_) table_ = o.table_;
    if (o.table_ && table_ != o.table_)
      raise(errc::basis_mismatch, "mixing values over different registries");
  }

  void trim() {
    while (!coeff_.empty() && coeff_.back() == 0) coeff_.pop_back();
  }

  SymbolTablePtr table_;
  std::vector<mpq_class> coeff_;
};

/// Parses a linear combination such as "3/2", "alpha", "-2*alpha + 1/3",
/// "alpha - beta". Terms are separated by +/-; each term is a rational, a
/// symbol name, or rational*name.
inline ExactReal parse_exact(const SymbolTablePtr& table,
                             const std::string& text) {
  ExactReal acc(table);
  size_t i = 0;
  const size_t n = text.size();
  auto skip_ws = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  require(i < n, errc::parse_error, "empty exact-value literal");
  bool first = true;
  while (i < n) {
    skip_ws();
    int sign = 1;
    if (i < n && (text[i] == '+' || text[i] == '-')) {
      require(!first || text[i] == '-', errc::parse_error,
              "leading '+' in '" + text + "'");
      sign = text[i] == '-' ? -1 : 1;
      ++i;
    } else {
      require(first, errc::parse_error, "missing operator in '" + text + "'");
    }
    skip_ws();
    size_t start = i;
    while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                     text[i] == '_' || text[i] == '/' || text[i] == '*'))
      ++i;
    std::string term = text.substr(start, i - start);
    require(!term.empty(), errc::parse_error, "dangling sign in '" + text + "'");
    mpq_class coeff(sign);
    std::string name;
    auto star = term.find('*');
    if (star != std::string::npos) {
      coeff *= parse_rational(term.substr(0, star));
      name = term.substr(star + 1);
    } else if (std::isdigit(static_cast<unsigned char>(term[0]))) {
      coeff *= parse_rational(term);
    } else {
      name = term;
    }
    if (name.empty()) {
      acc += ExactReal(table, coeff);
    } else {
      acc += ExactReal::symbol(table, name) * coeff;
    }
    first = false;
    skip_ws();
  }
  return acc;
}

}  // namespace prequant
