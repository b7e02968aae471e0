// Finite monoids with involution given by tables, constraint morphisms, and
// the constructions used by the reductions: the forbidden-factor monoid,
// direct products and the dual product N x N^T.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tracesolve/alphabet.hpp"

namespace ts {

class FiniteMonoid {
 public:
  FiniteMonoid() = default;
  FiniteMonoid(int size, std::vector<int> mult, std::vector<int> inv, int unit,
               std::optional<int> zero = std::nullopt);

  static FiniteMonoid trivial();

  int size() const { return n_; }
  int mul(int x, int y) const { return mult_[static_cast<std::size_t>(x) * n_ + y]; }
  int inv(int x) const { return inv_[static_cast<std::size_t>(x)]; }
  int unit() const { return unit_; }
  std::optional<int> zero() const { return zero_; }
  bool is_zero(int x) const { return zero_ && *zero_ == x; }
  // Product elements whose component in a factor with a zero is that zero.
  bool is_zero_like(int x) const;

  // Checks associativity (exhaustively up to 256 elements), the unit, the
  // zero and the involution laws. Throws Error with a witness on failure.
  void validate() const;

  const std::vector<std::string>& names() const { return names_; }
  void set_names(std::vector<std::string> n) { names_ = std::move(n); }
  std::string name(int x) const;

  // Factor bookkeeping for products: component sizes and zero flags.
  const std::vector<int>& factor_sizes() const { return factor_sizes_; }
  const std::vector<std::optional<int>>& factor_zeros() const { return factor_zeros_; }
  int component(int x, std::size_t factor) const;

  friend FiniteMonoid product_monoid(const FiniteMonoid& a, const FiniteMonoid& b);

 private:
  int n_ = 0;
  std::vector<int> mult_;
  std::vector<int> inv_;
  int unit_ = 0;
  std::optional<int> zero_;
  std::vector<std::string> names_;
  std::vector<int> factor_sizes_;
  std::vector<std::optional<int>> factor_zeros_;
};

// Componentwise product. The pair of zeros is the zero when both factors
// have one; otherwise pairs with a zero component are only zero-like.
FiniteMonoid product_monoid(const FiniteMonoid& a, const FiniteMonoid& b);

// N x N^T with (x,y^T)(x',y'^T) = (xx', (y'y)^T) and involution
// (x,y^T) -> (y,x^T). Elements are encoded as x * |N| + y.
FiniteMonoid dual_product(const FiniteMonoid& n, int budget = 1 << 16);

// Adjoins a fresh absorbing element; returns the new monoid, whose extra
// element is size()-1 and is the zero.
FiniteMonoid adjoin_zero(const FiniteMonoid& n);

// Restricts a monoid to the submonoid generated by gens (closed under the
// involution). Returns the submonoid and the map old id -> new id (-1 if
// not reached).
std::pair<FiniteMonoid, std::vector<int>> generated_submonoid(const FiniteMonoid& n,
                                                              const std::vector<int>& gens);

class ConstraintMorphism {
 public:
  ConstraintMorphism() = default;
  explicit ConstraintMorphism(std::shared_ptr<const FiniteMonoid> target)
      : target_(std::move(target)) {}

  const FiniteMonoid& target() const { return *target_; }
  std::shared_ptr<const FiniteMonoid> target_ptr() const { return target_; }
  bool has(Sym s) const {
    return s >= 0 && static_cast<std::size_t>(s) < image_.size() && image_[s] >= 0;
  }
  int image(Sym s) const;
  void set(Sym s, int e);
  void erase(Sym s);
  int eval(const Word& w) const;
  const std::vector<int>& images() const { return image_; }

  // image(bar x) = inv(image(x)) and images of independent symbols commute.
  void validate(const SymbolTable& t) const;

  bool operator==(const ConstraintMorphism& o) const {
    return target_ == o.target_ && image_ == o.image_;
  }

 private:
  std::shared_ptr<const FiniteMonoid> target_;
  std::vector<int> image_;
};

// The forbidden-factor monoid for reducedness over the given letters
// (closure from the generators, zero attached). Returns the monoid and the
// image of each letter (indexed by Sym, -1 for letters not in the list).
struct ReductionMonoid {
  FiniteMonoid monoid;
  std::vector<int> image;
};
ReductionMonoid build_reduction_monoid(const SymbolTable& t, const std::vector<Sym>& letters,
                                       int budget = 4096);

}  // namespace ts
