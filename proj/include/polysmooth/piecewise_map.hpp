#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "polysmooth/complex.hpp"
#include "polysmooth/simplicial_map.hpp"

namespace polysmooth {

/// Real polynomial in the ambient coordinates, exact rational coefficients.
class Polynomial {
 public:
  struct Term {
    std::vector<int> exponents;
    Rational coefficient;
  };

  Polynomial() = default;
  Polynomial(std::size_t variables, std::vector<Term> terms);
  static Polynomial constant(std::size_t variables, const Rational& c);
  /// sum_i a_i x_i + b
  static Polynomial affine(std::span<const Rational> a, const Rational& b);

  std::size_t variables() const { return variables_; }
  const std::vector<Term>& terms() const { return terms_; }
  int degree() const;

  Rational operator()(const Point& x) const;
  double operator()(std::span<const double> x) const;
  Polynomial derivative(std::size_t variable) const;

 private:
  void normalize();
  std::size_t variables_ = 0;
  std::vector<Term> terms_;
};

/// Map on |K| given per maximal simplex, continuous across shared faces.
/// Pieces are affine (PL maps), polynomial, or an opaque evaluator with a
/// modulus of continuity.
class PiecewiseMap {
 public:
  enum class Kind { PL, Polynomial, Opaque };
  using FloatEval = std::function<std::vector<double>(std::span<const double>)>;
  using Modulus = std::function<double(double)>;

  static PiecewiseMap from_pl(PLMap g);
  /// pieces[i] are the target components on the i-th maximal simplex.
  /// Throws Error(DimensionMismatch), Error(BadGluing) when pieces disagree on
  /// a shared face.
  static PiecewiseMap polynomial(ComplexPtr k, std::vector<std::vector<Polynomial>> pieces, int declared_class);
  /// Opaque evaluator; modulus omega (may be empty) drives the choice of delta.
  static PiecewiseMap opaque(ComplexPtr k, std::size_t target_dim, FloatEval evaluator, Modulus modulus = {},
                             std::optional<Rational> lipschitz = std::nullopt);

  Kind kind() const { return kind_; }
  const ComplexPtr& source() const { return source_; }
  std::size_t target_dim() const { return target_dim_; }
  /// Smoothness class of the pieces (infinite for PL/polynomial reported as -1).
  int declared_class() const { return declared_class_; }
  const PLMap* as_pl() const { return pl_ ? &*pl_ : nullptr; }
  const std::vector<std::vector<Polynomial>>& pieces() const { return pieces_; }

  /// Exact evaluation (PL and polynomial kinds). Throws Error(NotInComplex),
  /// Error(EvaluationFailure) for opaque maps.
  Point operator()(const Point& x) const;
  /// Float evaluation on |K| (tolerant location).
  std::vector<double> operator()(std::span<const double> x) const;
  /// Evaluates the piece of the given maximal simplex (index into
  /// maximal_simplices()) at x, extending it beyond the simplex if needed.
  std::vector<double> on_piece(std::size_t maximal_index, std::span<const double> x) const;

  /// Upper bound on the Lipschitz constant of each piece (hence on |K|
  /// along segments inside a closed simplex). nullopt for opaque maps
  /// without a declared constant.
  std::optional<Rational> lipschitz_bound() const;
  /// Largest d with modulus(d) < eta; falls back to eta / Lip. Throws
  /// Error(ModulusUnavailable).
  double continuity_radius(double eta) const;
  bool has_modulus() const;

 private:
  Kind kind_ = Kind::PL;
  ComplexPtr source_;
  std::size_t target_dim_ = 0;
  int declared_class_ = -1;
  std::optional<PLMap> pl_;
  std::vector<std::vector<Polynomial>> pieces_;
  FloatEval opaque_;
  Modulus modulus_;
  std::optional<Rational> lipschitz_;
};

/// Exact check that polynomial pieces agree on every shared face, by
/// comparing on a unisolvent lattice of each face.
bool pieces_agree_on_faces(const SimplicialComplex& k, const std::vector<std::vector<Polynomial>>& pieces);

}  // namespace polysmooth
