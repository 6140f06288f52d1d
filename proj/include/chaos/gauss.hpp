#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chaos/tensor.hpp"

namespace chaos {

/// Probabilists' Hermite polynomial with leading coefficient 1, l <= 60.
double hermite(int l, double x);

/// Coefficients c[0..l] of H_l in the monomial basis.
std::vector<double> hermite_coefficients(int l);

/// Z = sum a(n) :xi_n1 ... xi_nk: compiled into products of Hermite
/// polynomials, one factor per distinct index with its multiplicity.
class ChaosPolynomial {
 public:
  explicit ChaosPolynomial(const CoefficientTensor& a);

  int order() const { return order_; }
  int dim() const { return dim_; }
  double operator()(std::span<const double> xs) const;

 private:
  struct Term {
    double coef;
    std::vector<std::pair<int, int>> factors;  // (index, multiplicity)
  };
  int order_;
  int dim_;
  std::vector<Term> terms_;
};

double evaluate_Z(const CoefficientTensor& a, std::span<const double> xs);

/// Real polynomial in n variables, keyed by exponent vectors.
class MonomialExpansion {
 public:
  using Exponents = std::vector<int>;

  explicit MonomialExpansion(int nvars);
  static MonomialExpansion constant(int nvars, double c);
  /// Wick polynomial Z of a coefficient tensor.
  static MonomialExpansion from_chaos(const CoefficientTensor& a);

  int nvars() const { return nvars_; }
  const std::map<Exponents, double>& terms() const { return terms_; }
  int degree() const;

  void add(const Exponents& e, double c);
  MonomialExpansion operator*(const MonomialExpansion& other) const;
  double operator()(std::span<const double> xs) const;
  /// E under independent standard normals: E xi^{2p} = (2p-1)!!, odd powers vanish.
  double gaussian_expectation() const;

 private:
  int nvars_;
  std::map<Exponents, double> terms_;
};

/// E Z^degree by expanding Z^degree into monomials. Limited to dim <= 4,
/// order <= 3 and degree * order <= 16.
double isserlis_moment(const CoefficientTensor& a, int degree);

/// Z evaluated at `count` independent standard normal vectors. Sample i
/// draws its coordinates from its own counter stream, so the output does not
/// depend on the number of workers.
std::vector<double> sample_Z(const CoefficientTensor& a, std::size_t count, std::uint64_t seed, int workers = 1);

struct TailRow {
  double x;
  double p_hat;    // fraction of samples with |Z| > x
  double ci_half;  // half-width of the 95% Wilson score interval
};

std::vector<TailRow> empirical_tail(std::span<const double> samples, std::span<const double> grid);

/// Grid "a:step:b" expanded inclusively.
std::vector<double> parse_grid(const std::string& text);

/// log P(xi > t) for a standard normal xi, accurate far into the tail.
double log_normal_tail(double t);

struct SharpnessRow {
  double x;
  double tail;      // P(|H_k(xi)| > x)
  double log_tail;
  double ratio;     // -log P / (x^{2/k} / 2)
};

/// Exact tail of |H_k(xi)| from the real roots of H_k(t) = +-x, k <= 5.
std::vector<SharpnessRow> sharpness_probe(int k, std::span<const double> grid);

/// Real roots of a polynomial (coefficients low to high), isolated with a
/// Sturm sequence and refined by bisection.
std::vector<double> real_roots(std::vector<double> coeffs);

}  // namespace chaos
