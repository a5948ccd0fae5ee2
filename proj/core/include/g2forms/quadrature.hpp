#pragma once

#include <functional>
#include <optional>
#include <string>

#include "g2forms/form_field.hpp"
#include "g2forms/gauss_rules.hpp"
#include "g2forms/rational.hpp"

namespace g2f {

/// Integration domain: euclidean ball, axis box, or flat torus.
struct Domain7 {
  enum class Kind { Ball, Box, Torus } kind = Kind::Ball;
  EVec7 center = EVec7::Zero();   // ball
  double radius = 1.0;            // ball
  EVec7 corner = EVec7::Zero();   // box
  EVec7 lengths = EVec7::Ones();  // box
  EVec7 periods = EVec7::Ones();  // torus

  static Domain7 ball(double r, EVec7 c = EVec7::Zero());
  static Domain7 box(EVec7 corner, EVec7 lengths);
  static Domain7 torus(EVec7 periods);
  double volume() const;
  std::string str() const;
};

/// Closed-form volume of the unit 7-ball (16 pi^3 / 105) and area of S^6.
double unit_ball_volume7();
double sphere_area6();

enum class QuadMethod { MomentReduction, MonteCarlo, Radial1D };

QuadMethod quad_method_from_string(const std::string& s);
std::string quad_method_name(QuadMethod m);

struct QuadratureSpec {
  QuadMethod method = QuadMethod::MomentReduction;
  long samples = 1000000;   // monte carlo
  uint64_t seed = 20240801; // monte carlo
  int nodes = 64;           // radial nodes for radial-1d
  int sphere_degree = 9;    // sphere cubature exactness for radial-1d
  double tolerance = 1e-10; // relative, for the 1d adaptive pieces
};

struct IntegralResult {
  double value = 0;
  double error = 0;  // standard error (MC) or accumulated estimate
  long evals = 0;
};

/// Exact angular moment of a monomial over S^6: rational multiple of pi^3.
/// Zero whenever any exponent is odd.
struct AngularMoment {
  Rat rational;  // moment = rational * pi^3
  double value() const { return rational.to_double() * M_PI * M_PI * M_PI; }
};
AngularMoment angular_moment(const Monomial& exponents);

/// Scalar integration over a domain.
IntegralResult integrate(const Domain7& D, const std::function<double(const EVec7&)>& f,
                         const QuadratureSpec& spec);

/// Moment-reduction path: exact in the angular variables, adaptive radially.
/// Ball domains only; the structured terms live in coordinates centered at
/// `center` which must coincide with the ball's center.
IntegralResult integrate_structured(const Domain7& D, const StructuredScalar& s,
                                    const EVec7& center, const QuadratureSpec& spec);

/// Fixed-topology pairwise tree sum; the value is independent of chunking and
/// thread count by construction.
double tree_sum(const std::vector<double>& v);

}  // namespace g2f
