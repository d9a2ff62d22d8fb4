#pragma once

#include <vector>

namespace repsys {

enum class RenewalFamily { Exponential, Weibull, Gamma };

// Lifetime distribution with expected value 1, used as the renewal component F.
// Weibull carries shape s (scale fixed to 1/Gamma(1+1/s)); Gamma carries
// variance g (shape 1/g, scale g).
class RenewalDistribution {
  public:
    static RenewalDistribution exponential();
    static RenewalDistribution weibull(double shape);
    static RenewalDistribution gamma(double variance);

    RenewalFamily family() const { return family_; }
    double shape() const { return shape_; }       // Weibull s
    double variance_param() const { return var_; } // Gamma variance

    bool is_exponential() const;

    double pdf(double t) const;
    double cdf(double t) const;
    double survival(double t) const;
    double log_pdf(double t) const;
    double log_survival(double t) const;
    double hazard(double t) const;
    double log_hazard(double t) const;
    double cumulative_hazard(double t) const;     // Z(t) = -log(1 - F(t))
    double inverse_cumulative_hazard(double z) const;
    double quantile(double u) const;              // u in [0, 1)

    // Residual-time quantile for a unit aged to virtual age v:
    // returns x with F_v(x) = u where F_v(t) = (F(v+t)-F(v))/(1-F(v)).
    double conditional_quantile(double v, double u) const;

  private:
    RenewalDistribution(RenewalFamily f, double shape, double var);
    RenewalFamily family_;
    double shape_ = 1; // Weibull shape
    double var_ = 1;   // Gamma variance
    double weibull_scale_ = 1;
};

// Time-scaled lifetime distribution: hazard z(t) = base hazard of (t/scale),
// divided by scale. Used by virtual-age models whose hazard carries its own
// time scale.
class ScaledDistribution {
  public:
    ScaledDistribution(RenewalDistribution base, double scale);

    const RenewalDistribution& base() const { return base_; }
    double scale() const { return scale_; }

    double hazard(double t) const;
    double log_hazard(double t) const;
    double cumulative_hazard(double t) const;
    double inverse_cumulative_hazard(double z) const;
    double cdf(double t) const;
    double conditional_quantile(double v, double u) const;

  private:
    RenewalDistribution base_;
    double scale_;
};

// Mean-1 frailty distribution; variance 0 means degenerate at 1.
struct FrailtyDistribution {
    double variance = 0;

    static FrailtyDistribution degenerate() { return {0.0}; }
    static FrailtyDistribution gamma(double variance);

    bool is_degenerate() const { return variance == 0; }
    double quantile(double u) const; // gamma(1/var, var) quantile; identity if degenerate
};

struct QuadratureNode {
    double node;   // frailty value a_k > 0
    double weight; // w_k, sum to 1
};

// Gauss-Laguerre rule matched to the gamma(1/delta, delta) frailty density:
// E[g(a)] ~= sum w_k g(a_k), exact for polynomials up to degree 2n-1.
std::vector<QuadratureNode> frailty_quadrature(const FrailtyDistribution& h,
                                               int node_count);

} // namespace repsys
