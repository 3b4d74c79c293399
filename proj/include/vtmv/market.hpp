#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vtmv/errors.hpp"
#include "vtmv/schedule.hpp"

namespace vtmv {

using VectorSchedule = Schedule<Eigen::VectorXd>;
using MatrixSchedule = Schedule<Eigen::MatrixXd>;

/// Coefficients on one interval where r, b and sigma are all constant.
struct Regime {
    double start = 0.0;
    double r = 0.0;
    Eigen::VectorXd beta;       // b - r, n-vector
    Eigen::MatrixXd sigma;      // n x d
    Eigen::VectorXd exposure;   // [sigma sigma^T]^{-1} beta^T
    Eigen::RowVectorXd loading; // exposure^T sigma, d-vector with |loading|^2 = phi
    double phi = 0.0;           // beta [sigma sigma^T]^{-1} beta^T
    double min_eigenvalue = 0.0;
    bool factorized = false;
};

/// Deterministic market: one bond with rate r(t) and n stocks driven by d
/// Brownian motions. Coefficients are piecewise constant; the model is
/// immutable after construction.
class MarketModel {
public:
    static constexpr double kDefaultEpsilon = 1e-8;

    MarketModel(std::size_t n, std::size_t d, ScalarSchedule r, VectorSchedule b,
                MatrixSchedule sigma, double epsilon = kDefaultEpsilon);

    /// Constant-coefficient market.
    static MarketModel constant(double r, const Eigen::VectorXd& b, const Eigen::MatrixXd& sigma,
                                double epsilon = kDefaultEpsilon);

    /// n independent copies of one stock (diagonal sigma, d = n).
    static MarketModel identical_assets(std::size_t n, double r, double b, double sigma,
                                        double epsilon = kDefaultEpsilon);

    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] std::size_t d() const noexcept { return d_; }
    [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
    [[nodiscard]] const ScalarSchedule& r() const noexcept { return r_; }
    [[nodiscard]] const VectorSchedule& b() const noexcept { return b_; }
    [[nodiscard]] const MatrixSchedule& sigma() const noexcept { return sigma_; }

    /// Regimes on the union of all coefficient breakpoints.
    [[nodiscard]] std::span<const Regime> regimes() const noexcept { return regimes_; }
    [[nodiscard]] const Regime& regime_at(double t) const;
    [[nodiscard]] std::span<const double> breakpoints() const noexcept { return phi_.breakpoints(); }
    [[nodiscard]] bool is_constant() const noexcept { return regimes_.size() == 1; }

    /// Squared market price of risk on t's regime. Throws AssumptionError if
    /// sigma sigma^T could not be factorized there.
    [[nodiscard]] double phi_at(double t) const;

    [[nodiscard]] double integral_r(double t0, double t1) const;
    [[nodiscard]] double integral_phi(double t0, double t1) const;

private:
    std::size_t n_;
    std::size_t d_;
    double epsilon_;
    ScalarSchedule r_;
    VectorSchedule b_;
    MatrixSchedule sigma_;
    std::vector<Regime> regimes_;
    ScalarSchedule phi_;
};

/// Checks positivity of r and beta and the lower bound on sigma sigma^T for
/// every regime. Structural problems are rejected earlier, at construction.
[[nodiscard]] ValidationReport validate_market(const MarketModel& m);

}  // namespace vtmv
