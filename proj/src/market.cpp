#include "vtmv/market.hpp"

#include <cmath>
#include <string>

namespace vtmv {

namespace {

bool is_diagonal(const Eigen::MatrixXd& s) {
    if (s.rows() != s.cols()) return false;
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        for (Eigen::Index j = 0; j < s.cols(); ++j) {
            if (i != j && s(i, j) != 0.0) return false;
        }
    }
    return true;
}

Regime make_regime(double start, double r, const Eigen::VectorXd& b, const Eigen::MatrixXd& sigma) {
    Regime g;
    g.start = start;
    g.r = r;
    g.beta = b.array() - r;
    g.sigma = sigma;

    const Eigen::MatrixXd cov = sigma * sigma.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    g.min_eigenvalue = eig.eigenvalues().minCoeff();

    if (is_diagonal(sigma)) {
        // Sum of squared Sharpe ratios; avoids a factorization round-off.
        const Eigen::VectorXd diag = sigma.diagonal();
        if ((diag.array() != 0.0).all()) {
            const Eigen::ArrayXd sharpe = g.beta.array() / diag.array();
            g.exposure = (g.beta.array() / diag.array().square()).matrix();
            g.phi = sharpe.square().sum();
            g.factorized = true;
        }
    } else {
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() == Eigen::Success) {
            g.exposure = llt.solve(g.beta);
            g.phi = g.beta.dot(g.exposure);
            g.factorized = std::isfinite(g.phi);
        }
    }
    if (g.factorized) {
        g.loading = g.exposure.transpose() * sigma;
    } else {
        g.exposure = Eigen::VectorXd::Zero(b.size());
        g.loading = Eigen::RowVectorXd::Zero(sigma.cols());
        g.phi = std::nan("");
    }
    return g;
}

}  // namespace

MarketModel::MarketModel(std::size_t n, std::size_t d, ScalarSchedule r, VectorSchedule b,
                         MatrixSchedule sigma, double epsilon)
    : n_(n), d_(d), epsilon_(epsilon), r_(std::move(r)), b_(std::move(b)), sigma_(std::move(sigma)) {
    if (n_ == 0 || d_ == 0) throw StructuralError("market: n and d must be >= 1");
    if (!(epsilon_ > 0.0)) throw StructuralError("market: epsilon must be > 0");
    if (r_.segments() == 0 || b_.segments() == 0 || sigma_.segments() == 0) {
        throw StructuralError("market: empty coefficient schedule");
    }
    for (const auto& v : b_.values()) {
        if (static_cast<std::size_t>(v.size()) != n_) {
            throw StructuralError("market: b has " + std::to_string(v.size()) + " entries, expected n = " +
                                  std::to_string(n_));
        }
    }
    for (const auto& s : sigma_.values()) {
        if (static_cast<std::size_t>(s.rows()) != n_ || static_cast<std::size_t>(s.cols()) != d_) {
            throw StructuralError("market: sigma must be n x d = " + std::to_string(n_) + " x " +
                                  std::to_string(d_));
        }
    }
    for (double v : r_.values()) {
        if (!std::isfinite(v)) throw StructuralError("market: r must be finite");
    }

    const auto bps = merge_breakpoints(r_, b_, sigma_);
    std::vector<double> phis;
    regimes_.reserve(bps.size());
    for (double t : bps) {
        regimes_.push_back(make_regime(t, r_.at(t), b_.at(t), sigma_.at(t)));
        phis.push_back(regimes_.back().phi);
    }
    phi_ = ScalarSchedule(bps, std::move(phis));
}

MarketModel MarketModel::constant(double r, const Eigen::VectorXd& b, const Eigen::MatrixXd& sigma,
                                  double epsilon) {
    return MarketModel(static_cast<std::size_t>(b.size()), static_cast<std::size_t>(sigma.cols()),
                       ScalarSchedule(r), VectorSchedule(b), MatrixSchedule(sigma), epsilon);
}

MarketModel MarketModel::identical_assets(std::size_t n, double r, double b, double sigma,
                                          double epsilon) {
    const auto size = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(size, size);
    s.diagonal().setConstant(sigma);
    return constant(r, Eigen::VectorXd::Constant(size, b), s, epsilon);
}

const Regime& MarketModel::regime_at(double t) const {
    return regimes_[phi_.segment_index(t)];
}

double MarketModel::phi_at(double t) const {
    if (!(t >= 0.0)) throw DomainError("phi_at: time must be >= 0");
    const Regime& g = regime_at(t);
    if (!g.factorized) {
        throw AssumptionError("phi_at: sigma sigma^T is not positive definite at t = " + std::to_string(t));
    }
    return g.phi;
}

double MarketModel::integral_r(double t0, double t1) const {
    return r_.integrate(t0, t1, [](double v) { return v; });
}

double MarketModel::integral_phi(double t0, double t1) const {
    return phi_.integrate(t0, t1, [](double v) { return v; });
}

ValidationReport validate_market(const MarketModel& m) {
    ValidationReport report;
    const auto regimes = m.regimes();
    for (std::size_t k = 0; k < regimes.size(); ++k) {
        const Regime& g = regimes[k];
        const std::string where = " on segment " + std::to_string(k);
        if (!(g.r > 0.0)) {
            report.violations.push_back({ViolationKind::NonPositiveRate, k, "r <= 0" + where});
        }
        for (Eigen::Index i = 0; i < g.beta.size(); ++i) {
            if (!(g.beta(i) > 0.0)) {
                report.violations.push_back({ViolationKind::NonPositiveExcessReturn, k,
                                             "beta <= 0" + where + " (asset " + std::to_string(i) + ")"});
            }
        }
        if (!g.factorized || !(g.min_eigenvalue > m.epsilon())) {
            report.violations.push_back(
                {ViolationKind::DegenerateDiffusion, k, "sigma sigma^T not >= epsilon I" + where});
        }
    }
    return report;
}

}  // namespace vtmv
