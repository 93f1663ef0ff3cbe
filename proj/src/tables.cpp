#include "mdpde/tables.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace mdpde {

namespace {

std::string alpha_header() {
    std::ostringstream out;
    for (double a : kTableAlphas) out << "," << a;
    return out.str();
}

std::string cell(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3) << v;
    return out.str();
}

} // namespace

std::string are_table_csv() {
    const GlmModel model = GlmModel::poisson();
    std::ostringstream out;
    out << "mu_x,beta0" << alpha_header() << "\n";
    for (const auto& [mux, beta0] : kTableConfigs) {
        auto dist = CovariateDistribution::univariate_normal(mux, 1.0);
        Eta eta{Eigen::VectorXd::Constant(1, beta0), std::nullopt};
        double s0 = sandwich_analytic(model, dist, eta, 0.0).Sigma(0, 0);
        out << mux << "," << beta0;
        for (double a : kTableAlphas) {
            double sa = a == 0.0 ? s0 : sandwich_analytic(model, dist, eta, a).Sigma(0, 0);
            out << "," << cell(s0 / sa);
        }
        out << "\n";
    }
    return out.str();
}

std::string contiguous_power_table_csv() {
    const GlmModel model = GlmModel::poisson();
    const double level = 0.05;
    std::ostringstream out;
    out << "d,mu_x,beta0" << alpha_header() << "\n";
    LinearHypothesis hyp;
    hyp.L = Eigen::MatrixXd::Identity(1, 1);
    for (const auto& row : kPowerRows) {
        auto dist = CovariateDistribution::univariate_normal(row.mu_x, 1.0);
        Eta eta0{Eigen::VectorXd::Constant(1, row.beta0), std::nullopt};
        hyp.l0 = Eigen::VectorXd::Constant(1, row.beta0);
        Eigen::VectorXd d = Eigen::VectorXd::Constant(1, row.d);
        out << row.d << "," << row.mu_x << "," << row.beta0;
        for (double a : kTableAlphas) {
            out << "," << cell(contiguous_power(model, dist, eta0, hyp, d, level, a));
        }
        out << "\n";
    }
    return out.str();
}

std::string ifgrid_csv(const IfGrid& grid) {
    std::ostringstream out;
    out << "y,x,value\n";
    out.precision(10);
    for (int i = 0; i < grid.y_grid.size(); ++i) {
        for (int j = 0; j < grid.x_grid.size(); ++j) {
            out << grid.y_grid(i) << "," << grid.x_grid(j) << "," << grid.values(i, j) << "\n";
        }
    }
    return out.str();
}

} // namespace mdpde
