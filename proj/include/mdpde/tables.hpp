#ifndef MDPDE_TABLES_HPP
#define MDPDE_TABLES_HPP

#include <string>
#include <vector>

#include "mdpde/robust.hpp"

namespace mdpde {

// Grids shared by the efficiency and contiguous-power tables: Poisson
// regression, scalar covariate x ~ N(mu_x, 1).
inline const std::vector<double> kTableAlphas{0.0, 0.05, 0.1, 0.25, 0.4, 0.5, 0.7, 1.0};
inline const std::vector<std::pair<double, double>> kTableConfigs{
    {0.0, 1.0}, {0.0, 0.5}, {1.0, 1.0}, {1.0, 0.5}, {5.0, 1.0}, {5.0, 0.5}};

struct PowerRow {
    double d;
    double mu_x;
    double beta0;
};
inline const std::vector<PowerRow> kPowerRows{
    {1, 0, 1.0}, {1, 0, 0.5}, {1, 1, 1.0}, {1, 1, 0.5}, {1, 5, 1.0},
    {1, 5, 0.5}, {2, 0, 1.0}, {2, 0, 0.5}, {2, 1, 1.0}, {2, 1, 0.5}};

// Header mu_x,beta0,<alphas>; cells are Sigma_0/Sigma_alpha to 3 decimals.
std::string are_table_csv();

// Header d,mu_x,beta0,<alphas>; asymptotic power under eta_n = eta0 +
// d/sqrt(n) at the 5% level, 3 decimals.
std::string contiguous_power_table_csv();

// Long-format y,x,value rows for one influence surface.
std::string ifgrid_csv(const IfGrid& grid);

} // namespace mdpde

#endif
