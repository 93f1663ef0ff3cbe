#ifndef MDPDE_CSVIO_HPP
#define MDPDE_CSVIO_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mdpde/model.hpp"

namespace mdpde {

// Comma-separated data with a header row; "." decimal point; no missing
// values allowed. The y column defaults to the one named "y", covariates
// default to every other column in header order.
struct Dataset {
    std::vector<std::string> column_names;
    std::string y_column;
    std::vector<std::string> x_columns;
    Sample observations;
};

Dataset load_csv(const std::string& path, const std::string& y_column = "y",
                 const std::vector<std::string>& x_columns = {});

// "1,2;3,4" -> 2x2 row-major matrix; "1,2,3" -> vector.
Eigen::MatrixXd parse_matrix(const std::string& text);
Eigen::VectorXd parse_vector(const std::string& text);
std::string format_matrix(const Eigen::MatrixXd& m);
std::string format_vector(const Eigen::VectorXd& v);

void write_text_file(const std::string& path, const std::string& content);

} // namespace mdpde

#endif
