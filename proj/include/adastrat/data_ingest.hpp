#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace adastrat {

/// Standardized logistic-regression data: every selected predictor column has
/// sample mean 0 and sample variance 1 (divisor n - 1). When an intercept is
/// requested it is appended as a final column of ones.
struct Dataset {
    Eigen::MatrixXd design;
    Eigen::VectorXd labels;  // entries are +1 or -1
    std::string source_path;

    std::size_t n() const { return static_cast<std::size_t>(design.rows()); }
    std::size_t s() const { return static_cast<std::size_t>(design.cols()); }
};

/// Environment variable consulted when no data path is given explicitly.
inline constexpr const char* kGermanPathEnv = "ADASTRAT_GERMAN_PATH";

/// Load the numeric variant of the German credit table: whitespace-separated
/// numeric rows whose last field is the class code (1 = good -> +1,
/// 2 = bad -> -1). Keeps the first `s` predictors and standardizes them.
/// Warns on stderr when the table is not 1000 x 25.
Dataset load_german_numeric(const std::string& path, std::size_t s, bool intercept = false);

/// Standard-normal design with labels drawn from the logistic model at
/// beta = (coef, ..., coef), standardized like the loaded data.
Dataset synthetic_logistic(std::size_t n, std::size_t s, std::uint64_t seed, double coef = 1.0);

/// Center and scale each column in place (sample SD). Throws DegenerateError
/// naming the column when its SD is zero.
void standardize_columns(Eigen::MatrixXd& design);

}  // namespace adastrat
