#include "adastrat/data_ingest.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "adastrat/errors.hpp"
#include "adastrat/rng.hpp"

namespace adastrat {

namespace {

constexpr std::size_t kGermanRows = 1000;
constexpr std::size_t kGermanFields = 25;

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& design) {
    Eigen::MatrixXd out(design.rows(), design.cols() + 1);
    out.leftCols(design.cols()) = design;
    out.col(design.cols()).setOnes();
    return out;
}

}  // namespace

void standardize_columns(Eigen::MatrixXd& design) {
    const double n = static_cast<double>(design.rows());
    if (design.rows() < 2) throw ArgumentError("standardize_columns: need at least 2 rows");
    for (Eigen::Index j = 0; j < design.cols(); ++j) {
        auto col = design.col(j);
        const double mean = col.mean();
        col.array() -= mean;
        const double sd = std::sqrt(col.squaredNorm() / (n - 1.0));
        if (!(sd > 0.0)) throw DegenerateError("standardize_columns: column " + std::to_string(j) + " is constant");
        col /= sd;
    }
}

Dataset load_german_numeric(const std::string& path, std::size_t s, bool intercept) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open data file '" + path + "'");

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<double> fields;
        std::string tok;
        while (ls >> tok) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size() || !std::isfinite(v))
                throw ParseError("german: non-numeric field '" + tok + "'", line_no);
            fields.push_back(v);
        }
        if (fields.empty()) continue;
        if (width == 0) width = fields.size();
        if (fields.size() != width)
            throw ParseError("german: expected " + std::to_string(width) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        if (fields.back() != 1.0 && fields.back() != 2.0)
            throw ParseError("german: class code must be 1 or 2", line_no);
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) throw ParseError("german: no data rows", line_no);
    if (width < 2) throw ParseError("german: need at least one predictor and a class column", 1);
    const std::size_t predictors = width - 1;
    if (s < 1 || s > predictors)
        throw ArgumentError("german: s must lie in [1, " + std::to_string(predictors) + "], got " + std::to_string(s));
    if (rows.size() != kGermanRows || width != kGermanFields)
        std::cerr << "warning: " << path << " is " << rows.size() << " x " << width << ", expected " << kGermanRows
                  << " x " << kGermanFields << " for the numeric German credit table\n";

    Dataset out;
    out.source_path = path;
    out.design.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(s));
    out.labels.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < s; ++j) out.design(i, j) = rows[i][j];
        out.labels[i] = rows[i].back() == 1.0 ? 1.0 : -1.0;
    }
    standardize_columns(out.design);
    if (intercept) out.design = with_intercept(out.design);
    return out;
}

Dataset synthetic_logistic(std::size_t n, std::size_t s, std::uint64_t seed, double coef) {
    if (n < 2) throw ArgumentError("synthetic_logistic: n must be at least 2");
    if (s < 1) throw ArgumentError("synthetic_logistic: s must be at least 1");
    Rng rng(seed);
    Dataset out;
    out.source_path = "<synthetic>";
    out.design.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(s));
    out.labels.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < s; ++j) out.design(i, j) = rng.normal();
    standardize_columns(out.design);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = coef * out.design.row(i).sum();
        const double p_plus = 1.0 / (1.0 + std::exp(-z));
        out.labels[i] = rng.uniform() < p_plus ? 1.0 : -1.0;
    }
    return out;
}

}  // namespace adastrat
