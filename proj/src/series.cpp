#include "nib/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nib {

TruncatedSeries::TruncatedSeries(std::size_t max_degree, double constant) : coeffs_(max_degree + 1, 0.0) {
    coeffs_[0] = constant;
}

TruncatedSeries::TruncatedSeries(std::size_t max_degree, std::vector<double> coefficients)
    : coeffs_(std::move(coefficients)) {
    coeffs_.resize(max_degree + 1, 0.0);
}

TruncatedSeries TruncatedSeries::variable(std::size_t max_degree) {
    TruncatedSeries z(max_degree);
    if (max_degree >= 1) z.coeffs_[1] = 1.0;
    return z;
}

double TruncatedSeries::sum() const { return std::accumulate(coeffs_.begin(), coeffs_.end(), 0.0); }

double TruncatedSeries::evaluate(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& other) {
    if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
    for (std::size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
    return *this;
}

TruncatedSeries& TruncatedSeries::operator*=(const TruncatedSeries& other) {
    const std::size_t size = std::max(coeffs_.size(), other.coeffs_.size());
    std::vector<double> out(size, 0.0);
    for (std::size_t a = 0; a < coeffs_.size(); ++a) {
        if (coeffs_[a] == 0.0) continue;
        for (std::size_t b = 0; b < other.coeffs_.size() && a + b < size; ++b) out[a + b] += coeffs_[a] * other.coeffs_[b];
    }
    coeffs_ = std::move(out);
    return *this;
}

TruncatedSeries& TruncatedSeries::operator*=(double scale) {
    for (double& c : coeffs_) c *= scale;
    return *this;
}

TruncatedSeries& TruncatedSeries::shift() {
    if (coeffs_.empty()) return *this;
    for (std::size_t k = coeffs_.size() - 1; k > 0; --k) coeffs_[k] = coeffs_[k - 1];
    coeffs_[0] = 0.0;
    return *this;
}

double max_abs_diff(const TruncatedSeries& a, const TruncatedSeries& b) {
    double d = 0.0;
    std::size_t size = std::max(a.coefficients().size(), b.coefficients().size());
    for (std::size_t k = 0; k < size; ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

}  // namespace nib
