#pragma once

#include <cstddef>
#include <variant>
#include <vector>

namespace nib {

/// Power series in z truncated after z^max_degree; higher terms are dropped.
class TruncatedSeries {
public:
    TruncatedSeries() = default;
    explicit TruncatedSeries(std::size_t max_degree, double constant = 0.0);
    TruncatedSeries(std::size_t max_degree, std::vector<double> coefficients);

    /// The series z.
    static TruncatedSeries variable(std::size_t max_degree);

    std::size_t max_degree() const noexcept { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
    const std::vector<double>& coefficients() const noexcept { return coeffs_; }
    double operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }
    double sum() const;
    /// Value of the truncated polynomial at real x.
    double evaluate(double x) const;

    TruncatedSeries& operator+=(const TruncatedSeries& other);
    TruncatedSeries& operator*=(const TruncatedSeries& other);
    TruncatedSeries& operator*=(double scale);
    /// Multiplies by z in place.
    TruncatedSeries& shift();

    friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
    friend TruncatedSeries operator*(TruncatedSeries a, const TruncatedSeries& b) { return a *= b; }
    friend TruncatedSeries operator*(TruncatedSeries a, double s) { return a *= s; }
    friend TruncatedSeries operator*(double s, TruncatedSeries a) { return a *= s; }

private:
    std::vector<double> coeffs_;
};

/// Max absolute coefficient difference.
double max_abs_diff(const TruncatedSeries& a, const TruncatedSeries& b);

/// A generating-function value: an evaluation at fixed real z, or a series.
using GenValue = std::variant<double, TruncatedSeries>;

}  // namespace nib
