#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pltl {

class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Square, row-major.
class DenseMatrix {
public:
    explicit DenseMatrix(std::size_t n = 0) : n_(n), data_(n * n, 0.0) {}

    std::size_t dim() const noexcept { return n_; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * n_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * n_ + c]; }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

private:
    std::size_t n_;
    std::vector<double> data_;
};

inline constexpr double kPivotTolerance = 1e-12;

// Gaussian elimination with partial pivoting. Takes A by value; it is
// consumed as scratch space.
inline std::vector<double> solve_linear(DenseMatrix a, std::vector<double> c) {
    const std::size_t n = a.dim();
    if (c.size() != n)
        throw std::invalid_argument("solve_linear: right-hand side has " + std::to_string(c.size()) +
                                    " entries for a " + std::to_string(n) + "x" +
                                    std::to_string(n) + " system");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (std::abs(a(pivot, col)) < kPivotTolerance)
            throw SingularSystemError("solve_linear: pivot below 1e-12 in column " +
                                      std::to_string(col));
        if (pivot != col) {
            for (std::size_t k = col; k < n; ++k) std::swap(a(col, k), a(pivot, k));
            std::swap(c[col], c[pivot]);
        }
        const double diag = a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = a(r, col) / diag;
            if (factor == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) a(r, k) -= factor * a(col, k);
            c[r] -= factor * c[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = c[i];
        for (std::size_t k = i + 1; k < n; ++k) acc -= a(i, k) * x[k];
        x[i] = acc / a(i, i);
    }
    return x;
}

} // namespace pltl
