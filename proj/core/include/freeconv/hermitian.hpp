#pragma once

#include <complex>
#include <vector>

#include "freeconv/errors.hpp"

namespace freeconv {

/// Dense complex Hermitian matrix, row-major full storage, value semantics.
class HermitianMatrix {
  public:
    explicit HermitianMatrix(int n) : n_(n) {
        if (n < 0) throw SizeError("HermitianMatrix: negative size");
        a_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), {0.0, 0.0});
    }

    static HermitianMatrix diagonal(const std::vector<double>& d) {
        HermitianMatrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.n_; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        return m;
    }

    [[nodiscard]] int size() const { return n_; }

    std::complex<double>& operator()(int i, int j) {
        return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)];
    }
    const std::complex<double>& operator()(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)];
    }

    [[nodiscard]] const std::vector<std::complex<double>>& data() const { return a_; }
    [[nodiscard]] std::vector<std::complex<double>>& data() { return a_; }

    [[nodiscard]] double trace_real() const {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i).real();
        return t;
    }

    [[nodiscard]] double frobenius_sq() const {
        double s = 0.0;
        for (const auto& z : a_) s += std::norm(z);
        return s;
    }

    /// max_{i,j} |A_ij - conj(A_ji)|
    [[nodiscard]] double hermiticity_defect() const {
        double d = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j)
                d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return d;
    }

  private:
    int n_;
    std::vector<std::complex<double>> a_;
};

} // namespace freeconv
