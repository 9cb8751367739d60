#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "freeconv/spectra.hpp"

// Eigenvalues of a dense complex Hermitian matrix. Unitary Householder
// reflections reduce the matrix to a real symmetric tridiagonal one (phases of
// the subdiagonal are dropped: a diagonal unitary similarity makes them real,
// and only magnitudes enter the spectrum); implicit-shift QL finishes. The
// hot loops run on split real/imaginary planes of the packed lower triangle
// so they vectorize.

namespace freeconv {

namespace {

// In-place reduction of the packed lower triangle (ar, ai) to tridiagonal
// (d, sub). Rows of the triangle are reused as scratch for the reflection
// vectors.
void tridiagonalize(int n, std::vector<double>& ar, std::vector<double>& ai,
                    std::vector<double>& d, std::vector<double>& sub) {
    std::vector<std::size_t> off(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        off[static_cast<std::size_t>(i)] =
            static_cast<std::size_t>(i) * static_cast<std::size_t>(i + 1) / 2;

    std::vector<double> pr(static_cast<std::size_t>(n)), pi(static_cast<std::size_t>(n));
    std::vector<double> qr(static_cast<std::size_t>(n)), qi(static_cast<std::size_t>(n));

    d.assign(static_cast<std::size_t>(n), 0.0);
    sub.assign(static_cast<std::size_t>(n), 0.0);

    for (int i = n - 1; i >= 1; --i) {
        const std::size_t base = off[static_cast<std::size_t>(i)];
        double* wr = ar.data() + base; // row i, columns 0..i
        double* wi = ai.data() + base;
        const int l = i - 1;
        d[static_cast<std::size_t>(i)] = wr[i];

        if (l == 0) {
            sub[1] = std::hypot(wr[0], wi[0]);
            continue;
        }

        double scale = 0.0;
        for (int k = 0; k <= l; ++k) scale += std::abs(wr[k]) + std::abs(wi[k]);
        if (scale == 0.0) {
            sub[static_cast<std::size_t>(i)] = 0.0;
            continue;
        }
        const double inv_scale = 1.0 / scale;
        double h = 0.0;
        for (int k = 0; k <= l; ++k) {
            wr[k] *= inv_scale;
            wi[k] *= inv_scale;
            h += wr[k] * wr[k] + wi[k] * wi[k];
        }
        const double g = std::sqrt(h);
        sub[static_cast<std::size_t>(i)] = scale * g;

        // Householder vector w acting on the leading block zeroes the column
        // above the diagonal, i.e. the conjugates of this row: conjugate in
        // place and grow the last entry away from cancellation.
        const double fr = wr[l], fi = wi[l];
        const double fmag = std::hypot(fr, fi);
        double phr = 1.0, phi = 0.0;
        if (fmag > 0.0) {
            phr = fr / fmag;
            phi = fi / fmag;
        }
        for (int k = 0; k < l; ++k) wi[k] = -wi[k];
        wr[l] = (fmag + g) * phr;
        wi[l] = -(fmag + g) * phi;
        const double big_h = h + fmag * g; // |w|^2 / 2

        // p = A w / H over the leading block, Hermitian from the packed lower.
        for (int k = 0; k <= l; ++k) pr[static_cast<std::size_t>(k)] = pi[static_cast<std::size_t>(k)] = 0.0;
        for (int j = 0; j <= l; ++j) {
            const double* rr = ar.data() + off[static_cast<std::size_t>(j)];
            const double* ri = ai.data() + off[static_cast<std::size_t>(j)];
            const double wjr = wr[j], wji = wi[j];
            double accr = rr[j] * wjr; // diagonal (imaginary part is zero)
            double acci = rr[j] * wji;
            for (int k = 0; k < j; ++k) {
                accr += rr[k] * wr[k] - ri[k] * wi[k];
                acci += rr[k] * wi[k] + ri[k] * wr[k];
            }
            double* prd = pr.data();
            double* pid = pi.data();
            for (int k = 0; k < j; ++k) {
                prd[k] += rr[k] * wjr + ri[k] * wji;
                pid[k] += rr[k] * wji - ri[k] * wjr;
            }
            pr[static_cast<std::size_t>(j)] += accr;
            pi[static_cast<std::size_t>(j)] += acci;
        }
        const double inv_h = 1.0 / big_h;
        double kw = 0.0;
        for (int k = 0; k <= l; ++k) {
            pr[static_cast<std::size_t>(k)] *= inv_h;
            pi[static_cast<std::size_t>(k)] *= inv_h;
            kw += wr[k] * pr[static_cast<std::size_t>(k)] + wi[k] * pi[static_cast<std::size_t>(k)];
        }
        kw *= 0.5 * inv_h;
        for (int k = 0; k <= l; ++k) {
            qr[static_cast<std::size_t>(k)] = pr[static_cast<std::size_t>(k)] - kw * wr[k];
            qi[static_cast<std::size_t>(k)] = pi[static_cast<std::size_t>(k)] - kw * wi[k];
        }

        // Rank-2 update A -= q w* + w q* on the lower triangle.
        for (int j = 0; j <= l; ++j) {
            double* rr = ar.data() + off[static_cast<std::size_t>(j)];
            double* ri = ai.data() + off[static_cast<std::size_t>(j)];
            const double qjr = qr[static_cast<std::size_t>(j)], qji = qi[static_cast<std::size_t>(j)];
            const double wjr = wr[j], wji = wi[j];
            const double* qrd = qr.data();
            const double* qid = qi.data();
            for (int k = 0; k <= j; ++k) {
                rr[k] -= qjr * wr[k] + qji * wi[k] + wjr * qrd[k] + wji * qid[k];
                ri[k] -= qji * wr[k] - qjr * wi[k] + wji * qrd[k] - wjr * qid[k];
            }
            ri[j] = 0.0; // diagonal stays real
        }
    }
    d[0] = ar[0];
}

// Implicit-shift QL with Wilkinson shifts on (d, sub); sub[k] couples
// d[k] and d[k+1]. Fifty sweeps per eigenvalue before giving up.
void ql_implicit(std::vector<double>& d, std::vector<double>& sub) {
    const int n = static_cast<int>(d.size());
    if (n < 2) return;
    // shift couplings down: sub[i] from tridiagonalize couples (i-1, i)
    for (int i = 0; i + 1 < n; ++i) sub[static_cast<std::size_t>(i)] = sub[static_cast<std::size_t>(i + 1)];
    sub[static_cast<std::size_t>(n - 1)] = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        while (true) {
            int m = l;
            for (; m < n - 1; ++m) {
                const double dd = std::abs(d[static_cast<std::size_t>(m)]) + std::abs(d[static_cast<std::size_t>(m + 1)]);
                if (std::abs(sub[static_cast<std::size_t>(m)]) <= eps * dd) break;
            }
            if (m == l) break;
            if (++iter > 50) throw ConvergenceError("eigenvalues: QL sweep budget of 50 exhausted");

            double g = (d[static_cast<std::size_t>(l + 1)] - d[static_cast<std::size_t>(l)]) /
                       (2.0 * sub[static_cast<std::size_t>(l)]);
            double r = std::hypot(g, 1.0);
            g = d[static_cast<std::size_t>(m)] - d[static_cast<std::size_t>(l)] +
                sub[static_cast<std::size_t>(l)] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (int i = m - 1; i >= l; --i) {
                double f = s * sub[static_cast<std::size_t>(i)];
                const double b = c * sub[static_cast<std::size_t>(i)];
                r = std::hypot(f, g);
                sub[static_cast<std::size_t>(i + 1)] = r;
                if (r == 0.0) {
                    d[static_cast<std::size_t>(i + 1)] -= p;
                    sub[static_cast<std::size_t>(m)] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[static_cast<std::size_t>(i + 1)] - p;
                r = (d[static_cast<std::size_t>(i)] - g) * s + 2.0 * c * b;
                p = s * r;
                d[static_cast<std::size_t>(i + 1)] = g + p;
                g = c * r - b;
            }
            if (underflow) continue;
            d[static_cast<std::size_t>(l)] -= p;
            sub[static_cast<std::size_t>(l)] = g;
            sub[static_cast<std::size_t>(m)] = 0.0;
        }
    }
}

} // namespace

std::vector<double> eigenvalues_descending(const HermitianMatrix& m) {
    const int n = m.size();
    if (n == 0) return {};
    if (m.hermiticity_defect() > 1e-12)
        throw DomainError("eigenvalues: matrix is not Hermitian within 1e-12");
    if (n == 1) return {m(0, 0).real()};

    const std::size_t packed = static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2;
    std::vector<double> ar(packed), ai(packed);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j, ++idx) {
            ar[idx] = m(i, j).real();
            ai[idx] = (i == j) ? 0.0 : m(i, j).imag();
        }
    }

    std::vector<double> d, sub;
    tridiagonalize(n, ar, ai, d, sub);
    ql_implicit(d, sub);
    std::sort(d.begin(), d.end(), std::greater<>());
    return d;
}

} // namespace freeconv
