#include "hsim/eigen_solver.hpp"

#include "hsim/errors.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace hsim {

namespace {

using cplx = std::complex<double>;
using Index = Eigen::Index;

double abs1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

// B = D⁻¹·A·D with D a power-of-two diagonal; returns D.
Eigen::VectorXd balance(Eigen::MatrixXcd& a) {
    constexpr double radix = 2.0;
    constexpr double radix2 = radix * radix;
    const Index n = a.rows();
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
    bool done = false;
    while (!done) {
        done = true;
        for (Index i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += abs1(a(j, i));
                r += abs1(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            const double s = c + r;
            double f = 1.0;
            double g = r / radix;
            while (c < g) {
                f *= radix;
                c *= radix2;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix2;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                scale(i) *= f;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
    return scale;
}

// In-place Householder reduction; returns the accumulated unitary Q.
Eigen::MatrixXcd to_hessenberg(Eigen::MatrixXcd& h) {
    const Index n = h.rows();
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(n, n);
    for (Index k = 0; k + 2 < n; ++k) {
        const Index m = n - k - 1;
        Eigen::VectorXcd v = h.block(k + 1, k, m, 1);
        const double xnorm = v.norm();
        if (xnorm == 0.0) continue;
        const cplx x0 = v(0);
        const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx(1.0, 0.0);
        const cplx alpha = -phase * xnorm;
        v(0) -= alpha;
        const double vnorm = v.norm();
        if (vnorm == 0.0) continue;
        v /= vnorm;
        // H ← P·H·P with P = I − 2·v·v*
        Eigen::RowVectorXcd w = v.adjoint() * h.bottomRows(m);
        h.bottomRows(m).noalias() -= 2.0 * v * w;
        Eigen::VectorXcd u = h.rightCols(m) * v;
        h.rightCols(m).noalias() -= 2.0 * u * v.adjoint();
        Eigen::VectorXcd z = q.rightCols(m) * v;
        q.rightCols(m).noalias() -= 2.0 * z * v.adjoint();
        h.block(k + 2, k, m - 1, 1).setZero();
        h(k + 1, k) = alpha;
    }
    return q;
}

struct Givens {
    double c;
    cplx s;
};

// G·[x; y] = [r; 0] with G = [[c, s], [−s̄, c]].
Givens make_givens(cplx x, cplx y) {
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    if (ay == 0.0) return {1.0, cplx(0.0, 0.0)};
    if (ax == 0.0) return {0.0, cplx(1.0, 0.0)};
    const double nrm = std::hypot(ax, ay);
    return {ax / nrm, (x / ax) * std::conj(y) / nrm};
}

void rotate_rows(Eigen::MatrixXcd& h, Index k, const Givens& g, Index col_begin) {
    for (Index j = col_begin; j < h.cols(); ++j) {
        const cplx a = h(k, j);
        const cplx b = h(k + 1, j);
        h(k, j) = g.c * a + g.s * b;
        h(k + 1, j) = -std::conj(g.s) * a + g.c * b;
    }
}

void rotate_cols(Eigen::MatrixXcd& h, Index k, const Givens& g, Index row_end) {
    for (Index i = 0; i < row_end; ++i) {
        const cplx a = h(i, k);
        const cplx b = h(i, k + 1);
        h(i, k) = g.c * a + std::conj(g.s) * b;
        h(i, k + 1) = -g.s * a + g.c * b;
    }
}

cplx wilkinson_shift(const Eigen::MatrixXcd& h, Index hi) {
    const cplx a = h(hi - 1, hi - 1);
    const cplx b = h(hi - 1, hi);
    const cplx c = h(hi, hi - 1);
    const cplx d = h(hi, hi);
    const cplx half = 0.5 * (a - d);
    const cplx disc = std::sqrt(half * half + b * c);
    const cplx mu1 = 0.5 * (a + d) + disc;
    const cplx mu2 = 0.5 * (a + d) - disc;
    return std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
}

} // namespace

EigenDecomposition complex_eigensolve(const Eigen::MatrixXcd& a, std::string_view name,
                                      const EigenSolverOptions& options) {
    if (a.rows() != a.cols()) throw NumericError("eigensolve(" + std::string(name) + "): matrix must be square");
    const Index n = a.rows();
    EigenDecomposition out;
    if (n == 0) return out;
    if (!a.allFinite()) throw NumericError("eigensolve(" + std::string(name) + "): non-finite entries");

    Eigen::MatrixXcd t = a;
    const Eigen::VectorXd scale = balance(t);
    Eigen::MatrixXcd z = to_hessenberg(t);

    const double norm = std::max(t.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const double tol = options.deflation_tolerance;
    const int max_sweeps = options.iterations_per_dimension * static_cast<int>(n);
    int sweeps = 0;
    int since_deflation = 0;

    Index hi = n - 1;
    while (hi > 0) {
        Index l = hi;
        while (l > 0) {
            double s = std::abs(t(l - 1, l - 1)) + std::abs(t(l, l));
            if (s == 0.0) s = norm;
            if (std::abs(t(l, l - 1)) <= tol * s) {
                t(l, l - 1) = 0.0;
                break;
            }
            --l;
        }
        if (l == hi) {
            --hi;
            since_deflation = 0;
            continue;
        }
        if (sweeps >= max_sweeps) {
            throw NumericError("eigensolve(" + std::string(name) + "): QR iteration did not converge after " +
                               std::to_string(sweeps) + " sweeps");
        }
        ++sweeps;
        ++since_deflation;

        cplx mu;
        if (since_deflation % 10 == 0) {
            // Exceptional shift to break cycles.
            mu = t(hi, hi) + cplx(0.75 * std::abs(t(hi, hi - 1)), 0.0);
        } else {
            mu = wilkinson_shift(t, hi);
        }

        cplx x = t(l, l) - mu;
        cplx y = t(l + 1, l);
        for (Index k = l; k < hi; ++k) {
            if (k > l) {
                x = t(k, k - 1);
                y = t(k + 1, k - 1);
            }
            const Givens g = make_givens(x, y);
            rotate_rows(t, k, g, k > l ? k - 1 : l);
            rotate_cols(t, k, g, std::min(k + 3, hi + 1));
            rotate_cols(z, k, g, n);
            if (k > l) t(k + 1, k - 1) = 0.0;
        }
    }

    for (Index j = 0; j < n; ++j)
        for (Index i = j + 1; i < n; ++i) t(i, j) = 0.0;

    out.values = t.diagonal();
    out.iterations = sweeps;

    // Eigenvectors of the triangular factor, then back to the original basis.
    const double small = std::max(std::numeric_limits<double>::epsilon() * norm, std::numeric_limits<double>::min());
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
        y(k, k) = 1.0;
        for (Index i = k - 1; i >= 0; --i) {
            cplx s = 0.0;
            for (Index j = i + 1; j <= k; ++j) s += t(i, j) * y(j, k);
            cplx d = t(i, i) - t(k, k);
            if (std::abs(d) < small) d = small;
            y(i, k) = -s / d;
        }
    }
    out.vectors = scale.asDiagonal() * (z * y);
    for (Index k = 0; k < n; ++k) {
        auto v = out.vectors.col(k);
        v.normalize();
        Index best = 0;
        for (Index i = 1; i < n; ++i)
            if (std::abs(v(i)) > std::abs(v(best)) * (1.0 + 1e-12)) best = i;
        const cplx phase = std::conj(v(best)) / std::abs(v(best));
        v *= phase;
        v(best) = cplx(v(best).real(), 0.0);
    }
    return out;
}

} // namespace hsim
