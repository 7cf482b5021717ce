#include "hsim/eigen_solver.hpp"
#include "hsim/errors.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <algorithm>
#include <random>

using namespace hsim;

namespace {

using cplx = std::complex<double>;

Eigen::MatrixXcd random_matrix(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cplx(d(rng), d(rng));
    return a;
}

std::vector<cplx> sorted(const Eigen::VectorXcd& v) {
    std::vector<cplx> out(v.data(), v.data() + v.size());
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

// Greedy nearest match; fine for well-separated random spectra.
double max_spectral_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    std::vector<cplx> rest(b.data(), b.data() + b.size());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        auto it = std::min_element(rest.begin(), rest.end(),
                                   [&](cplx x, cplx y) { return std::abs(x - a(i)) < std::abs(y - a(i)); });
        worst = std::max(worst, std::abs(*it - a(i)));
        rest.erase(it);
    }
    return worst;
}

} // namespace

TEST_SUITE("eigen_solver") {

TEST_CASE("2x2 closed form") {
    const cplx a(10.65, -0.0005), d(10.6, -0.001), g(0.09, 0.0);
    Eigen::MatrixXcd m(2, 2);
    m << a, g, g, d;
    const cplx mean = 0.5 * (a + d);
    const cplx root = std::sqrt(0.25 * (a - d) * (a - d) + g * g);
    const EigenDecomposition e = complex_eigensolve(m);
    const auto v = sorted(e.values);
    CHECK(std::abs(v[0] - (mean - root)) < 1e-13);
    CHECK(std::abs(v[1] - (mean + root)) < 1e-13);
}

TEST_CASE("3x3 with a known spectrum") {
    // S·diag(λ)·S⁻¹ with a fixed well-conditioned S.
    Eigen::Vector3cd lambda(cplx(1.0, -0.1), cplx(2.0, 0.3), cplx(-1.5, 0.0));
    Eigen::Matrix3cd s;
    s << cplx(1, 0), cplx(0.2, 0.1), cplx(0, 0.3), cplx(0.1, 0), cplx(1, 0.2), cplx(0.3, 0), cplx(0, 0.2),
        cplx(-0.1, 0), cplx(1, 0);
    const Eigen::MatrixXcd a = s * lambda.asDiagonal() * s.inverse();
    const EigenDecomposition e = complex_eigensolve(a);
    CHECK(max_spectral_distance(e.values, lambda) < 1e-12);
}

TEST_CASE("agrees with Eigen's ComplexEigenSolver on random matrices") {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 24; ++n) {
        for (int rep = 0; rep < 5; ++rep) {
            const Eigen::MatrixXcd a = random_matrix(n, rng);
            const EigenDecomposition mine = complex_eigensolve(a);
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ref(a);
            const double scale = a.norm();
            CHECK(max_spectral_distance(mine.values, ref.eigenvalues()) < 1e-10 * scale);
            for (int k = 0; k < n; ++k) {
                const Eigen::VectorXcd v = mine.vectors.col(k);
                CHECK(std::abs(v.norm() - 1.0) < 1e-12);
                CHECK((a * v - mine.values(k) * v).norm() < 1e-10 * scale);
            }
        }
    }
}

TEST_CASE("vectors are phase-fixed") {
    std::mt19937_64 rng(5);
    const Eigen::MatrixXcd a = random_matrix(6, rng);
    const EigenDecomposition e = complex_eigensolve(a);
    for (int k = 0; k < 6; ++k) {
        Eigen::Index idx = 0;
        e.vectors.col(k).cwiseAbs().maxCoeff(&idx);
        CHECK(e.vectors(idx, k).imag() == 0.0);
        CHECK(e.vectors(idx, k).real() > 0.0);
    }
}

TEST_CASE("badly scaled and structured inputs") {
    // Diagonal, already triangular, and strongly graded matrices.
    Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(4, 4);
    diag.diagonal() << cplx(4, 0), cplx(1, 1), cplx(-2, 0), cplx(1, -1);
    CHECK(max_spectral_distance(complex_eigensolve(diag).values, diag.diagonal()) < 1e-14);

    Eigen::MatrixXcd graded(3, 3);
    graded << cplx(1, 0), cplx(1e6, 0), cplx(0, 0), cplx(1e-6, 0), cplx(2, 0), cplx(1e5, 0), cplx(0, 0),
        cplx(1e-5, 0), cplx(3, 0);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ref(graded);
    CHECK(max_spectral_distance(complex_eigensolve(graded).values, ref.eigenvalues()) < 1e-9);
}

TEST_CASE("iteration cap is reported") {
    std::mt19937_64 rng(2);
    const Eigen::MatrixXcd a = random_matrix(8, rng);
    EigenSolverOptions opts;
    opts.iterations_per_dimension = 0;
    CHECK_THROWS_AS(complex_eigensolve(a, "probe", opts), NumericError);
}

}
