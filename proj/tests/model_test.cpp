#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "dicke/errors.hpp"
#include "dicke/model.hpp"

using namespace dicke;

namespace {

// Independent construction for the Kronecker oracle: the S_x ladder element in
// the (S - m)(S + m + 1) form, and the boson operators from sqrt(n).
Eigen::MatrixXd oracle_sx(int N) {
    const double S = 0.5 * N;
    Eigen::MatrixXd sx = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int j = 0; j < N; ++j) {
        const double m = j - S;
        sx(j, j + 1) = sx(j + 1, j) = 0.5 * std::sqrt((S - m) * (S + m + 1.0));
    }
    return sx;
}

Eigen::MatrixXd oracle_sz(int N) {
    Eigen::MatrixXd sz = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int j = 0; j <= N; ++j) sz(j, j) = j - 0.5 * N;
    return sz;
}

Eigen::MatrixXd oracle_annihilation(int M) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(M + 1, M + 1);
    for (int n = 1; n <= M; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Eigen::MatrixXd kronecker_hamiltonian(const ModelParams& p, int M) {
    const Eigen::MatrixXd a = oracle_annihilation(M);
    const Eigen::MatrixXd sx = oracle_sx(p.N);
    const Eigen::MatrixXd sz = oracle_sz(p.N);
    const Eigen::MatrixXd id_spin = Eigen::MatrixXd::Identity(p.N + 1, p.N + 1);
    const Eigen::MatrixXd id_boson = Eigen::MatrixXd::Identity(M + 1, M + 1);
    const Eigen::MatrixXd number = a.transpose() * a;
    const Eigen::MatrixXd quadrature = a.transpose() + a;
    const Eigen::MatrixXd sx2 = sx * sx;
    return p.omega * Eigen::kroneckerProduct(number, id_spin).eval() +
           p.g * Eigen::kroneckerProduct(quadrature, sz).eval() - p.v * Eigen::kroneckerProduct(id_boson, sx2).eval();
}

// Reverses the m ordering (the examples are written m-descending).
Eigen::MatrixXd reversed(const Eigen::MatrixXd& m) { return m.colwise().reverse().rowwise().reverse(); }

} // namespace

TEST_CASE("spin-1/2 matrices are Pauli/2") {
    const SpinOperatorSet s = collective_spin_matrices(0.5);
    Eigen::Matrix2d sx;
    sx << 0, 0.5, 0.5, 0;
    CHECK((s.Sx - sx).norm() == 0.0);
    CHECK((reversed(s.Sz) - Eigen::Vector2d(0.5, -0.5).asDiagonal().toDenseMatrix()).norm() == 0.0);
}

TEST_CASE("spin-1 matrices from the ladder formula") {
    const SpinOperatorSet s = collective_spin_matrices(1.0);
    Eigen::Matrix3d sx;
    sx << 0, 1, 0, 1, 0, 1, 0, 1, 0;
    sx /= std::sqrt(2.0);
    CHECK((s.Sx - sx).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((reversed(s.Sz) - Eigen::Vector3d(1, 0, -1).asDiagonal().toDenseMatrix()).norm() == 0.0);
}

TEST_CASE("spin-3/2 has dimension 4 and ascending S_z") {
    const SpinOperatorSet s = collective_spin_matrices(1.5);
    REQUIRE(s.dim() == 4);
    CHECK(s.Sz.diagonal().isApprox(Eigen::Vector4d(-1.5, -0.5, 0.5, 1.5)));
}

TEST_CASE("collective_spin_matrices rejects invalid spin") {
    CHECK_THROWS_AS(collective_spin_matrices(0.0), std::invalid_argument);
    CHECK_THROWS_AS(collective_spin_matrices(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(collective_spin_matrices(0.3), std::invalid_argument);
    CHECK_THROWS_AS(collective_spin_matrices(std::nan("")), std::invalid_argument);
}

TEST_CASE("angular momentum algebra holds for S up to 6") {
    for (int twoS = 1; twoS <= 12; ++twoS) {
        CAPTURE(twoS);
        const SpinOperatorSet s = collective_spin_matrices(0.5 * twoS);
        // [S+, S-] = 2 S_z
        CHECK((s.Sp * s.Sm - s.Sm * s.Sp - 2.0 * s.Sz).cwiseAbs().maxCoeff() < 1e-12);
        // [S_x, i Y] = i S_z  <=>  S_x Y - Y S_x = S_z
        CHECK((s.Sx * s.Sy_imag - s.Sy_imag * s.Sx - s.Sz).cwiseAbs().maxCoeff() < 1e-12);
        // Casimir: S_x^2 + S_y^2 + S_z^2 = S(S+1); S_y^2 = -Y^2
        const Eigen::MatrixXd casimir = s.Sx * s.Sx - s.Sy_imag * s.Sy_imag + s.Sz * s.Sz;
        const double expected = s.S * (s.S + 1.0);
        CHECK((casimir - expected * Eigen::MatrixXd::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("basis index round trip") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int N = std::uniform_int_distribution<int>(1, 9)(rng);
        const int M = std::uniform_int_distribution<int>(0, 12)(rng);
        const BasisIndex basis(N, M);
        REQUIRE(basis.total_dim() == static_cast<std::size_t>((M + 1) * (N + 1)));
        for (std::size_t i = 0; i < basis.total_dim(); ++i) {
            const auto st = basis.state(i);
            CHECK(basis.flat(st.n, st.two_m) == i);
        }
    }
    const BasisIndex basis(3, 2);
    CHECK(basis.flat(0, -3) == 0);
    CHECK(basis.flat(1, -3) == 4);
    CHECK(basis.flat(2, 3) == 11);
    CHECK_THROWS_AS(basis.flat(0, 0), std::out_of_range);   // wrong parity for N = 3
    CHECK_THROWS_AS(basis.flat(3, 1), std::out_of_range);
    CHECK_THROWS_AS(basis.state(12), std::out_of_range);
}

TEST_CASE("free boson with idle spin is diagonal") {
    const SparseOperator H = build_full_hamiltonian({1, 1.0, 0.0, 0.0}, 2);
    REQUIRE(H.dim() == 6);
    const Eigen::MatrixXd dense = H.to_dense();
    Eigen::VectorXd expected(6);
    expected << 0, 0, 1, 1, 2, 2;
    CHECK(dense.diagonal() == expected);
    CHECK((dense - Eigen::MatrixXd(dense.diagonal().asDiagonal())).norm() == 0.0);
}

TEST_CASE("Hamiltonian dimension is (M+1)(N+1)") {
    CHECK(build_full_hamiltonian({2, 1.0, 0.1, 0.05}, 3).dim() == 12);
}

TEST_CASE("sparse Hamiltonian matches the Kronecker-product oracle") {
    const double couplings[] = {0.1, -0.37, 1.3};
    const double interactions[] = {0.0, 0.05, 0.8};
    for (int N = 1; N <= 3; ++N) {
        for (int M = 0; M <= 3; ++M) {
            for (double g : couplings) {
                for (double v : interactions) {
                    CAPTURE(N);
                    CAPTURE(M);
                    CAPTURE(g);
                    CAPTURE(v);
                    const ModelParams p{N, 1.0, g, v};
                    const Eigen::MatrixXd oracle = kronecker_hamiltonian(p, M);
                    const Eigen::MatrixXd built = build_full_hamiltonian(p, M).to_dense();
                    CHECK((built - oracle).cwiseAbs().maxCoeff() < 1e-14);
                }
            }
        }
    }
    // the worked example from the docs
    const ModelParams p{2, 1.0, 0.1, 0.05};
    CHECK((build_full_hamiltonian(p, 1).to_dense() - kronecker_hamiltonian(p, 1)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Hamiltonian is exactly symmetric with the expected block structure") {
    const ModelParams p{5, 1.3, 0.7, 0.9};
    const int M = 8;
    const SparseOperator H = build_full_hamiltonian(p, M);
    CHECK(H.is_symmetric());
    const BasisIndex basis(p.N, M);
    for (const auto& e : H.entries()) {
        const auto a = basis.state(e.row);
        const auto b = basis.state(e.col);
        const int dn = std::abs(a.n - b.n);
        const int dm = std::abs(a.two_m - b.two_m) / 2;
        const bool spin_block = dn == 0 && (dm == 0 || dm == 2);
        const bool boson_hop = dn == 1 && dm == 0;
        CHECK((spin_block || boson_hop));
    }
}

TEST_CASE("nonzero budget is enforced") {
    CHECK_THROWS_AS(build_full_hamiltonian({3, 1.0, 0.3, 1.0}, 100, 500), ResourceError);
    CHECK_THROWS_AS(build_full_hamiltonian({3, 1.0, 0.3, 1.0}, -1), std::invalid_argument);
}

TEST_CASE("model parameters are validated") {
    CHECK_THROWS_AS(build_full_hamiltonian({0, 1.0, 0.3, 1.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_full_hamiltonian({2, 0.0, 0.3, 1.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_full_hamiltonian({2, 1.0, 0.3, -1.0}, 2), std::invalid_argument);
    const ModelParams p = ModelParams::from_u(3, 2.0, 0.4, 1.0);
    CHECK(p.u() == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(p.S() == 1.5);
}

TEST_CASE("spin Hamiltonian examples") {
    SUBCASE("u = 0 leaves -S_x^2") {
        const SpinOperatorSet s = collective_spin_matrices(1.0);
        CHECK((polaron_spin_hamiltonian({2, 1.0, 0.0, 1.0}) + s.Sx * s.Sx).norm() == 0.0);
    }
    SUBCASE("N = 2, u = 0.5, v = 1") {
        const Eigen::MatrixXd H = polaron_spin_hamiltonian(ModelParams::from_u(2, 1.0, 0.5, 1.0));
        Eigen::Matrix3d expected;
        expected << -1, 0, -0.5, 0, -1, 0, -0.5, 0, -1;
        CHECK((reversed(H) - expected).cwiseAbs().maxCoeff() < 1e-15);
        const Eigen::Vector3d e = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(Eigen::Matrix3d(H)).eigenvalues();
        CHECK(e(0) == doctest::Approx(-1.5));
        CHECK(e(1) == doctest::Approx(-1.0));
        CHECK(e(2) == doctest::Approx(-0.5));
    }
    SUBCASE("N = 1 is a multiple of the identity") {
        const ModelParams p{1, 2.0, 0.9, 0.7};
        const Eigen::MatrixXd H = polaron_spin_hamiltonian(p);
        CHECK((H + 0.25 * (p.u() + p.v) * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("symmetry operator matches exp(-i pi S_x) computed by diagonalization") {
    using cd = std::complex<double>;
    for (int N = 1; N <= 6; ++N) {
        CAPTURE(N);
        const SpinOperatorSet s = collective_spin_matrices(0.5 * N);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.Sx);
        Eigen::VectorXcd phases(N + 1);
        for (int i = 0; i <= N; ++i) phases(i) = std::exp(cd(0.0, -std::acos(-1.0) * eig.eigenvalues()(i)));
        const Eigen::MatrixXcd V = eig.eigenvectors().cast<cd>();
        const Eigen::MatrixXcd oracle = V * phases.asDiagonal() * V.adjoint();

        const SymmetryOperator R = symmetry_operator({N, 1.0, 0.0, 1.0}, 0);
        const cd phase = std::pow(cd(0.0, 1.0), R.phase_quarter_turns);
        const Eigen::MatrixXcd built = phase * R.real_part.to_dense().cast<cd>();
        CHECK((built - oracle).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(R.is_real() == (N % 2 == 0));
    }
}

TEST_CASE("spin-1 rotation eigenvalues in the S_x eigenbasis") {
    const SymmetryOperator R = symmetry_operator({2, 1.0, 0.0, 1.0}, 0);
    const Eigen::MatrixXd rotation = R.real_matrix();
    const SpinOperatorSet s = collective_spin_matrices(1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.Sx);   // m_x = -1, 0, 1
    const Eigen::MatrixXd in_x = eig.eigenvectors().transpose() * rotation * eig.eigenvectors();
    CHECK(in_x(0, 0) == doctest::Approx(-1.0));
    CHECK(in_x(1, 1) == doctest::Approx(1.0));
    CHECK(in_x(2, 2) == doctest::Approx(-1.0));
    CHECK(std::abs(in_x(0, 2)) < 1e-14);
}

TEST_CASE("boson parity factor") {
    // N = 2 real factor is -flip; strip the spin part by looking at one m column.
    const SymmetryOperator R = symmetry_operator({2, 1.0, 0.0, 1.0}, 2);
    const BasisIndex basis(2, 2);
    const Eigen::MatrixXd dense = R.real_part.to_dense();
    const double expected[] = {1.0, -1.0, 1.0};
    for (int n = 0; n <= 2; ++n)
        CHECK(dense(static_cast<Eigen::Index>(basis.flat(n, 0)), static_cast<Eigen::Index>(basis.flat(n, 0))) ==
              expected[n]);
    CHECK_THROWS_AS(symmetry_operator({3, 1.0, 0.0, 1.0}, 1).real_matrix(), std::logic_error);
}
