#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lel/dynamics.hpp"
#include "oracles.hpp"

using namespace lel;
using Mat = CMatrix<double>;
using std::numbers::pi;

namespace {

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("yukawa_fourier values") {
  CHECK(yukawa_fourier(0.0, 1.0, 1.0) == doctest::Approx(4 * pi).epsilon(1e-15));
  CHECK(yukawa_fourier(std::array<double, 3>{1, 1, 1}, 2.0, 1.0) ==
        doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK(yukawa_fourier(0.0, 1.0, 2.0) == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK_THROWS_AS(yukawa_fourier(0.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(yukawa_fourier(0.0, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("build_hamiltonian") {
  const MomentumBasis basis = build_basis(1, 1.0);
  const auto free = build_hamiltonian(basis, 0.0, 1.0);
  CHECK(free.v.isZero(0.0));
  CHECK(free.full() == free.free());

  const auto h = build_hamiltonian(basis, 1.0, 1.0);
  for (Index i = 0; i < 27; ++i) {
    CHECK(h.v(i, i).real() == doctest::Approx(4 * pi));
    CHECK(h.h0(i) == basis.energies()[std::size_t(i)]);
  }
  const Index o = Index(basis.index_of({0, 0, 0}));
  const Index x = Index(basis.index_of({1, 0, 0}));
  CHECK(h.v(o, x).real() == doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK(hermiticity_defect(h.v) == 0.0);
  CHECK(h.v.imag().isZero(0.0));
}

TEST_CASE("evolve: identities and the 2x2 closed form") {
  std::mt19937_64 rng(3);
  const auto rho = random_density_matrix<double>(5, 2, rng);
  const Mat h = random_hermitian<double>(5, rng);
  CHECK(max_abs(evolve(rho, h, 0.0).matrix() - rho.matrix()) < 1e-14);

  // rho diagonal in the eigenbasis of H is stationary.
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Eigen::VectorXcd w(5);
  w << 0.4, 0.3, 0.2, 0.1, 0.0;
  const DensityMatrix<double> stat(Mat(es.eigenvectors() * w.asDiagonal() *
                                       es.eigenvectors().adjoint()));
  for (double t : {0.3, 2.0, 17.0}) {
    CHECK(max_abs(evolve(stat, h, t).matrix() - stat.matrix()) < 1e-12);
  }

  Mat h2(2, 2);
  h2 << 0, 1, 1, 0;
  Mat r0 = Mat::Zero(2, 2);
  r0(0, 0) = 1.0;
  const auto r = evolve(DensityMatrix<double>(r0), h2, pi / 4);
  CHECK(r(0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
  for (double t : {0.1, 0.7, 2.9}) {
    const auto rt = evolve(DensityMatrix<double>(r0), h2, t);
    CHECK(std::abs(rt(0, 0) - std::cos(t) * std::cos(t)) < 1e-14);
    CHECK(std::abs(rt(0, 1) - std::complex<double>(0, std::sin(t) * std::cos(t))) < 1e-14);
  }
}

TEST_CASE("evolve agrees with a Taylor-series unitary") {
  std::mt19937_64 rng(8);
  for (int c = 0; c < 10; ++c) {
    const auto rho = random_density_matrix<double>(6, 3, rng);
    const Mat h = random_hermitian<double>(6, rng);
    const double t = 0.37 * (c + 1);
    CHECK(max_abs(evolve(rho, h, t).matrix() - oracle::conjugate_by_taylor(h, rho.matrix(), t)) <
          1e-10);
  }
}

TEST_CASE("unitarity suite and group law") {
  const MomentumBasis basis = build_basis(1, 1.0);
  std::mt19937_64 rng(11);
  for (int c = 0; c < 20; ++c) {
    const auto rho = random_density_matrix<double>(27, 1 + c % 5, rng);
    const auto h = build_hamiltonian(basis, 0.05 * c, 1.0);
    const Propagator<double> prop(h);
    const double t1 = 0.13 * c, t2 = 0.71;
    const auto rt = prop.evolve(rho, t1);  // validated on construction
    CHECK(std::abs(global_purity(rt) - global_purity(rho)) <= 1e-10);
    const Mat u = prop.unitary(t1);
    CHECK(max_abs(u * u.adjoint() - Mat::Identity(27, 27)) < 1e-10);
    CHECK(max_abs(prop.evolve(rt, t2).matrix() - prop.evolve(rho, t1 + t2).matrix()) <= 1e-9);
  }
}

TEST_CASE("liouvillian superoperator") {
  SUBCASE("diagonal H multiplies rho_ij by E_i - E_j") {
    Mat h = Mat::Zero(3, 3);
    h.diagonal() << 0.5, -1.0, 2.0;
    const auto l = liouvillian_superoperator(h);
    for (Index j = 0; j < 3; ++j)
      for (Index i = 0; i < 3; ++i) {
        const Index r = i + 3 * j;
        CHECK(l.matrix(r, r) == h(i, i) - h(j, j));
        CHECK(std::abs(l.matrix.row(r).sum() - l.matrix(r, r)) == 0.0);
      }
  }
  SUBCASE("identity gives zero") {
    CHECK(liouvillian_superoperator<double>(Mat::Identity(4, 4)).matrix.isZero(0.0));
  }
  SUBCASE("action equals the commutator; spectrum is real") {
    std::mt19937_64 rng(4);
    const Mat h = random_hermitian<double>(5, rng);
    const auto l = liouvillian_superoperator(h);
    const Mat x = random_hermitian<double>(5, rng) + std::complex<double>(0, 1) * h;
    CHECK(max_abs(l.apply(x) - (h * x - x * h)) < 1e-10);
    CHECK(hermiticity_defect(l.matrix) < 1e-12);
    Eigen::ComplexEigenSolver<Mat> ces(l.matrix);
    CHECK(ces.eigenvalues().imag().cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("random dim-4 exponential matches conjugation (seed 7)") {
    std::mt19937_64 rng(7);
    const Mat h = random_hermitian<double>(4, rng);
    const auto rho = random_density_matrix<double>(4, 4, rng);
    const auto l = liouvillian_superoperator(h);
    for (double t : {0.2, 1.0, 3.3}) {
      const Mat via_super = superoperator_propagate(l, rho.matrix(), t);
      CHECK(max_abs(via_super - evolve(rho, h, t).matrix()) <= 1e-9);
      const Eigen::VectorXcd taylor =
          oracle::taylor_exp(std::complex<double>(0, -t) * l.matrix) * vectorize<double>(rho.matrix());
      CHECK(max_abs(unvectorize<double>(taylor, 4) - via_super) <= 1e-9);
    }
  }
  SUBCASE("dimension cap") {
    CHECK_THROWS_AS(liouvillian_superoperator<double>(Mat::Identity(65, 65)), DimensionCapError);
    CHECK_THROWS_AS(liouvillian_superoperator<double>(Mat::Identity(9, 9), 8), DimensionCapError);
  }
}

TEST_CASE("L = L0 + L_I exactly") {
  const MomentumBasis basis = build_basis(1, 1.0);
  const auto h = build_hamiltonian(basis, 0.7, 1.3);
  const auto l = liouvillian_superoperator(h);
  const auto l0 = liouvillian_superoperator<double>(h.free());
  const auto li = liouvillian_superoperator<double>(h.v);
  CHECK(max_abs(l.matrix - (l0.matrix + li.matrix)) <= 1e-13);
}

TEST_CASE("interaction_liouvillian_element") {
  const MomentumBasis basis = build_basis(1, 1.0);
  const double a = 1.0, mu = 1.0;
  CHECK(interaction_liouvillian_element(basis, 4, 4, 4, 4, a, mu) == 0.0);
  // i1 = i3, i2 != i4: only V~(k2 - k4) survives with a plus sign.
  const auto i2 = basis.index_of({0, 0, 0});
  const auto i4 = basis.index_of({1, 1, 0});
  CHECK(interaction_liouvillian_element(basis, 5, i2, 5, i4, a, mu) ==
        doctest::Approx(4 * pi / 3).epsilon(1e-15));
  CHECK(interaction_liouvillian_element(basis, 1, 2, 3, 4, a, mu) == 0.0);
  CHECK_THROWS_AS(interaction_liouvillian_element(basis, 27, 0, 0, 0, a, mu), std::out_of_range);

  // Assembled over all quadruples: minus the commutator map with V, entrywise.
  const Mat assembled = interaction_liouvillian(basis, 0.3, 0.8);
  const auto h = build_hamiltonian(basis, 0.3, 0.8);
  const Mat comm = liouvillian_superoperator<double>(h.v).matrix;
  CHECK(max_abs(assembled + comm) == 0.0);
}

TEST_CASE("alpha diagonality") {
  const MomentumBasis basis = build_basis(1, 1.0);
  const auto h = build_hamiltonian(basis, 1.0, 1.0);
  const Mat l0 = liouvillian_superoperator<double>(h.free()).matrix;
  const Mat li = interaction_liouvillian(basis, 1.0, 1.0);
  CHECK(alpha_diagonality_test(l0, basis, 1e-10));
  CHECK_FALSE(alpha_diagonality_test(li, basis, 1e-10));
  CHECK(alpha_offdiagonal_norm(li, basis) >= 1e-3 * li.norm());

  // A V commuting with H0 keeps every alpha sector closed.
  std::mt19937_64 rng(1);
  Mat vdiag = Mat::Zero(27, 27);
  for (Index i = 0; i < 27; ++i) vdiag(i, i) = std::normal_distribution<double>()(rng);
  CHECK(alpha_diagonality_test(liouvillian_superoperator<double>(vdiag).matrix, basis, 1e-10));
}

TEST_CASE("first-order reduced step") {
  const MomentumBasis basis = build_basis(1, 1.0);
  std::mt19937_64 rng(21);
  const std::vector<std::size_t> shells{1, 2};
  const std::vector<CVector<double>> vecs{random_shell_vector<double>(basis, 1, rng),
                                          random_shell_vector<double>(basis, 2, rng)};
  Mat mu(2, 2);
  mu << 0.5, 0.25, 0.25, 0.5;
  const auto rho0 = appendix_a_state<double>(basis, shells, vecs, mu);
  const Mat hat0 = assemble(reduce(rho0, basis), basis);

  const auto h = build_hamiltonian(basis, 0.05, 1.0);
  CHECK(max_abs(assemble(first_order_reduced_step(rho0, h, basis, 0.0), basis) - hat0) == 0.0);

  const auto free = build_hamiltonian(basis, 0.0, 1.0);
  for (double t : {0.1, 1.0, 10.0}) {
    CHECK(max_abs(assemble(first_order_reduced_step(rho0, free, basis, t), basis) - hat0) == 0.0);
  }

  // Error against exact evolution scales as t^2.
  std::vector<double> lt, le;
  for (double t : {0.01, 0.02, 0.04}) {
    const Mat exact = assemble(reduce(evolve(rho0, h, t), basis), basis);
    const Mat approx = assemble(first_order_reduced_step(rho0, h, basis, t), basis);
    lt.push_back(std::log(t));
    le.push_back(std::log((exact - approx).norm()));
  }
  const double slope = ((le[1] - le[0]) / (lt[1] - lt[0]) + (le[2] - le[1]) / (lt[2] - lt[1])) / 2;
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
}
