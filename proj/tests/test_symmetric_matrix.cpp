#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "precmat/csv.hpp"
#include "precmat/symmetric_matrix.hpp"
#include "oracles.hpp"

using namespace precmat;
using Catch::Approx;

namespace {
std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("construction symmetrizes and validates", "[matrix]") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.3, 0.1, 2.0;
  SymmetricMatrix s(a);
  CHECK(s(0, 1) == Approx(0.2));
  CHECK(s(1, 0) == Approx(0.2));

  CHECK_THROWS_AS(SymmetricMatrix(Eigen::MatrixXd::Zero(2, 3)), InputError);
  CHECK_THROWS_AS(SymmetricMatrix(Eigen::MatrixXd()), InputError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SymmetricMatrix(bad), InputError);
}

TEST_CASE("eigendecomposition on fixed matrices", "[matrix]") {
  SECTION("identity") {
    auto d = eigendecompose(SymmetricMatrix::identity(3));
    for (int i = 0; i < 3; ++i) CHECK(d.values(i) == Approx(1.0));
    CHECK((d.reconstruct() - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
  }
  SECTION("diag(3,-1)") {
    Eigen::MatrixXd a = Eigen::Vector2d(3.0, -1.0).asDiagonal();
    auto d = eigendecompose(SymmetricMatrix(a));
    CHECK(d.values(0) == Approx(3.0));
    CHECK(d.values(1) == Approx(-1.0));
  }
}

TEST_CASE("eigendecomposition reconstruction and orthonormality", "[matrix]") {
  Rng rng(7);
  for (int m : {2, 5, 50, 500}) {
    SymmetricMatrix s(oracle::random_symmetric(m, rng));
    auto d = eigendecompose(s);
    double scale = std::max(1.0, s.mat().norm());
    CHECK((d.reconstruct() - s.mat()).norm() <= default_tolerances().reconstruction * scale);
    CHECK((d.vectors.transpose() * d.vectors - Eigen::MatrixXd::Identity(m, m))
              .cwiseAbs()
              .maxCoeff() <= 1e-10 * m);
    for (int i = 0; i + 1 < m; ++i) CHECK(d.values(i) >= d.values(i + 1));
  }
}

TEST_CASE("psd projection", "[matrix]") {
  SECTION("psd input unchanged") {
    Rng rng(3);
    SymmetricMatrix s(oracle::random_pd(5, rng));
    CHECK((psd_project_frobenius(s).mat() - s.mat()).norm() < 1e-14);
  }
  SECTION("diag(1,-0.2) clips to diag(1,0)") {
    Eigen::MatrixXd a = Eigen::Vector2d(1.0, -0.2).asDiagonal();
    Eigen::MatrixXd p = psd_project_frobenius(SymmetricMatrix(a)).mat();
    CHECK(p(0, 0) == Approx(1.0));
    CHECK(p(1, 1) == Approx(0.0).margin(1e-14));
    CHECK(p(0, 1) == Approx(0.0).margin(1e-14));
  }
  SECTION("random indefinite: feasible, idempotent, locally nearest") {
    Rng rng(11);
    SymmetricMatrix s(oracle::random_symmetric(6, rng, 1.5));
    SymmetricMatrix p = psd_project_frobenius(s);
    Eigen::VectorXd ev = eigenvalues(p);
    CHECK(ev(5) >= -1e-10);
    CHECK((psd_project_frobenius(p).mat() - p.mat()).norm() < 1e-12);
    // No nearby PSD point may be closer to s: sample feasible perturbations.
    double base = (p.mat() - s.mat()).norm();
    for (int k = 0; k < 40; ++k) {
      Eigen::MatrixXd q =
          psd_project_frobenius(SymmetricMatrix(p.mat() + 1e-2 * oracle::random_symmetric(6, rng)))
              .mat();
      CHECK((q - s.mat()).norm() >= base - 1e-9);
    }
  }
}

TEST_CASE("norms", "[matrix]") {
  SECTION("identity 2x2") {
    MatrixNorms n = norms(SymmetricMatrix::identity(2));
    CHECK(n.frobenius == Approx(std::sqrt(2.0)));
    CHECK(n.spectral == Approx(1.0));
    CHECK(n.nuclear == Approx(2.0));
    CHECK(n.linf_elementwise == Approx(1.0));
    CHECK(n.l1_elementwise == Approx(2.0));
  }
  SECTION("diag(3,-1)") {
    Eigen::MatrixXd a = Eigen::Vector2d(3.0, -1.0).asDiagonal();
    MatrixNorms n = norms(SymmetricMatrix(a));
    CHECK(n.spectral == Approx(3.0));
    CHECK(n.nuclear == Approx(4.0));
    CHECK(n.frobenius == Approx(std::sqrt(10.0)));
  }
  SECTION("ordering spectral <= frobenius <= nuclear") {
    Rng rng(5);
    for (int k = 0; k < 10; ++k) {
      MatrixNorms n = norms(SymmetricMatrix(oracle::random_symmetric(7, rng)));
      CHECK(n.spectral <= n.frobenius + 1e-12);
      CHECK(n.frobenius <= n.nuclear + 1e-12);
    }
  }
}

TEST_CASE("pd inverse and psd sqrt", "[matrix]") {
  Rng rng(9);
  SymmetricMatrix s(oracle::random_pd(6, rng));
  CHECK((sym_inverse_pd(s).mat() * s.mat() - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-9);
  SymmetricMatrix r = sym_sqrt_psd(s);
  CHECK((r.mat() * r.mat() - s.mat()).norm() < 1e-9);
  Eigen::MatrixXd neg = Eigen::Vector2d(1.0, -0.5).asDiagonal();
  CHECK_THROWS_AS(sym_sqrt_psd(SymmetricMatrix(neg)), NumericalError);
  CHECK_THROWS_AS(sym_inverse_pd(SymmetricMatrix(Eigen::MatrixXd::Zero(2, 2))), NumericalError);
}

TEST_CASE("matrix csv round trip", "[matrix]") {
  Rng rng(21);
  Eigen::MatrixXd a = oracle::random_symmetric(4, rng);
  std::string path = tmp_path("precmat_mat_rt.csv");
  write_matrix_csv(path, a);
  SymmetricMatrix back = read_symmetric_csv(path);
  CHECK((back.mat() - a).cwiseAbs().maxCoeff() == 0.0);  // %.17g is lossless
  std::remove(path.c_str());
}

TEST_CASE("matrix csv validation", "[matrix]") {
  std::string path = tmp_path("precmat_mat_bad.csv");
  {
    std::ofstream out(path);
    out << "1.0,0.5\n0.2,1.0\n";  // asymmetric beyond 1e-8
  }
  CHECK_THROWS_AS(read_symmetric_csv(path), InputError);
  {
    std::ofstream out(path);
    out << "1.0,0.5\n0.5,1.0\n";
  }
  CHECK_NOTHROW(read_symmetric_csv(path));
  {
    std::ofstream out(path);
    out << "a,b\n1.0,0.5\n0.5,1.0\n";  // header handled only when asked for
  }
  CHECK_THROWS_AS(read_symmetric_csv(path), InputError);
  CHECK_NOTHROW(read_symmetric_csv(path, /*header=*/true));
  {
    std::ofstream out(path);
    out << "1.0,oops\n0.5,1.0\n";
  }
  CHECK_THROWS_WITH(read_symmetric_csv(path), Catch::Matchers::ContainsSubstring("row 1"));
  std::remove(path.c_str());
}

TEST_CASE("table csv with NA cells", "[matrix]") {
  std::string path = tmp_path("precmat_table.csv");
  {
    std::ofstream out(path);
    out << "1.5,NA,2\n,0.25,-1\n";
  }
  Table t = read_table(path);
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  CHECK_FALSE(t.observed(0, 1));
  CHECK_FALSE(t.observed(1, 0));
  CHECK(t.values(0, 1) == 0.0);
  CHECK(t.values(1, 1) == Approx(0.25));
  std::remove(path.c_str());
}
