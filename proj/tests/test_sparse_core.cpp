#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sobgnn/csr_matrix.hpp"
#include "sobgnn/errors.hpp"
#include "sobgnn/spectral.hpp"
#include "helpers.hpp"

using namespace sobgnn;
using test_helpers::dense_matmul_oracle;
using test_helpers::random_dense;
using test_helpers::random_sparse;
using test_helpers::random_weighted_adjacency;
using test_helpers::triangle_adjacency;

TEST_CASE("from_coo canonicalizes: sorted columns, duplicates summed, zeros dropped") {
    CsrMatrix m = CsrMatrix::from_coo(2, 3, {{1, 2, 4.0}, {0, 1, 1.0}, {0, 1, 2.0}, {1, 0, 0.0}});
    CHECK(m.check_canonical());
    CHECK(m.nnz() == 2);
    CHECK(m.at(0, 1) == 3.0);
    CHECK(m.at(1, 2) == 4.0);
    CHECK(m.at(1, 0) == 0.0);
    CHECK_THROWS_AS(CsrMatrix::from_coo(2, 2, {{2, 0, 1.0}}), DimensionError);
}

TEST_CASE("from_coo keeps duplicate-cancelled entries out of the pattern") {
    CsrMatrix m = CsrMatrix::from_coo(1, 1, {{0, 0, 1.0}, {0, 0, -1.0}});
    CHECK(m.nnz() == 0);
}

TEST_CASE("hadamard_product identity on pattern") {
    Rng rng(7);
    CsrMatrix a = random_sparse(6, 6, 0.4, rng);
    CsrMatrix ones = a;
    for (double& v : ones.values) v = 1.0;
    CsrMatrix prod = hadamard_product(a, ones);
    CHECK(same_pattern(prod, a));
    CHECK(prod.values == a.values);
}

TEST_CASE("hadamard_product elementwise square") {
    CsrMatrix m = CsrMatrix::from_coo(2, 2, {{0, 1, 0.5}, {1, 0, 0.5}});
    CsrMatrix sq = hadamard_product(m, m);
    CHECK(sq.at(0, 1) == 0.25);
    CHECK(sq.at(1, 0) == 0.25);
    CHECK(sq.nnz() == 2);
}

TEST_CASE("hadamard_product disjoint patterns gives empty matrix") {
    CsrMatrix a = CsrMatrix::from_coo(2, 2, {{0, 1, 1.0}});
    CsrMatrix b = CsrMatrix::from_coo(2, 2, {{1, 0, 1.0}});
    CHECK(hadamard_product(a, b).nnz() == 0);
    CHECK_THROWS_AS(hadamard_product(a, CsrMatrix::identity(3)), DimensionError);
}

TEST_CASE("hadamard_product commutes") {
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        CsrMatrix a = random_sparse(8, 8, 0.3, rng);
        CsrMatrix b = random_sparse(8, 8, 0.3, rng);
        CsrMatrix ab = hadamard_product(a, b);
        CsrMatrix ba = hadamard_product(b, a);
        CHECK(same_pattern(ab, ba));
        CHECK(ab.values == ba.values);
    }
}

TEST_CASE("hadamard_power basics") {
    CsrMatrix m = CsrMatrix::from_coo(2, 2, {{0, 1, 0.5}, {1, 0, 0.5}});
    SUBCASE("rho=1 is the identity operation") {
        CsrMatrix p = hadamard_power(m, 1);
        CHECK(same_pattern(p, m));
        CHECK(p.values == m.values);
    }
    SUBCASE("rho=3 cubes entries") {
        CsrMatrix p = hadamard_power(m, 3);
        CHECK(p.at(0, 1) == doctest::Approx(0.125).epsilon(1e-15));
    }
    SUBCASE("rho=0 rejected") { CHECK_THROWS_AS(hadamard_power(m, 0), ParameterError); }
    SUBCASE("binary adjacency is a fixed point for any rho") {
        CsrMatrix tri = triangle_adjacency();
        for (unsigned rho : {1u, 2u, 5u}) {
            CsrMatrix p = hadamard_power(tri, rho);
            CHECK(same_pattern(p, tri));
            CHECK(p.values == tri.values);
        }
    }
}

TEST_CASE("hadamard_power preserves nnz exactly for all rho") {
    Rng rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        CsrMatrix a = random_weighted_adjacency(20, 0.3, rng);
        for (unsigned rho = 1; rho <= 6; ++rho) {
            CsrMatrix p = hadamard_power(a, rho);
            CHECK(p.nnz() == a.nnz());
            CHECK(same_pattern(p, a));
        }
    }
}

TEST_CASE("add_scaled_identity") {
    SUBCASE("eps=0 on full-diagonal matrix is unchanged") {
        CsrMatrix m = CsrMatrix::from_coo(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 1, 3.0}});
        CsrMatrix r = add_scaled_identity(m, 0.0);
        CHECK(same_pattern(r, m));
        CHECK(r.values == m.values);
    }
    SUBCASE("adjacency plus identity") {
        CsrMatrix tri = triangle_adjacency();
        CsrMatrix r = add_scaled_identity(tri, 1.0);
        CHECK(r.nnz() == tri.nnz() + 3);
        for (std::size_t i = 0; i < 3; ++i) CHECK(r.at(i, i) == 1.0);
        CHECK(r.at(0, 1) == 1.0);
    }
    SUBCASE("eps=0.5 on zero matrix") {
        CsrMatrix z(2, 2);
        CsrMatrix r = add_scaled_identity(z, 0.5);
        CHECK(r.nnz() == 2);
        CHECK(r.at(0, 0) == 0.5);
        CHECK(r.at(1, 1) == 0.5);
    }
    SUBCASE("diagonal materialized even at value zero") {
        CsrMatrix m = CsrMatrix::from_coo(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
        CsrMatrix r = add_scaled_identity(m, 0.0);
        CHECK(r.nnz() == 4);  // both zero diagonal entries stored
        CHECK(r.check_canonical());
    }
    SUBCASE("non-square rejected") {
        CHECK_THROWS_AS(add_scaled_identity(CsrMatrix(2, 3), 1.0), DimensionError);
    }
}

TEST_CASE("row_sums") {
    CHECK(row_sums(triangle_adjacency()) == std::vector<double>{2.0, 2.0, 2.0});
    CHECK(row_sums(CsrMatrix(3, 3)) == std::vector<double>{0.0, 0.0, 0.0});
    CsrMatrix m = CsrMatrix::from_coo(2, 2, {{0, 1, 0.5}, {1, 0, 0.25}});
    CHECK(row_sums(m) == std::vector<double>{0.5, 0.25});
}

TEST_CASE("sym_normalize") {
    SUBCASE("triangle: off-diagonals become 1/2") {
        CsrMatrix norm = sym_normalize(triangle_adjacency());
        for (double v : norm.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("positive diagonal matrix maps to identity") {
        CsrMatrix d = CsrMatrix::from_coo(3, 3, {{0, 0, 2.0}, {1, 1, 5.0}, {2, 2, 0.25}});
        CsrMatrix norm = sym_normalize(d);
        for (std::size_t i = 0; i < 3; ++i) CHECK(norm.at(i, i) == doctest::Approx(1.0));
    }
    SUBCASE("isolated zero row stays zero and finite") {
        CsrMatrix m = CsrMatrix::from_coo(3, 3, {{0, 1, 1.0}, {1, 0, 1.0}});
        CsrMatrix norm = sym_normalize(m);
        for (double v : norm.values) CHECK(std::isfinite(v));
        CHECK(norm.at(2, 0) == 0.0);
        CHECK(norm.at(2, 2) == 0.0);
    }
    SUBCASE("negative entry rejected") {
        CsrMatrix m = CsrMatrix::from_coo(2, 2, {{0, 1, -1.0}, {1, 0, -1.0}});
        CHECK_THROWS_AS(sym_normalize(m), DomainError);
    }
    SUBCASE("spectral radius <= 1 for symmetric non-negative with positive degrees") {
        Rng rng(17);
        for (int rep = 0; rep < 5; ++rep) {
            CsrMatrix a = random_weighted_adjacency(15, 0.5, rng);
            CsrMatrix full = add_scaled_identity(a, 0.1);  // ensure positive degrees
            const Spectrum spec = sym_eigendecomposition(to_dense(sym_normalize(full)));
            CHECK(std::fabs(spec.eigenvalues.front()) <= 1.0 + 1e-12);
            CHECK(std::fabs(spec.eigenvalues.back()) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("spmm") {
    Rng rng(19);
    SUBCASE("identity and zero") {
        DenseMatrix x = random_dense(5, 3, rng);
        CHECK(max_abs_diff(spmm(CsrMatrix::identity(5), x), x) == 0.0);
        DenseMatrix z = spmm(CsrMatrix(4, 5), x);
        CHECK(max_abs(z) == 0.0);
    }
    SUBCASE("random instances match the dense oracle") {
        for (int rep = 0; rep < 20; ++rep) {
            CsrMatrix m = random_sparse(6, 6, 0.4, rng);
            DenseMatrix x = random_dense(6, 3, rng);
            DenseMatrix got = spmm(m, x);
            DenseMatrix expect = dense_matmul_oracle(to_dense(m), x);
            for (std::size_t i = 0; i < got.values.size(); ++i)
                CHECK(test_helpers::rel_err(got.values[i], expect.values[i]) <= 1e-12);
        }
    }
    SUBCASE("larger random instance at n=100") {
        CsrMatrix m = random_sparse(100, 100, 0.05, rng);
        DenseMatrix x = random_dense(100, 4, rng);
        DenseMatrix got = spmm(m, x);
        DenseMatrix expect = dense_matmul_oracle(to_dense(m), x);
        for (std::size_t i = 0; i < got.values.size(); ++i)
            CHECK(test_helpers::rel_err(got.values[i], expect.values[i]) <= 1e-12);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(spmm(CsrMatrix(3, 4), DenseMatrix(3, 2)), DimensionError);
    }
}

TEST_CASE("laplacian") {
    SUBCASE("triangle: degree 2 diagonal, -1 off-diagonal") {
        CsrMatrix l = laplacian(triangle_adjacency());
        for (std::size_t i = 0; i < 3; ++i) CHECK(l.at(i, i) == 2.0);
        CHECK(l.at(0, 1) == -1.0);
        CHECK(l.at(2, 1) == -1.0);
    }
    SUBCASE("single node without edges") {
        CsrMatrix l = laplacian(CsrMatrix(1, 1));
        CHECK(l.nnz() == 0);
        CHECK(to_dense(l)(0, 0) == 0.0);
    }
    SUBCASE("rows sum to zero") {
        Rng rng(23);
        for (int rep = 0; rep < 10; ++rep) {
            CsrMatrix a = random_weighted_adjacency(12, 0.4, rng);
            for (double s : row_sums(laplacian(a))) CHECK(std::fabs(s) <= 1e-12);
        }
    }
    SUBCASE("positive semi-definite on random graphs") {
        Rng rng(29);
        for (int rep = 0; rep < 5; ++rep) {
            CsrMatrix a = random_weighted_adjacency(10, 0.5, rng);
            const Spectrum spec = sym_eigendecomposition(to_dense(laplacian(a)));
            CHECK(spec.eigenvalues.front() >= -1e-10);
        }
    }
    SUBCASE("asymmetric input rejected") {
        CsrMatrix bad = CsrMatrix::from_coo(2, 2, {{0, 1, 1.0}});
        CHECK_THROWS_AS(laplacian(bad), DomainError);
    }
}

TEST_CASE("coo text round-trips bit-exactly") {
    Rng rng(31);
    for (int rep = 0; rep < 10; ++rep) {
        CsrMatrix m = random_sparse(7, 5, 0.4, rng);
        // awkward values: thirds, tiny magnitudes, negatives
        for (std::size_t i = 0; i < m.values.size(); ++i) {
            if (i % 3 == 0) m.values[i] = m.values[i] / 3.0;
            if (i % 5 == 0) m.values[i] *= 1e-300;
        }
        CsrMatrix back = from_coo_text(to_coo_text(m));
        REQUIRE(same_pattern(back, m));
        CHECK(back.values == m.values);  // bitwise
    }
    CHECK(from_coo_text("0 0 0\n").nnz() == 0);
}

TEST_CASE("coo text parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(from_coo_text("2 2 1\n0 zero 1.5\n"),
                         doctest::Contains("line 2"), DataError);
    CHECK_THROWS_AS(from_coo_text("2 2 3\n0 0 1.0\n"), DataError);
    CHECK_THROWS_AS(from_coo_text("2 2 1\n5 0 1.0\n"), DataError);
}

TEST_CASE("op counter tracks spmm multiply-adds") {
    Rng rng(37);
    CsrMatrix m = random_sparse(10, 10, 0.3, rng);
    DenseMatrix x = random_dense(10, 7, rng);
    OpCounter::reset();
    spmm(m, x);
    CHECK(OpCounter::get() == m.nnz() * 7);
}
