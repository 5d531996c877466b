#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "sobgnn/errors.hpp"
#include "sobgnn/sobolev_ops.hpp"
#include "sobgnn/spectral.hpp"
#include "helpers.hpp"

using namespace sobgnn;
using test_helpers::random_weighted_adjacency;
using test_helpers::triangle_adjacency;

TEST_CASE("sparse_sobolev_term with eps=1, rho=1 is the renormalized adjacency A+I") {
    CsrMatrix tri = triangle_adjacency();
    CsrMatrix term = sparse_sobolev_term(tri, 1.0, 1);
    CsrMatrix expect = add_scaled_identity(tri, 1.0);
    CHECK(same_pattern(term, expect));
    CHECK(term.values == expect.values);
}

TEST_CASE("sparse_sobolev_term eps=0 rho=2 squares entries") {
    CsrMatrix m = CsrMatrix::from_coo(2, 2, {{0, 1, 0.5}, {1, 0, 0.5}});
    CsrMatrix term = sparse_sobolev_term(m, 0.0, 2);
    CHECK(term.at(0, 1) == 0.25);
    CHECK(term.at(1, 0) == 0.25);
    CHECK(term.at(0, 0) == 0.0);  // diagonal materialized at zero
    CHECK(term.nnz() == 4);
}

TEST_CASE("sparse_sobolev_term rho=2 matches the dense elementwise-square oracle") {
    Rng rng(59);
    for (int rep = 0; rep < 10; ++rep) {
        CsrMatrix a = random_weighted_adjacency(15, 0.3, rng);
        const double eps = rng.uniform(0.0, 2.0);
        DenseMatrix dense = to_dense(a);
        for (std::size_t i = 0; i < dense.n_rows; ++i) dense(i, i) += eps;
        for (double& v : dense.values) v = v * v;
        CHECK(max_abs_diff(to_dense(sparse_sobolev_term(a, eps, 2)), dense) <= 1e-15);
    }
}

TEST_CASE("sobolev_laplacian_term") {
    CsrMatrix l = laplacian(triangle_adjacency());
    SUBCASE("eps=0 rho=1 is L itself") {
        CsrMatrix term = sobolev_laplacian_term(l, 0.0, 1);
        CHECK(max_abs_diff(to_dense(term), to_dense(l)) == 0.0);
    }
    SUBCASE("triangle, eps=0, rho=2: diagonal 4, off-diagonal 1") {
        CsrMatrix term = sobolev_laplacian_term(l, 0.0, 2);
        for (std::size_t i = 0; i < 3; ++i) CHECK(term.at(i, i) == 4.0);
        CHECK(term.at(0, 1) == 1.0);
        CHECK(term.at(2, 0) == 1.0);
    }
    SUBCASE("pattern unchanged for all rho") {
        CsrMatrix base = sobolev_laplacian_term(l, 0.5, 1);
        for (unsigned rho = 2; rho <= 5; ++rho)
            CHECK(same_pattern(sobolev_laplacian_term(l, 0.5, rho), base));
    }
}

TEST_CASE("build_cascade alpha=1 eps=1 equals the GCN operator (dense oracle)") {
    Rng rng(61);
    for (int rep = 0; rep < 5; ++rep) {
        CsrMatrix a = random_weighted_adjacency(12, 0.4, rng);
        SobolevCascade cascade = build_cascade(a, 1.0, 1);

        // independent dense route: A~ = A + I, D~ from row sums, D~^{-1/2} A~ D~^{-1/2}
        DenseMatrix at = to_dense(a);
        for (std::size_t i = 0; i < at.n_rows; ++i) at(i, i) += 1.0;
        std::vector<double> deg(at.n_rows, 0.0);
        for (std::size_t i = 0; i < at.n_rows; ++i)
            for (std::size_t j = 0; j < at.n_cols; ++j) deg[i] += at(i, j);
        DenseMatrix expect(at.n_rows, at.n_cols);
        for (std::size_t i = 0; i < at.n_rows; ++i)
            for (std::size_t j = 0; j < at.n_cols; ++j)
                expect(i, j) = at(i, j) / std::sqrt(deg[i] * deg[j]);

        DenseMatrix got = to_dense(cascade.op(1));
        for (std::size_t i = 0; i < got.values.size(); ++i)
            CHECK(test_helpers::rel_err(got.values[i], expect.values[i]) <= 1e-14);
    }
}

TEST_CASE("constant weights: normalization cancels the constant so rho=2 equals rho=1") {
    CsrMatrix a = triangle_adjacency();
    for (double& v : a.values) v = 0.5;
    SobolevCascade cascade = build_cascade(a, 0.0, 2);
    CHECK(same_pattern(cascade.op(1), cascade.op(2)));
    CHECK(max_abs_diff(to_dense(cascade.op(1)), to_dense(cascade.op(2))) <= 1e-15);
}

TEST_CASE("cascade nnz identical across rho") {
    Rng rng(67);
    CsrMatrix a = random_weighted_adjacency(25, 0.25, rng);
    for (double eps : {0.0, 0.5, 1.0}) {
        SobolevCascade cascade = build_cascade(a, eps, 6);
        const std::size_t base_nnz = add_scaled_identity(a, eps).nnz();
        for (unsigned rho = 1; rho <= 6; ++rho) CHECK(cascade.op(rho).nnz() == base_nnz);
    }
}

TEST_CASE("degenerate cascade names the offending rho") {
    CsrMatrix a = CsrMatrix::from_coo(2, 2, {{0, 1, 1e-200}, {1, 0, 1e-200}});
    CHECK_THROWS_WITH_AS(build_cascade(a, 0.0, 3), doctest::Contains("rho=2"), NumericalError);
    CHECK_NOTHROW(build_cascade(a, 0.0, 1));
}

TEST_CASE("(L+eps I)^(rho) positive definite for eps > 0") {
    Rng rng(71);
    for (int rep = 0; rep < 5; ++rep) {
        CsrMatrix l = laplacian(random_weighted_adjacency(15, 0.4, rng));
        for (double eps : {0.5, 1.0}) {
            for (unsigned rho = 1; rho <= 4; ++rho) {
                const Spectrum spec =
                    sym_eigendecomposition(to_dense(sobolev_laplacian_term(l, eps, rho)));
                CHECK(spec.eigenvalues.front() > 0.0);
            }
        }
    }
}

TEST_CASE("(A_N + eps I)^(rho) positive definite for eps > 1") {
    Rng rng(73);
    for (int rep = 0; rep < 5; ++rep) {
        CsrMatrix a = random_weighted_adjacency(15, 0.4, rng);
        CsrMatrix a_full = add_scaled_identity(a, 0.05);  // keep degrees positive
        CsrMatrix a_norm = sym_normalize(a_full);
        for (double eps : {1.1, 2.0}) {
            for (unsigned rho = 1; rho <= 4; ++rho) {
                const Spectrum spec =
                    sym_eigendecomposition(to_dense(sparse_sobolev_term(a_norm, eps, rho)));
                CHECK(spec.eigenvalues.front() > 0.0);
            }
        }
    }
}

TEST_CASE("cascade cache round-trips through disk") {
    Rng rng(79);
    CsrMatrix a = random_weighted_adjacency(10, 0.5, rng);
    SobolevCascade cascade = build_cascade(a, 1.5, 3);
    const std::string path = (std::filesystem::temp_directory_path() / "sobgnn_cascade_test.coo").string();
    save_cascade(cascade, path);
    SobolevCascade loaded = load_cascade(path);
    CHECK(loaded.eps == cascade.eps);
    CHECK(loaded.alpha == cascade.alpha);
    REQUIRE(loaded.operators.size() == 3);
    for (unsigned rho = 1; rho <= 3; ++rho) {
        CHECK(same_pattern(loaded.op(rho), cascade.op(rho)));
        CHECK(loaded.op(rho).values == cascade.op(rho).values);
    }
    std::filesystem::remove(path);
    std::filesystem::remove(path + ".meta.json");
}
