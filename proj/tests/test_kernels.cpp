#include "swrhc/band_lu.hpp"
#include "swrhc/error.hpp"
#include "swrhc/fem.hpp"
#include "swrhc/kernels.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace swrhc;
using swrhc::testing::random_vector;

namespace {

std::vector<const kernels::KernelTable*> variants() {
    std::vector<const kernels::KernelTable*> v{&kernels::scalar_table()};
    if (const auto* simd = kernels::avx2_table()) v.push_back(simd);
    return v;
}

} // namespace

TEST_CASE("kernel variants agree with the scalar reference") {
    std::mt19937_64 rng(7);
    const auto& ref = kernels::scalar_table();
    INFO("active ISA: " << kernels::isa_name(kernels::active().isa));
    for (const auto* table : variants()) {
        for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 33u, 67u, 1089u}) {
            const auto x = random_vector(n, rng);
            const auto y = random_vector(n, rng);
            double scale = 0.0;
            for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y[i]);
            CHECK(std::abs(table->dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <=
                  1e-14 * (scale + 1.0));

            auto y1 = y, y2 = y;
            table->axpy(-0.37, x.data(), y1.data(), n);
            ref.axpy(-0.37, x.data(), y2.data(), n);
            CHECK(swrhc::testing::max_abs_diff(y1, y2) <= 1e-15);

            std::vector<double> z1(n), z2(n);
            table->lincomb(1.5, x.data(), -2.25, y.data(), z1.data(), n);
            ref.lincomb(1.5, x.data(), -2.25, y.data(), z2.data(), n);
            CHECK(swrhc::testing::max_abs_diff(z1, z2) <= 1e-15);
        }
    }
}

TEST_CASE("CSR products agree across kernel variants") {
    const Mesh mesh = build_mesh(9);
    const CsrMatrix c = assemble_reaction_convection(mesh, unstable_coefficients(), 0.3);
    std::mt19937_64 rng(11);
    const auto x = random_vector(mesh.num_nodes(), rng);
    const auto& p = c.pattern();
    std::vector<double> ref(x.size());
    kernels::scalar_table().csr_spmv(p.size(), p.row_ptr().data(), p.cols().data(), c.values().data(), x.data(),
                                     ref.data());
    for (const auto* table : variants()) {
        std::vector<double> y(x.size());
        table->csr_spmv(p.size(), p.row_ptr().data(), p.cols().data(), c.values().data(), x.data(), y.data());
        CHECK(swrhc::testing::max_abs_diff(y, ref) <= 1e-15);
    }
    // dense reference
    const auto dense = c.to_dense();
    for (std::size_t i = 0; i < x.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += dense[i * x.size() + j] * x[j];
        CHECK(ref[i] == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("sparsity pattern is symmetric with stored diagonal and transposes by permutation") {
    const Mesh mesh = build_mesh(4);
    const auto pattern = make_pattern(mesh);
    CHECK(pattern->half_bandwidth() == 4 + 2);
    for (std::size_t i = 0; i < pattern->size(); ++i) CHECK(pattern->find(i, i) < pattern->nnz());
    const CsrMatrix c = assemble_reaction_convection(mesh, unstable_coefficients(), 1.0, pattern);
    const CsrMatrix ct = c.transposed();
    for (std::size_t i = 0; i < pattern->size(); ++i) {
        for (std::size_t j = 0; j < pattern->size(); ++j) CHECK(ct.at(i, j) == c.at(j, i));
    }
}

TEST_CASE("band LU matches dense elimination for solve and transpose solve") {
    const Mesh mesh = build_mesh(6);
    const OperatorSet ops(mesh, 0.1, unstable_coefficients());
    const CsrMatrix lhs = lincomb(200.0, ops.mass(), 0.5, ops.spatial_operator(0.7));
    const BandLu lu(lhs);
    std::mt19937_64 rng(3);
    const auto b = random_vector(mesh.num_nodes(), rng);

    std::vector<double> x(b.size());
    lu.solve(b, x);
    const auto ref = swrhc::testing::dense_solve(lhs.to_dense(), b);
    CHECK(swrhc::testing::max_abs_diff(x, ref) <= 1e-10 * swrhc::testing::max_abs(ref));

    std::vector<double> xt(b.size());
    lu.solve_transpose(b, xt);
    const auto ref_t = swrhc::testing::dense_solve(lhs.transposed().to_dense(), b);
    CHECK(swrhc::testing::max_abs_diff(xt, ref_t) <= 1e-10 * swrhc::testing::max_abs(ref_t));

    // in-place
    std::vector<double> inplace = b;
    lu.solve(inplace, inplace);
    CHECK(swrhc::testing::max_abs_diff(inplace, x) == 0.0);
}

TEST_CASE("band LU reports a singular matrix") {
    const Mesh mesh = build_mesh(3);
    const CsrMatrix k = assemble_stiffness(mesh);
    CsrMatrix zero(k.shared_pattern());
    CHECK_THROWS_AS(BandLu{zero}, NumericalFailure);
}
