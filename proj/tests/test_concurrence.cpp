#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kpe/concurrence.hpp"
#include "kpe/families.hpp"
#include "kpe/pisym.hpp"
#include "test_helpers.hpp"

using namespace kpe;

TEST_CASE("block concurrence on reference states") {
    CHECK(block_concurrence(ghz_state(3), QubitSubset::of({1})) ==
          doctest::Approx(1.0).epsilon(1e-12));

    const PureState zeros = product_basis_state("000");
    CHECK(block_concurrence(zeros, QubitSubset::of({2})) == doctest::Approx(0.0));

    // W3 against {1,2}: reduced purity 5/9, cross-checked with the dense oracle.
    const PureState w3 = w_state(3);
    const Eigen::MatrixXcd red =
        oracle::partial_trace(density_from_pure(w3).entries, 3, {1, 2});
    const double pur = (red * red).trace().real();
    CHECK(pur == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
    CHECK(block_concurrence(w3, QubitSubset::of({1, 2})) ==
          doctest::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-12));
}

TEST_CASE("block must be a proper nonempty subset") {
    CHECK_THROWS_AS(block_concurrence(ghz_state(3), QubitSubset{}), validation_error);
    CHECK_THROWS_AS(block_concurrence(ghz_state(3), QubitSubset::of({1, 2, 3})),
                    validation_error);
}

TEST_CASE("measure of GHZ is 1 for every admissible k") {
    for (int n = 2; n <= 6; ++n)
        for (int k = 1; k <= n - 1; ++k) {
            const auto res = ek_pure(ghz_state(n), k);
            CHECK(res.value == doctest::Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("measure vanishes on product states with the all-singleton argmin") {
    for (int n = 2; n <= 5; ++n)
        for (int k = 1; k <= n - 1; ++k) {
            const auto res = ek_pure(product_basis_state(std::string(n, '0')), k);
            CHECK(res.value == doctest::Approx(0.0));
            CHECK(res.argmin_partition.block_count() == n);
        }
}

TEST_CASE("W state values") {
    const auto w3 = ek_pure(w_state(3), 1);
    CHECK(w3.value == doctest::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-12));
    CHECK(w3.argmin_partition.render() == "{1}|{2}|{3}");

    const auto w6 = ek_pure(w_state(6), 3);
    CHECK(w6.value == doctest::Approx(2.0 * std::sqrt(5.0) / 6.0).epsilon(1e-12));
    CHECK(w6.value == doctest::Approx(oracle::ek_pure(w_state(6), 3)).epsilon(1e-12));
}

TEST_CASE("agrees with the brute-force oracle on random states") {
    Rng rng(101);
    for (int trial = 0; trial < 8; ++trial) {
        const PureState psi = haar_random_pure(4, rng);
        for (int k = 1; k <= 3; ++k)
            CHECK(ek_pure(psi, k).value ==
                  doctest::Approx(oracle::ek_pure(psi, k)).epsilon(1e-12));
    }
}

TEST_CASE("result invariants hold") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const PureState psi = haar_random_pure(4, rng);
        const auto res = ek_pure(psi, 2);
        double mean = 0.0;
        for (double c : res.per_block_concurrence) mean += c;
        mean /= static_cast<double>(res.per_block_concurrence.size());
        CHECK(std::abs(mean - res.value) < 1e-12);
        CHECK(res.value >= 0.0);
        CHECK(res.value <= std::sqrt(2.0) + 1e-12);
        CHECK(res.per_block_concurrence.size() ==
              static_cast<std::size_t>(res.argmin_partition.block_count()));
    }
}

TEST_CASE("invariant under local unitaries") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_u64() % 2);
        const int k = 1 + static_cast<int>(rng.next_u64() % (n - 1));
        const PureState psi = haar_random_pure(n, rng);
        PureState rotated = psi;
        for (int q = 1; q <= n; ++q)
            rotated = apply_single_qubit(rotated, q, haar_unitary(2, rng));
        CHECK(std::abs(ek_pure(psi, k).value - ek_pure(rotated, k).value) < 1e-10);
    }
}

TEST_CASE("covariant under qubit permutations") {
    Rng rng(19);
    for (int n : {3, 4}) {
        const PureState psi = haar_random_pure(n, rng);
        for (int k = 1; k <= n - 1; ++k) {
            const double base = ek_pure(psi, k).value;
            for (const auto& perm : testutil::all_permutations(n))
                CHECK(std::abs(ek_pure(permute_qubits(psi, perm), k).value - base) < 1e-10);
        }
    }
}

TEST_CASE("monotone nonincreasing in k") {
    Rng rng(31);
    for (int n = 3; n <= 6; ++n) {
        const PureState psi = haar_random_pure(n, rng);
        double prev = ek_pure(psi, 1).value;
        for (int k = 2; k <= n - 1; ++k) {
            const double cur = ek_pure(psi, k).value;
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("subadditive on pure products") {
    Rng rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        const PureState a = haar_random_pure(2, rng);
        const PureState b = haar_random_pure(trial % 2 == 0 ? 2 : 3, rng);
        const PureState ab = tensor_product(a, b);
        const int k = 1;
        CHECK(ek_pure(ab, k).value <=
              ek_pure(a, k).value + ek_pure(b, k).value + 1e-10);
    }
}

TEST_CASE("vanishes on constructed producible states, positive on GHZ and W") {
    Rng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_u64() % 3);
        const int k = 1 + static_cast<int>(rng.next_u64() % (n - 1));
        const PureState psi = random_k_producible_pure(n, k, rng);
        CHECK(ek_pure(psi, k).value <= 1e-9);
    }
    for (int n = 3; n <= 6; ++n)
        for (int k = 1; k <= n - 1; ++k) {
            CHECK(ek_pure(ghz_state(n), k).value > 1e-6);
            CHECK(ek_pure(w_state(n), k).value > 1e-6);
        }
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(ek_pure(ghz_state(3), 0), std::invalid_argument);
    CHECK_THROWS_AS(ek_pure(ghz_state(3), 3), std::invalid_argument);
}
