#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "dcmm/kernels.hpp"

using namespace dcmm::kernels;

namespace {

std::vector<Isa> available() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
    if (supported(isa)) out.push_back(isa);
  return out;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double close_tol(double ref, std::size_t n) { return 1e-14 * (1.0 + std::fabs(ref)) * static_cast<double>(n + 1); }

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(supported(Isa::scalar));
  CHECK(table(Isa::scalar).isa == Isa::scalar);
  CHECK(isa_name(Isa::avx2) == "avx2");
}

TEST_CASE("unsupported variant is rejected") {
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (!supported(isa)) CHECK_THROWS_AS(table(isa), std::invalid_argument);
}

TEST_CASE("dot, axpy and weighted l1 agree with the scalar reference") {
  std::mt19937_64 rng(7);
  const auto& ref = table(Isa::scalar);
  for (Isa isa : available()) {
    const auto& k = table(isa);
    CAPTURE(isa_name(isa));
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 17u, 31u, 64u, 67u, 1001u}) {
      CAPTURE(n);
      const auto x = random_vector(n, rng), y = random_vector(n, rng);
      auto w = random_vector(n, rng);
      for (auto& v : w) v = std::fabs(v);

      const double d_ref = ref.dot(x.data(), y.data(), n);
      CHECK(std::fabs(k.dot(x.data(), y.data(), n) - d_ref) <= close_tol(d_ref, n));

      const double l_ref = ref.weighted_l1(w.data(), x.data(), y.data(), n);
      CHECK(std::fabs(k.weighted_l1(w.data(), x.data(), y.data(), n) - l_ref) <= close_tol(l_ref, n));

      auto y1 = y, y2 = y;
      ref.axpy(0.37, x.data(), y1.data(), n);
      k.axpy(0.37, x.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(y1[i] - y2[i]) <= 1e-15);
    }
  }
}

TEST_CASE("weighted l1 against an independent loop") {
  const std::vector<double> w{1.0, 2.0, 0.5}, x{0.1, 0.9, -1.0}, y{0.4, 0.4, 1.0};
  double expect = 0.0;
  for (std::size_t i = 0; i < 3; ++i) expect += w[i] * std::fabs(x[i] - y[i]);
  for (Isa isa : available()) CHECK(table(isa).weighted_l1(w.data(), x.data(), y.data(), 3) == doctest::Approx(expect));
}

TEST_CASE("adjacency matvec agrees with the scalar reference") {
  std::mt19937_64 rng(11);
  const std::size_t n = 137;
  std::vector<std::uint64_t> row_ptr{0};
  std::vector<std::uint32_t> cols;
  std::bernoulli_distribution coin(0.1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && coin(rng)) cols.push_back(static_cast<std::uint32_t>(j));
    row_ptr.push_back(cols.size());
  }
  const auto x = random_vector(n, rng);
  std::vector<double> y_ref(n), y(n);
  table(Isa::scalar).adjacency_matvec(row_ptr.data(), cols.data(), n, x.data(), y_ref.data());
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::uint64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += x[cols[k]];
    CHECK(y_ref[i] == doctest::Approx(s).epsilon(1e-14));
  }
  for (Isa isa : available()) {
    table(isa).adjacency_matvec(row_ptr.data(), cols.data(), n, x.data(), y.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(y[i] - y_ref[i]) <= 1e-13);
  }
}

TEST_CASE("force_isa switches the active table") {
  const Isa before = active().isa;
  force_isa(Isa::scalar);
  CHECK(active().isa == Isa::scalar);
  force_isa(before);
  CHECK(active().isa == before);
}
