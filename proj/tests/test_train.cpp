#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "neuroramp/rng.hpp"
#include "neuroramp/train.hpp"

using namespace neuroramp;
using train::PcaBasis;
using train::SpikeMatrix;

namespace {

SpikeMatrix gaussian_spikes(int count, std::uint64_t seed) {
  Rng rng(seed);
  SpikeMatrix rows;
  rows.reserve(count);
  for (int r = 0; r < count; ++r) {
    std::vector<double> row(22);
    const double depth = rng.uniform(5.0, 20.0);
    const double width = rng.uniform(2.0, 4.0);
    for (int i = 0; i < 22; ++i) {
      const double t = (i - 5.0) / width;
      row[i] = -depth * std::exp(-0.5 * t * t) + 0.3 * rng.gaussian();
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::vector<double>> covariance_of(const SpikeMatrix& rows) {
  const std::size_t dim = rows[0].size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < dim; ++i) mean[i] += row[i];
  for (double& m : mean) m /= static_cast<double>(rows.size());
  std::vector<std::vector<double>> cov(dim, std::vector<double>(dim, 0.0));
  for (const auto& row : rows)
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        cov[i][j] += (row[i] - mean[i]) * (row[j] - mean[j]);
  for (auto& r : cov)
    for (double& v : r) v /= static_cast<double>(rows.size()) - 1.0;
  return cov;
}

}  // namespace

TEST_CASE("two-point toy corpus recovers the variance axis") {
  // Variance only along a fixed direction embedded in 22 dimensions.
  std::vector<double> axis(22, 0.0);
  axis[2] = 0.6;
  axis[7] = 0.8;
  SpikeMatrix rows;
  for (int r = 0; r < 64; ++r) {
    const double amp = (r % 2 == 0) ? 1.0 : -1.0;
    std::vector<double> row(22);
    for (int i = 0; i < 22; ++i) row[i] = amp * axis[i];
    rows.push_back(row);
  }
  const auto basis = train::compute_pca_basis(rows, 2);
  for (int i = 0; i < 22; ++i)
    CHECK(basis.w[i][0] == doctest::Approx(axis[i]).epsilon(1e-6));
  CHECK(basis.eigenvalues[0] > basis.eigenvalues[1]);
}

TEST_CASE("complete basis reconstructs the corpus exactly") {
  const auto rows = gaussian_spikes(120, 0xBEEF);
  const auto basis = train::compute_pca_basis(rows, 22);

  // Orthonormality.
  for (int a = 0; a < 22; ++a)
    for (int b = 0; b <= a; ++b) {
      double dot = 0.0;
      for (int i = 0; i < 22; ++i) dot += basis.w[i][a] * basis.w[i][b];
      CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-9));
    }

  // Projection + inverse projection is the identity on centered rows.
  for (const auto& row : rows) {
    std::vector<double> centered(22);
    for (int i = 0; i < 22; ++i) centered[i] = row[i] - basis.mean[i];
    std::vector<double> p(22, 0.0);
    for (int c = 0; c < 22; ++c)
      for (int i = 0; i < 22; ++i) p[c] += centered[i] * basis.w[i][c];
    for (int i = 0; i < 22; ++i) {
      double rebuilt = 0.0;
      for (int c = 0; c < 22; ++c) rebuilt += p[c] * basis.w[i][c];
      CHECK(rebuilt == doctest::Approx(centered[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("identical rows raise DegenerateCovariance") {
  SpikeMatrix rows(10, std::vector<double>(22, 3.25));
  CHECK_THROWS_AS(train::compute_pca_basis(rows, 4), Error);
  try {
    train::compute_pca_basis(rows, 4);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kDegenerateCovariance);
  }
}

TEST_CASE("eigenpairs satisfy the residual bound") {
  const auto rows = gaussian_spikes(300, 0xE16E);
  const auto cov = covariance_of(rows);
  const auto basis = train::compute_pca_basis(rows, 4);

  double cov_norm = 0.0;
  for (const auto& r : cov)
    for (const double v : r) cov_norm += v * v;
  cov_norm = std::sqrt(cov_norm);

  for (int c = 0; c < 4; ++c) {
    double residual = 0.0;
    for (int i = 0; i < 22; ++i) {
      double cv = 0.0;
      for (int j = 0; j < 22; ++j) cv += cov[i][j] * basis.w[j][c];
      const double r = cv - basis.eigenvalues[c] * basis.w[i][c];
      residual += r * r;
    }
    CHECK(std::sqrt(residual) <= 1e-8 * cov_norm);
  }
}

TEST_CASE("top-4 basis explains at least as much variance as any 4 axes") {
  const auto rows = gaussian_spikes(300, 0xA8E);
  const auto cov = covariance_of(rows);
  const auto basis = train::compute_pca_basis(rows, 4);

  const double explained = std::accumulate(basis.eigenvalues.begin(),
                                           basis.eigenvalues.end(), 0.0);
  // Best four coordinate axes = four largest diagonal entries.
  std::vector<double> diag(22);
  for (int i = 0; i < 22; ++i) diag[i] = cov[i][i];
  std::sort(diag.rbegin(), diag.rend());
  const double axes = diag[0] + diag[1] + diag[2] + diag[3];
  CHECK(explained >= axes - 1e-9);
}

TEST_CASE("quantize_basis: 0.5 peak maps to scale 510 and coefficient 255") {
  PcaBasis basis;
  basis.w.assign(22, std::vector<double>(4, 0.0));
  basis.eigenvalues = {4.0, 3.0, 2.0, 1.0};
  basis.mean.assign(22, 0.0);
  basis.w[3][0] = 0.5;
  basis.w[5][1] = -0.25;
  const auto mem = train::quantize_basis(basis, 6, 5);
  CHECK(mem.scale == doctest::Approx(510.0));
  CHECK(mem.coefficients[0][3] == 255);
  CHECK(mem.coefficients[1][5] == -128);
}

TEST_CASE("quantize_basis: all-zero column stays zero") {
  PcaBasis basis;
  basis.w.assign(22, std::vector<double>(4, 0.0));
  basis.eigenvalues = {1.0, 1.0, 1.0, 1.0};
  basis.mean.assign(22, 0.0);
  basis.w[0][0] = 0.7;  // sets the global scale
  const auto mem = train::quantize_basis(basis, 6, 5);
  for (int i = 0; i < 22; ++i) CHECK(mem.coefficients[3][i] == 0);
}

TEST_CASE("quantize_basis round-trip error is half a coefficient step") {
  const auto rows = gaussian_spikes(200, 0x0DD);
  const auto basis = train::compute_pca_basis(rows, 4);
  const auto mem = train::quantize_basis(basis, 6, 5);
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < 22; ++i) {
      const double dequantized = mem.coefficients[c][i] / mem.scale;
      CHECK(std::abs(dequantized - basis.w[i][c]) <= 0.5 / mem.scale + 1e-12);
    }
}

TEST_CASE("select_shifts finds the smallest saturation-free shifts") {
  const auto rows = gaussian_spikes(200, 0x5417);
  const auto basis = train::compute_pca_basis(rows, 4);
  const auto [mac, out] = train::select_shifts(basis, rows);
  // Zero saturations at the selected point.
  const auto mem = train::quantize_basis(basis, mac, out);
  std::uint64_t saturations = 0;
  for (const auto& row : rows) {
    compress::ChannelMemoryEntry entry;
    for (const double x : row) {
      const int code =
          compress::kBaselineCode + static_cast<int>(std::lround(x));
      entry = compress::mac_step(entry, code, mem, &saturations);
    }
    compress::finalize(entry, mem, 0, 0, &saturations);
  }
  CHECK(saturations == 0);

  // One step tighter must saturate somewhere (otherwise not minimal).
  if (mac > 0) {
    const auto tighter = train::quantize_basis(basis, mac - 1, out);
    std::uint64_t clipped = 0;
    for (const auto& row : rows) {
      compress::ChannelMemoryEntry entry;
      for (const double x : row) {
        const int code =
            compress::kBaselineCode + static_cast<int>(std::lround(x));
        entry = compress::mac_step(entry, code, tighter, &clipped);
      }
    }
    CHECK(clipped > 0);
  }
}

TEST_CASE("jacobi matches a hand-solved 2x2 eigensystem") {
  // [[2, 1], [1, 2]] has eigenvalues 3 and 1 with axes (1,1)/sqrt2, (1,-1)/sqrt2.
  const auto eigen = train::jacobi_eigensolve({{2.0, 1.0}, {1.0, 2.0}});
  CHECK(eigen.values[0] == doctest::Approx(3.0));
  CHECK(eigen.values[1] == doctest::Approx(1.0));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(eigen.vectors[0][0]) == doctest::Approx(inv_sqrt2));
  CHECK(std::abs(eigen.vectors[0][1]) == doctest::Approx(inv_sqrt2));
}
