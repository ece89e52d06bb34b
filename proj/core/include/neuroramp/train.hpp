#pragma once

#include <cstdint>
#include <vector>

#include "neuroramp/adc.hpp"
#include "neuroramp/compress.hpp"
#include "neuroramp/errors.hpp"
#include "neuroramp/frontend.hpp"
#include "neuroramp/synth.hpp"

namespace neuroramp::train {

// Detected spike windows pooled across all channels, centered code units.
// Rows must be kSpikeWindowSamples long.
using SpikeMatrix = std::vector<std::vector<double>>;

struct SymmetricEigen {
  std::vector<double> values;                 // descending
  std::vector<std::vector<double>> vectors;   // vectors[i] = eigenvector i
};

// Cyclic Jacobi rotations on a symmetric matrix. Small, dependency-free and
// bit-reproducible across platforms at the tolerances asserted in tests.
SymmetricEigen jacobi_eigensolve(std::vector<std::vector<double>> matrix);

struct PcaBasis {
  // w[i][c]: sample i of component c; columns orthonormal, sign-normalized so
  // each column's largest-magnitude entry is positive.
  std::vector<std::vector<double>> w;  // 22 x k
  std::vector<double> eigenvalues;     // k, descending
  std::vector<double> mean;            // training mean, 22

  int component_count() const {
    return w.empty() ? 0 : static_cast<int>(w[0].size());
  }
};

// Covariance of mean-centered rows + symmetric eigensolve; keeps the top-k
// eigenvectors. Throws kDegenerateCovariance when all rows are identical.
PcaBasis compute_pca_basis(const SpikeMatrix& spikes, int k);

// Maps the basis onto the signed 9-bit coefficient memory. The scale is
// global: max |w| maps to 255.
compress::QuantizedPcaMemory quantize_basis(const PcaBasis& basis,
                                            int mac_shift, int out_shift);

// Smallest shifts that produce zero saturation events (11-bit accumulators,
// then the 6-bit output quantizer) on the given training windows.
std::pair<int, int> select_shifts(const PcaBasis& basis,
                                  const SpikeMatrix& spikes);

struct CalibrationGrid {
  std::vector<int> threshold1;
  std::vector<int> threshold2;
  std::vector<int> pretrigger_n = {2, 3, 4};
  std::vector<int> posttrigger_m = {17, 19, 21};
};

// Default 8x8 threshold grid around the baseline code.
CalibrationGrid default_grid(int baseline_code = 128);

struct CalibrationResult {
  adc::TriggerConfig trigger;
  int mac_shift = 6;
  int out_shift = 5;
  double accuracy = 0.0;
  std::uint64_t digitized_samples = 0;  // tie-break metric (power proxy)
};

// Exhaustive grid search over (threshold1, threshold2, N, M). Each grid point
// runs the full chain on the training recording: detect windows, fit a basis,
// quantize, compress, classify, and score against ground truth. Ties resolve
// toward fewer digitized samples. Combinations whose window would exceed the
// 22-sample hardware limit are skipped. Deterministic for fixed inputs;
// `jobs` only parallelizes independent grid points.
CalibrationResult calibrate(const synth::Recording& recording,
                            const synth::GroundTruth& gt,
                            const CalibrationGrid& grid,
                            const frontend::FrontEndConfig& fe_cfg,
                            const adc::RampConfig& ramp_cfg,
                            double match_window_s = 1e-3, int jobs = 1);

}  // namespace neuroramp::train
