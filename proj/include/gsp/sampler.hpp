#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "gsp/rng.hpp"
#include "gsp/spectral_measure.hpp"

namespace gsp {

struct PathGrid {
  Domain domain = Domain::IntegerTime;
  double start = 0.0;
  double step = 1.0;  // forced to 1 for IntegerTime
  int count = 1;

  void validate() const;
  double t(int i) const { return start + step * i; }
};

struct SamplePath {
  PathGrid grid;
  std::vector<double> values;
  std::string method;
  std::uint64_t seed = 0;
  std::string measure_digest;
};

// Sigma_ij = r((i-j)*step); Toeplitz, one covariance row computed.
Eigen::MatrixXd cov_matrix(const SpectralMeasure& rho, const PathGrid& grid);

// Exact Gaussian vectors with the Toeplitz covariance. PSD repair clips
// eigenvalues in [-1e-10, 0] to 0; anything more negative is an error.
std::vector<SamplePath> sample_exact(const SpectralMeasure& rho, const PathGrid& grid,
                                     int n_paths, const RngSpec& rng);

struct CirculantInfo {
  std::size_t embed_size = 0;
  double min_spectrum = 0.0;
  bool fell_back_to_exact = false;
};

// Circulant embedding (power-of-two, size >= 2*count); exact in distribution when
// the circulant spectrum is nonnegative, otherwise falls back to sample_exact and
// records the fallback.
std::vector<SamplePath> sample_circulant(const SpectralMeasure& rho, const PathGrid& grid,
                                         int n_paths, const RngSpec& rng,
                                         CirculantInfo* info = nullptr);

struct SpectralSamplerInfo {
  int n_cells = 0;
  double partition_modulus = 0.0;  // max frequency width of a density cell
  // |r_hat(t) - r(t)| <= m0 * partition_modulus * |t|
};

// Random-phase superposition over an equal-mass cell partition of the measure;
// atoms get their own cells (exact), density cells carry a documented bias.
std::vector<SamplePath> sample_spectral(const SpectralMeasure& rho, const PathGrid& grid,
                                        int n_modes, int n_paths, const RngSpec& rng,
                                        SpectralSamplerInfo* info = nullptr);

// Streaming sampler: precomputes the factor (or circulant spectrum) once and
// generates path #p as a pure function of (seed, p). Lets Monte Carlo loops run
// at O(count) memory with deterministic per-path streams.
class PathSampler {
 public:
  PathSampler(const SpectralMeasure& rho, const PathGrid& grid, bool prefer_circulant);

  int dim() const { return grid_.count; }
  const PathGrid& grid() const { return grid_; }
  const CirculantInfo& circulant_info() const { return info_; }

  void generate(std::uint64_t seed, std::uint64_t path_index,
                std::vector<double>& out) const;
  // One circulant FFT yields two independent paths (indices 2j and 2j+1).
  void generate_pair(std::uint64_t seed, std::uint64_t pair_index,
                     std::vector<double>& out_even, std::vector<double>& out_odd) const;

 private:
  PathGrid grid_;
  bool circulant_ = false;
  Eigen::MatrixXd factor_;          // exact route
  std::vector<double> sqrt_spec_;   // circulant route
  CirculantInfo info_;
};

// k-fold forward difference (integer time); length shrinks by k.
SamplePath discrete_diff(const SamplePath& path, int k);

SpectralMeasure derivative_measure(const SpectralMeasure& rho);
SpectralMeasure antiderivative_measure(const SpectralMeasure& rho);

void write_paths_csv(const std::vector<SamplePath>& paths, const std::string& path);
void write_paths_gspp(const std::vector<SamplePath>& paths, const std::string& path);
std::vector<SamplePath> read_paths_gspp(const std::string& path);

}  // namespace gsp
