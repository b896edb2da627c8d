#include "gsp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "gsp/fft.hpp"

namespace gsp {

namespace {

double round_to_int(double x) { return std::nearbyint(x); }

// Factor F with F F^T = Sigma; Cholesky when PD, eigen-clip repair otherwise.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  const double scale = std::max(1.0, sigma.diagonal().maxCoeff());
  const double min_ev = es.eigenvalues().minCoeff();
  if (min_ev < -1e-10 * scale)
    throw std::domain_error("covariance matrix is not PSD (min eigenvalue " +
                            std::to_string(min_ev) + "); measure or quadrature bug");
  // rank truncation: numerically-zero eigenvalues (either sign) go to exact zero
  const double cut = 1e-12 * std::max(scale, es.eigenvalues().maxCoeff());
  Eigen::VectorXd d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i) d(i) = (d(i) > cut) ? std::sqrt(d(i)) : 0.0;
  return es.eigenvectors() * d.asDiagonal();
}

// Circulant first row c_j = r(min(j, M-j) * step) for M = next power of two >= 2n.
std::vector<double> circulant_row(const SpectralMeasure& rho, const PathGrid& grid,
                                  std::size_t M) {
  std::vector<double> c(M);
  std::vector<double> lag(M / 2 + 1);
  for (std::size_t d = 0; d <= M / 2; ++d) lag[d] = rho.covariance(grid.step * d);
  for (std::size_t j = 0; j < M; ++j) c[j] = lag[std::min(j, M - j)];
  return c;
}

}  // namespace

void PathGrid::validate() const {
  if (count < 1) throw std::invalid_argument("grid count must be >= 1");
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be > 0");
  if (domain == Domain::IntegerTime) {
    if (step != 1.0) throw std::invalid_argument("integer-time grid forces step = 1");
    if (start != round_to_int(start))
      throw std::invalid_argument("integer-time grid needs integer start");
  }
}

Eigen::MatrixXd cov_matrix(const SpectralMeasure& rho, const PathGrid& grid) {
  grid.validate();
  if (grid.count > 4000) throw std::invalid_argument("cov_matrix: grid count > 4000");
  const int n = grid.count;
  std::vector<double> row(n);
  for (int d = 0; d < n; ++d) row[d] = rho.covariance(grid.step * d);
  Eigen::MatrixXd sigma(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sigma(i, j) = row[std::abs(i - j)];
  return sigma;
}

PathSampler::PathSampler(const SpectralMeasure& rho, const PathGrid& grid,
                         bool prefer_circulant)
    : grid_(grid) {
  grid_.validate();
  if (prefer_circulant) {
    const std::size_t M = next_pow2(2 * static_cast<std::size_t>(grid.count));
    std::vector<double> c = circulant_row(rho, grid, M);
    std::vector<std::complex<double>> spec(M);
    for (std::size_t j = 0; j < M; ++j) spec[j] = c[j];
    fft_pow2(spec);
    info_.embed_size = M;
    double min_spec = spec[0].real();
    for (const auto& s : spec) min_spec = std::min(min_spec, s.real());
    info_.min_spectrum = min_spec;
    const double tol = 1e-10 * std::max(1.0, c[0]);
    if (min_spec >= -tol) {
      sqrt_spec_.resize(M);
      for (std::size_t j = 0; j < M; ++j)
        sqrt_spec_[j] = std::sqrt(std::max(0.0, spec[j].real()));
      circulant_ = true;
      return;
    }
    info_.fell_back_to_exact = true;
  }
  if (grid.count > 2000)
    throw std::domain_error("exact sampling unavailable: grid count > 2000");
  factor_ = psd_factor(cov_matrix(rho, grid));
}

void PathSampler::generate_pair(std::uint64_t seed, std::uint64_t pair_index,
                                std::vector<double>& out_even,
                                std::vector<double>& out_odd) const {
  const int n = grid_.count;
  if (circulant_) {
    const std::size_t M = sqrt_spec_.size();
    CounterRng gen(seed, pair_index);
    std::vector<std::complex<double>> v(M);
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));
    for (std::size_t k = 0; k < M; ++k) {
      const double a = gen.gaussian();
      const double b = gen.gaussian();
      v[k] = std::complex<double>(a, b) * (sqrt_spec_[k] * scale);
    }
    fft_pow2(v);
    out_even.resize(n);
    out_odd.resize(n);
    for (int i = 0; i < n; ++i) {
      out_even[i] = v[i].real();
      out_odd[i] = v[i].imag();
    }
    return;
  }
  generate(seed, 2 * pair_index, out_even);
  generate(seed, 2 * pair_index + 1, out_odd);
}

void PathSampler::generate(std::uint64_t seed, std::uint64_t path_index,
                           std::vector<double>& out) const {
  const int n = grid_.count;
  if (circulant_) {
    std::vector<double> even, odd;
    generate_pair(seed, path_index / 2, even, odd);
    out = (path_index % 2 == 0) ? std::move(even) : std::move(odd);
    return;
  }
  CounterRng gen(seed, path_index);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z(i) = gen.gaussian();
  Eigen::VectorXd x = factor_ * z;
  out.assign(x.data(), x.data() + n);
}

namespace {

std::vector<SamplePath> materialize(const PathSampler& sampler, const SpectralMeasure& rho,
                                    int n_paths, const RngSpec& rng, const char* method) {
  std::vector<SamplePath> out;
  if (n_paths < 0) throw std::invalid_argument("n_paths must be >= 0");
  if (n_paths == 0) return out;
  const std::string digest = rho.digest();
  out.resize(n_paths);
#pragma omp parallel for schedule(static)
  for (int p = 0; p < n_paths; ++p) {
    SamplePath sp;
    sp.grid = sampler.grid();
    sampler.generate(rng.seed, static_cast<std::uint64_t>(p), sp.values);
    sp.method = method;
    sp.seed = rng.seed;
    sp.measure_digest = digest;
    out[p] = std::move(sp);
  }
  return out;
}

}  // namespace

std::vector<SamplePath> sample_exact(const SpectralMeasure& rho, const PathGrid& grid,
                                     int n_paths, const RngSpec& rng) {
  if (grid.count > 2000) throw std::invalid_argument("sample_exact: grid count > 2000");
  PathSampler sampler(rho, grid, /*prefer_circulant=*/false);
  return materialize(sampler, rho, n_paths, rng, "exact");
}

std::vector<SamplePath> sample_circulant(const SpectralMeasure& rho, const PathGrid& grid,
                                         int n_paths, const RngSpec& rng,
                                         CirculantInfo* info) {
  PathSampler sampler(rho, grid, /*prefer_circulant=*/true);
  if (info) *info = sampler.circulant_info();
  const char* method = sampler.circulant_info().fell_back_to_exact ? "exact-fallback"
                                                                   : "circulant";
  return materialize(sampler, rho, n_paths, rng, method);
}

namespace {

struct Cell {
  double freq;
  double amplitude;  // sqrt of combined (two-sided) mass
};

std::vector<Cell> build_cells(const SpectralMeasure& rho, int n_modes,
                              SpectralSamplerInfo* info) {
  std::vector<Cell> cells;
  double modulus = 0.0;
  for (const auto& at : rho.atoms) {
    const double wm = at.mass * rho.weight_at(at.freq);
    if (wm > 0.0) cells.push_back({at.freq, std::sqrt(wm)});
  }
  // continuous part: equal-mass quantile cells
  SpectralMeasure cont = rho;
  cont.atoms.clear();
  if (!cont.segments.empty()) {
    const double W = cont.cumulative_mass(std::numeric_limits<double>::infinity());
    if (W > 0.0) {
      double lo_sup = std::numeric_limits<double>::infinity(), hi_sup = 0.0;
      for (const auto& s : cont.segments) {
        lo_sup = std::min(lo_sup, s.a);
        hi_sup = std::max(hi_sup, s.b);
      }
      auto quantile = [&](double target) {
        double lo = lo_sup, hi = std::isinf(hi_sup) ? 1.0 : hi_sup;
        if (std::isinf(hi_sup)) {  // expand until the bracket holds
          while (cont.cumulative_mass(hi) < target && hi < 1e18) hi *= 2.0;
        }
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (cont.cumulative_mass(mid) < target) lo = mid;
          else hi = mid;
          if (hi - lo <= 1e-13 * std::max(1.0, hi)) break;
        }
        return 0.5 * (lo + hi);
      };
      double prev_edge = lo_sup;
      for (int i = 0; i < n_modes; ++i) {
        const double mass = W / n_modes;
        const double rep = quantile(W * (i + 0.5) / n_modes);
        const double edge = (i + 1 == n_modes && !std::isinf(hi_sup))
                                ? hi_sup
                                : quantile(W * (i + 1.0) / n_modes);
        cells.push_back({rep, std::sqrt(2.0 * mass)});
        modulus = std::max(modulus, edge - prev_edge);
        prev_edge = edge;
      }
    }
  }
  if (info) {
    info->n_cells = static_cast<int>(cells.size());
    info->partition_modulus = modulus;
  }
  return cells;
}

}  // namespace

std::vector<SamplePath> sample_spectral(const SpectralMeasure& rho, const PathGrid& grid,
                                        int n_modes, int n_paths, const RngSpec& rng,
                                        SpectralSamplerInfo* info) {
  grid.validate();
  if (n_modes < 1) throw std::invalid_argument("sample_spectral: n_modes must be >= 1");
  if (n_paths < 0) throw std::invalid_argument("n_paths must be >= 0");
  const std::vector<Cell> cells = build_cells(rho, n_modes, info);
  const std::string digest = rho.digest();
  std::vector<SamplePath> out(n_paths);
  const int n = grid.count;
#pragma omp parallel for schedule(static)
  for (int p = 0; p < n_paths; ++p) {
    CounterRng gen(rng.seed, static_cast<std::uint64_t>(p));
    SamplePath sp;
    sp.grid = grid;
    sp.values.assign(n, 0.0);
    for (const auto& cell : cells) {
      const double xi = gen.gaussian();
      const double eta = gen.gaussian();
      for (int i = 0; i < n; ++i) {
        const double t = grid.t(i);
        sp.values[i] += cell.amplitude * (xi * std::cos(cell.freq * t) +
                                          eta * std::sin(cell.freq * t));
      }
    }
    sp.method = "spectral";
    sp.seed = rng.seed;
    sp.measure_digest = digest;
    out[p] = std::move(sp);
  }
  return out;
}

SamplePath discrete_diff(const SamplePath& path, int k) {
  if (path.grid.domain != Domain::IntegerTime)
    throw std::invalid_argument("discrete_diff: integer-time paths only");
  if (k < 1) throw std::invalid_argument("discrete_diff: k must be >= 1");
  if (path.grid.count <= k)
    throw std::invalid_argument("discrete_diff: path shorter than difference order");
  SamplePath out = path;
  for (int round = 0; round < k; ++round) {
    for (std::size_t i = 0; i + 1 < out.values.size(); ++i)
      out.values[i] = out.values[i + 1] - out.values[i];
    out.values.pop_back();
  }
  out.grid.count = path.grid.count - k;
  out.method = path.method + "+diff" + std::to_string(k);
  return out;
}

namespace {

// Fold an extra PowerLaw(p) into the multiplier list, cancelling exactly.
void push_powerlaw(std::vector<Multiplier>& ms, double p) {
  for (auto& m : ms) {
    if (m.kind == Multiplier::PowerLaw) {
      m.p += p;
      if (m.p == 0.0) {
        ms.erase(std::remove_if(ms.begin(), ms.end(),
                                [](const Multiplier& x) {
                                  return x.kind == Multiplier::PowerLaw && x.p == 0.0;
                                }),
                 ms.end());
      }
      return;
    }
  }
  ms.push_back({Multiplier::PowerLaw, p});
}

void push_cos_factor(std::vector<Multiplier>& ms, bool inverse) {
  const Multiplier::Kind cancel =
      inverse ? Multiplier::OneMinusCos : Multiplier::InvOneMinusCos;
  for (auto it = ms.begin(); it != ms.end(); ++it) {
    if (it->kind == cancel) {
      ms.erase(it);
      return;
    }
  }
  ms.push_back({inverse ? Multiplier::InvOneMinusCos : Multiplier::OneMinusCos, 0.0});
}

double pick_declared_delta(const SpectralMeasure& m, double preferred) {
  for (double cand : {preferred, 1.0, 0.5, 0.25}) {
    if (cand > 0.0 && m.moment_finite(cand)) return cand;
  }
  return 0.0;
}

}  // namespace

SpectralMeasure derivative_measure(const SpectralMeasure& rho) {
  SpectralMeasure out = rho;
  out.ac_floor.reset();
  if (rho.domain == Domain::ContinuousTime) {
    if (!(rho.sup_finite_positive_moment() > 2.0))
      throw std::domain_error(
          "derivative_measure: needs m_delta < inf for some delta > 2");
    push_powerlaw(out.multipliers, 2.0);
    out.declared_delta = pick_declared_delta(out, rho.declared_delta - 2.0);
  } else {
    push_cos_factor(out.multipliers, /*inverse=*/false);
    out.declared_delta = pick_declared_delta(out, rho.declared_delta);
  }
  return out;
}

SpectralMeasure antiderivative_measure(const SpectralMeasure& rho) {
  if (!rho.moment_finite(-2.0))
    throw std::domain_error("antiderivative_measure inapplicable: m_{-2} = inf");
  if (!(rho.declared_delta > 0.0) && !(rho.sup_finite_positive_moment() > 0.0))
    throw std::domain_error("antiderivative_measure: needs m_delta < inf for some delta > 0");
  SpectralMeasure out = rho;
  out.ac_floor.reset();
  if (rho.domain == Domain::ContinuousTime) {
    push_powerlaw(out.multipliers, -2.0);
    out.declared_delta = pick_declared_delta(out, rho.declared_delta + 2.0);
  } else {
    push_cos_factor(out.multipliers, /*inverse=*/true);
    out.declared_delta = pick_declared_delta(out, rho.declared_delta);
  }
  return out;
}

void write_paths_csv(const std::vector<SamplePath>& paths, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "t,value,path_id\n";
  char buf[64];
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const auto& sp = paths[p];
    for (int i = 0; i < sp.grid.count; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%zu\n", sp.grid.t(i), sp.values[i], p);
      out << buf;
    }
  }
}

void write_paths_gspp(const std::vector<SamplePath>& paths, const std::string& path) {
  if (paths.empty()) throw std::invalid_argument("no paths to write");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const auto& g = paths.front().grid;
  out.write("GSPP", 4);
  const std::uint32_t version = 1;
  const std::uint8_t dom = (g.domain == Domain::IntegerTime) ? 0 : 1;
  const std::uint64_t count = static_cast<std::uint64_t>(g.count);
  const std::uint64_t n_paths = paths.size();
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&dom), 1);
  out.write(reinterpret_cast<const char*>(&g.start), 8);
  out.write(reinterpret_cast<const char*>(&g.step), 8);
  out.write(reinterpret_cast<const char*>(&count), 8);
  out.write(reinterpret_cast<const char*>(&n_paths), 8);
  for (const auto& sp : paths)
    out.write(reinterpret_cast<const char*>(sp.values.data()),
              static_cast<std::streamsize>(sp.values.size() * 8));
}

std::vector<SamplePath> read_paths_gspp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "GSPP", 4) != 0) throw std::runtime_error("bad GSPP magic");
  std::uint32_t version = 0;
  std::uint8_t dom = 0;
  PathGrid g;
  std::uint64_t count = 0, n_paths = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&dom), 1);
  in.read(reinterpret_cast<char*>(&g.start), 8);
  in.read(reinterpret_cast<char*>(&g.step), 8);
  in.read(reinterpret_cast<char*>(&count), 8);
  in.read(reinterpret_cast<char*>(&n_paths), 8);
  if (version != 1) throw std::runtime_error("unsupported GSPP version");
  g.domain = (dom == 0) ? Domain::IntegerTime : Domain::ContinuousTime;
  g.count = static_cast<int>(count);
  std::vector<SamplePath> out(n_paths);
  for (auto& sp : out) {
    sp.grid = g;
    sp.values.resize(count);
    in.read(reinterpret_cast<char*>(sp.values.data()),
            static_cast<std::streamsize>(count * 8));
    sp.method = "gspp";
  }
  if (!in) throw std::runtime_error("truncated GSPP file");
  return out;
}

}  // namespace gsp
