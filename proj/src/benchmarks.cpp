#include "cmaswitch/benchmarks.hpp"

#include "cmaswitch/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cmaswitch::benchmarks {

namespace {

struct SeedStream {
  std::uint64_t state;
  std::uint64_t next() { return state = mix64(state); }
  double unit() { return to_unit_double(next()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  double gauss() {
    return sampling::normal_quantile(std::clamp(unit(), 1e-18, 1.0 - 1e-16));
  }
};

Vector uniform_vector(SeedStream& s, int dim, double lo, double hi) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = s.uniform(lo, hi);
  return v;
}

// Orthogonal matrix from the QR factorization of a seeded Gaussian
// matrix, with a fixed sign convention so the result is deterministic.
Matrix seeded_rotation(SeedStream& s, int dim) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = s.gauss();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

double condition_scaled_sum(const Vector& z, double exponent_range) {
  const int d = static_cast<int>(z.size());
  double sum = 0.0;
  for (int i = 0; i < d; ++i)
    sum += std::pow(10.0, exponent_range * i / (d - 1)) * z[i] * z[i];
  return sum;
}

}  // namespace

const std::vector<int>& available_fids() {
  static const std::vector<int> fids = {1, 2, 5, 6, 8, 10, 12, 15, 20, 21};
  return fids;
}

double BenchmarkFunction::evaluate(const Vector& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("evaluate: expected dimension " +
                                std::to_string(dim_));
  if (!x.allFinite())
    throw std::invalid_argument("evaluate: non-finite input coordinate");
  return core_(x) + f_opt_;
}

BenchmarkFunction make_function(int fid, int dim, int instance) {
  const auto& fids = available_fids();
  if (std::find(fids.begin(), fids.end(), fid) == fids.end()) {
    std::ostringstream msg;
    msg << "fid " << fid << " not in desk-scale suite; available fids:";
    for (int f : fids) msg << ' ' << f;
    throw std::invalid_argument(msg.str());
  }
  if (dim < 2) throw std::invalid_argument("benchmark dimension must be >= 2");
  if (instance < 1) throw std::invalid_argument("instance index must be >= 1");

  BenchmarkFunction fn;
  fn.fid_ = fid;
  fn.dim_ = dim;
  fn.instance_ = instance;
  fn.transform_seed_ =
      hash_combine(hash_combine(0x62626f62ULL, static_cast<std::uint64_t>(fid)),
                   static_cast<std::uint64_t>(instance));
  SeedStream stream{fn.transform_seed_};

  fn.f_opt_ = stream.uniform(-100.0, 100.0);
  fn.x_opt_ = uniform_vector(stream, dim, -4.0, 4.0);
  fn.rotation_ = Matrix::Identity(dim, dim);

  switch (fid) {
    case 1: {
      fn.name_ = "sphere";
      const Vector xopt = fn.x_opt_;
      fn.core_ = [xopt](const Vector& x) { return (x - xopt).squaredNorm(); };
      break;
    }
    case 2: {
      fn.name_ = "ellipsoid";
      const Vector xopt = fn.x_opt_;
      fn.core_ = [xopt](const Vector& x) {
        return condition_scaled_sum(x - xopt, 6.0);
      };
      break;
    }
    case 5: {
      fn.name_ = "linear_slope";
      // Optimum on a corner of the domain boundary.
      Vector xopt(dim), slope(dim);
      for (int i = 0; i < dim; ++i) {
        const double sign = stream.unit() < 0.5 ? -1.0 : 1.0;
        xopt[i] = sign * kDomainHigh;
        slope[i] = sign * std::pow(10.0, static_cast<double>(i) / (dim - 1));
      }
      fn.x_opt_ = xopt;
      fn.core_ = [xopt, slope](const Vector& x) {
        double sum = 0.0;
        for (int i = 0; i < x.size(); ++i) {
          const double zi = xopt[i] * x[i] < 25.0 ? x[i] : xopt[i];
          sum += 5.0 * std::abs(slope[i]) - slope[i] * zi;
        }
        return sum;
      };
      break;
    }
    case 6: {
      fn.name_ = "attractive_sector";
      fn.rotation_ = seeded_rotation(stream, dim);
      const Vector xopt = fn.x_opt_;
      const Matrix rot = fn.rotation_;
      fn.core_ = [xopt, rot](const Vector& x) {
        const Vector z = rot * (x - xopt);
        double sum = 0.0;
        for (int i = 0; i < z.size(); ++i) {
          const double s = z[i] > 0.0 ? 100.0 : 1.0;
          sum += s * z[i] * s * z[i];
        }
        return std::pow(sum, 0.9);
      };
      break;
    }
    case 8: {
      fn.name_ = "rosenbrock";
      const Vector xopt = fn.x_opt_;
      const double scale = std::max(1.0, std::sqrt(static_cast<double>(dim)) / 8.0);
      fn.core_ = [xopt, scale](const Vector& x) {
        const Vector z = scale * (x - xopt) + Vector::Ones(x.size());
        double sum = 0.0;
        for (int i = 0; i + 1 < z.size(); ++i) {
          const double a = z[i] * z[i] - z[i + 1];
          const double b = z[i] - 1.0;
          sum += 100.0 * a * a + b * b;
        }
        return sum;
      };
      break;
    }
    case 10: {
      fn.name_ = "rotated_ellipsoid";
      fn.rotation_ = seeded_rotation(stream, dim);
      const Vector xopt = fn.x_opt_;
      const Matrix rot = fn.rotation_;
      fn.core_ = [xopt, rot](const Vector& x) {
        return condition_scaled_sum(rot * (x - xopt), 6.0);
      };
      break;
    }
    case 12: {
      fn.name_ = "bent_cigar";
      fn.rotation_ = seeded_rotation(stream, dim);
      const Vector xopt = fn.x_opt_;
      const Matrix rot = fn.rotation_;
      fn.core_ = [xopt, rot](const Vector& x) {
        const Vector z = rot * (x - xopt);
        double sum = z[0] * z[0];
        for (int i = 1; i < z.size(); ++i) sum += 1e6 * z[i] * z[i];
        return sum;
      };
      break;
    }
    case 15: {
      fn.name_ = "rastrigin";
      const Vector xopt = fn.x_opt_;
      fn.core_ = [xopt](const Vector& x) {
        const Vector z = x - xopt;
        double cosine = 0.0;
        for (int i = 0; i < z.size(); ++i) cosine += std::cos(2.0 * M_PI * z[i]);
        return 10.0 * (z.size() - cosine) + z.squaredNorm();
      };
      break;
    }
    case 20: {
      fn.name_ = "schwefel";
      // Deceptive sine landscape around w* = 420.9687...; the peak value
      // is computed with the same expression so the optimum cancels
      // exactly.
      const Vector xopt = fn.x_opt_;
      const double wstar = 420.9687462275036;
      const double peak = wstar * std::sin(std::sqrt(wstar));
      fn.core_ = [xopt, wstar, peak](const Vector& x) {
        double sum = 0.0;
        for (int i = 0; i < x.size(); ++i) {
          const double w = wstar + 100.0 * (x[i] - xopt[i]);
          const double y = std::clamp(w, -500.0, 500.0);
          sum += peak - y * std::sin(std::sqrt(std::abs(y)));
          const double excess = std::max(0.0, std::abs(w) - 500.0);
          sum += excess * excess / 100.0;
        }
        return sum;
      };
      break;
    }
    case 21: {
      fn.name_ = "gallagher_101";
      fn.rotation_ = seeded_rotation(stream, dim);
      const Matrix rot = fn.rotation_;
      constexpr int kPeaks = 101;
      std::vector<Vector> centers(kPeaks);
      std::vector<Vector> scaling(kPeaks);
      std::vector<double> height(kPeaks);
      centers[0] = fn.x_opt_;
      height[0] = 10.0;
      for (int p = 0; p < kPeaks; ++p) {
        const double cond = p == 0 ? 1000.0 : std::pow(10.0, 3.0 * stream.unit());
        Vector c(dim);
        for (int j = 0; j < dim; ++j)
          c[j] = std::pow(cond, static_cast<double>(j) / (dim - 1)) /
                 std::sqrt(cond);
        scaling[p] = c;
        if (p > 0) {
          centers[p] = uniform_vector(stream, dim, -4.9, 4.9);
          height[p] = 1.1 + 8.0 * (p - 1) / 99.0;
        }
      }
      fn.core_ = [rot, centers, scaling, height, dim](const Vector& x) {
        double best = 0.0;
        for (std::size_t p = 0; p < centers.size(); ++p) {
          const Vector v = rot * (x - centers[p]);
          double q = 0.0;
          for (int j = 0; j < v.size(); ++j) q += scaling[p][j] * v[j] * v[j];
          best = std::max(best, height[p] * std::exp(-q / (2.0 * dim)));
        }
        const double d = 10.0 - best;
        return d * d;
      };
      break;
    }
    default:
      throw std::logic_error("unreachable");
  }
  return fn;
}

std::string suite_manifest(const std::vector<int>& fids, int dim,
                           const std::vector<int>& instances) {
  std::ostringstream out;
  out.precision(17);
  for (int fid : fids)
    for (int inst : instances) {
      const auto fn = make_function(fid, dim, inst);
      out << fid << ' ' << dim << ' ' << inst << ' ' << fn.transform_seed()
          << ' ' << fn.f_opt() << '\n';
    }
  return out.str();
}

}  // namespace cmaswitch::benchmarks
