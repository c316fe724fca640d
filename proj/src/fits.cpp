// fits.cpp

#include "onperc/fits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace onp {

namespace {

// in-place Gaussian elimination with partial pivoting; A is n x n row-major
bool solve_linear(std::vector<double>& A, std::vector<double>& rhs, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(A[row * n + col]) > std::abs(A[pivot * n + col])) pivot = row;
    if (std::abs(A[pivot * n + col]) < 1e-300) return false;
    if (pivot != col) {
      for (int k = 0; k < n; ++k) std::swap(A[col * n + k], A[pivot * n + k]);
      std::swap(rhs[col], rhs[pivot]);
    }
    const double inv = 1.0 / A[col * n + col];
    for (int row = col + 1; row < n; ++row) {
      const double f = A[row * n + col] * inv;
      if (f == 0.0) continue;
      for (int k = col; k < n; ++k) A[row * n + k] -= f * A[col * n + k];
      rhs[row] -= f * rhs[col];
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    double acc = rhs[col];
    for (int k = col + 1; k < n; ++k) acc -= A[col * n + k] * rhs[k];
    rhs[col] = acc / A[col * n + col];
  }
  return true;
}

struct LinearFit {
  double intercept = 0.0, slope = 0.0;
  double err_intercept = 0.0, err_slope = 0.0;
  double chi2 = 0.0;
  int n = 0;
};

// weighted straight line y = intercept + slope * x
LinearFit line_fit(std::span<const double> x, std::span<const double> y,
                   std::span<const double> w) {
  LinearFit fit;
  fit.n = static_cast<int>(x.size());
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < fit.n; ++i) {
    s += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  const double det = s * sxx - sx * sx;
  if (std::abs(det) < 1e-300)
    throw std::runtime_error("line_fit: degenerate abscissas");
  fit.intercept = (sxx * sy - sx * sxy) / det;
  fit.slope = (s * sxy - sx * sy) / det;
  for (int i = 0; i < fit.n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    fit.chi2 += w[i] * r * r;
  }
  fit.err_intercept = std::sqrt(sxx / det);
  fit.err_slope = std::sqrt(s / det);
  return fit;
}

using ModelFn =
    std::function<double(double x, std::span<const double> theta, double* grad)>;

struct LmOutcome {
  std::vector<double> theta;
  std::vector<double> sigma;
  double chi2 = 0.0;
  int dof = 0;
  bool converged = false;
  int iterations = 0;
  std::string message;
};

// Levenberg-Marquardt with analytic gradients; clamp_low[k] = NaN disables
LmOutcome lm_fit(std::span<const double> x, std::span<const double> y,
                 std::span<const double> w, std::vector<double> theta,
                 const ModelFn& model, std::span<const double> clamp_low,
                 bool scale_errors) {
  const int np = static_cast<int>(theta.size());
  const int nd = static_cast<int>(x.size());
  LmOutcome out;
  out.dof = nd - np;
  if (out.dof <= 0) throw std::invalid_argument("lm_fit: too few points");

  std::vector<double> grad(np), jtj(np * np), jtr(np), step(np), trial(np);
  auto chi2_of = [&](std::span<const double> th) {
    double acc = 0.0;
    for (int i = 0; i < nd; ++i) {
      const double r = y[i] - model(x[i], th, nullptr);
      acc += w[i] * r * r;
    }
    return acc;
  };

  double chi2 = chi2_of(theta);
  double lambda = 1e-3;
  const int max_iter = 1000;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    std::fill(jtj.begin(), jtj.end(), 0.0);
    std::fill(jtr.begin(), jtr.end(), 0.0);
    for (int i = 0; i < nd; ++i) {
      const double f = model(x[i], theta, grad.data());
      const double r = y[i] - f;
      for (int a = 0; a < np; ++a) {
        jtr[a] += w[i] * grad[a] * r;
        for (int b = a; b < np; ++b) jtj[a * np + b] += w[i] * grad[a] * grad[b];
      }
    }
    for (int a = 0; a < np; ++a)
      for (int b = 0; b < a; ++b) jtj[a * np + b] = jtj[b * np + a];

    bool stepped = false;
    while (lambda < 1e12) {
      std::vector<double> A = jtj;
      for (int a = 0; a < np; ++a)
        A[a * np + a] += lambda * std::max(jtj[a * np + a], 1e-12);
      step = jtr;
      if (solve_linear(A, step, np)) {
        for (int a = 0; a < np; ++a) {
          trial[a] = theta[a] + step[a];
          if (!std::isnan(clamp_low[a]))
            trial[a] = std::max(trial[a], clamp_low[a]);
        }
        const double chi2_trial = chi2_of(trial);
        if (std::isfinite(chi2_trial) && chi2_trial <= chi2) {
          const double drop = chi2 - chi2_trial;
          theta = trial;
          chi2 = chi2_trial;
          lambda = std::max(lambda * 0.1, 1e-12);
          stepped = true;
          if (drop <= 1e-12 * (1.0 + chi2)) {
            out.converged = true;
          }
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!stepped) {
      out.converged = true;  // no downhill direction left: stationary point
      break;
    }
    if (out.converged) break;
  }
  out.iterations = iter + 1;
  if (iter == max_iter) out.message = "iteration limit reached";

  // covariance from the Gauss-Newton normal matrix at the optimum
  std::fill(jtj.begin(), jtj.end(), 0.0);
  for (int i = 0; i < nd; ++i) {
    model(x[i], theta, grad.data());
    for (int a = 0; a < np; ++a)
      for (int b = a; b < np; ++b) jtj[a * np + b] += w[i] * grad[a] * grad[b];
  }
  for (int a = 0; a < np; ++a)
    for (int b = 0; b < a; ++b) jtj[a * np + b] = jtj[b * np + a];
  out.sigma.assign(np, 0.0);
  for (int a = 0; a < np; ++a) {
    std::vector<double> A = jtj;
    std::vector<double> e(np, 0.0);
    e[a] = 1.0;
    if (solve_linear(A, e, np) && e[a] > 0.0) out.sigma[a] = std::sqrt(e[a]);
  }
  if (scale_errors && out.dof > 0) {
    const double s = std::sqrt(chi2 / out.dof);
    for (auto& v : out.sigma) v *= s;
  }
  out.theta = std::move(theta);
  out.chi2 = chi2;
  return out;
}

std::vector<double> weights_from_errors(std::span<const double> y,
                                        std::span<const double> error,
                                        bool log_space) {
  std::vector<double> w(y.size(), 1.0);
  if (error.empty()) return w;
  if (error.size() != y.size())
    throw std::invalid_argument("fit: error array size mismatch");
  for (size_t i = 0; i < y.size(); ++i) {
    if (error[i] <= 0.0)
      throw std::invalid_argument("fit: errors must be positive");
    const double sigma = log_space ? error[i] / std::abs(y[i]) : error[i];
    w[i] = 1.0 / (sigma * sigma);
  }
  return w;
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

FitResult fit_power_law(std::span<const double> x,
                        std::span<const double> value,
                        std::span<const double> error) {
  if (x.size() != value.size() || x.size() < 3)
    throw std::invalid_argument("fit_power_law: need >= 3 matched points");
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i] <= 0.0 || value[i] <= 0.0)
      throw std::invalid_argument("fit_power_law: positive data required");

  std::vector<double> lx(x.size()), ly(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(value[i]);
  }
  const auto w = weights_from_errors(value, error, true);
  const auto line = line_fit(lx, ly, w);

  FitResult res;
  res.model = FitModel::power_law;
  res.dof = line.n - 2;
  res.goodness = res.dof > 0 ? line.chi2 / res.dof : 0.0;
  res.converged = true;
  res.x_min = *std::min_element(x.begin(), x.end());
  res.x_max = *std::max_element(x.begin(), x.end());
  const double scale =
      (error.empty() && res.dof > 0) ? std::sqrt(line.chi2 / res.dof) : 1.0;
  res.params["amplitude"] = std::exp(line.intercept);
  res.params["exponent"] = line.slope;
  res.params["eta"] = 2.0 - line.slope;
  res.errors["amplitude"] =
      std::exp(line.intercept) * line.err_intercept * scale;
  res.errors["exponent"] = line.err_slope * scale;
  res.errors["eta"] = line.err_slope * scale;
  return res;
}

FitResult fit_exponential(std::span<const double> r, std::span<const double> g,
                          std::span<const double> error) {
  if (r.size() != g.size() || r.size() < 3)
    throw std::invalid_argument("fit_exponential: need >= 3 matched points");
  for (size_t i = 0; i < r.size(); ++i)
    if (r[i] <= 0.0)
      throw std::invalid_argument("fit_exponential: r must be positive");

  // start from the log-linear solution on the positive subset
  std::vector<double> xs, ys, ws;
  const auto w_full = weights_from_errors(g, error, false);
  for (size_t i = 0; i < r.size(); ++i) {
    if (g[i] <= 0.0) continue;
    xs.push_back(r[i]);
    ys.push_back(std::log(g[i] * std::sqrt(r[i])));
    ws.push_back(1.0);
  }
  double a0 = 1.0, m0 = 0.1;
  if (xs.size() >= 2) {
    const auto line = line_fit(xs, ys, ws);
    a0 = std::exp(line.intercept);
    m0 = std::max(0.0, -line.slope);
  }

  const ModelFn model = [](double x, std::span<const double> th, double* grad) {
    const double base = std::exp(-th[1] * x) / std::sqrt(x);
    if (grad) {
      grad[0] = base;
      grad[1] = -th[0] * x * base;
    }
    return th[0] * base;
  };
  const std::vector<double> clamp = {kNan, 0.0};
  auto out = lm_fit(r, g, w_full, {a0, m0}, model, clamp, error.empty());

  FitResult res;
  res.model = FitModel::exponential;
  res.dof = out.dof;
  res.goodness = out.chi2 / out.dof;
  res.converged = out.converged;
  res.iterations = out.iterations;
  res.message = out.message;
  res.x_min = *std::min_element(r.begin(), r.end());
  res.x_max = *std::max_element(r.begin(), r.end());
  res.params["a"] = out.theta[0];
  res.params["m"] = out.theta[1];
  res.errors["a"] = out.sigma[0];
  res.errors["m"] = out.sigma[1];
  return res;
}

Eq7Fit fit_eq7(std::span<const double> r, std::span<const double> g,
               std::span<const double> error) {
  if (r.size() != g.size() || r.size() < 8)
    throw std::invalid_argument("fit_eq7: need >= 8 matched points");
  for (size_t i = 0; i < r.size(); ++i)
    if (r[i] < 1.0) throw std::invalid_argument("fit_eq7: r must be >= 1");

  const int nd = static_cast<int>(r.size());
  const auto w = weights_from_errors(g, error, false);

  // starting point: profile chi2 over a coarse (m, eta) grid. At fixed
  // (m, eta) the model is linear in (a, b), so those solve exactly; seeding
  // LM from the best grid corner avoids the m~0 ridge where the two terms
  // are nearly collinear and local steps stall.
  auto profiled = [&](double mc, double ec, double& ac, double& bc) {
    double suu = 0, suv = 0, svv = 0, sug = 0, svg = 0;
    for (int i = 0; i < nd; ++i) {
      const double u = std::exp(-mc * r[i]) / std::sqrt(r[i]);
      const double v = std::pow(r[i], -ec);
      suu += w[i] * u * u;
      suv += w[i] * u * v;
      svv += w[i] * v * v;
      sug += w[i] * u * g[i];
      svg += w[i] * v * g[i];
    }
    const double det = suu * svv - suv * suv;
    if (det > 1e-12 * suu * svv) {
      ac = (svv * sug - suv * svg) / det;
      bc = (suu * svg - suv * sug) / det;
    } else {  // collinear columns: lump everything into the exponential
      ac = suu > 0.0 ? sug / suu : 0.0;
      bc = 0.0;
    }
    double acc = 0.0;
    for (int i = 0; i < nd; ++i) {
      const double f = ac * std::exp(-mc * r[i]) / std::sqrt(r[i]) +
                       bc * std::pow(r[i], -ec);
      acc += w[i] * (g[i] - f) * (g[i] - f);
    }
    return acc;
  };
  const double r_hi = *std::max_element(r.begin(), r.end());
  std::vector<double> m_cand = {0.0};
  for (int k = 0; k < 10; ++k)
    m_cand.push_back(0.5 / r_hi * std::pow(2.0, k));  // xi from 2*r_hi down
  const double eta_cand[] = {0.0, 0.15, 0.3, 0.45, 0.6, 0.8, 1.0, 1.3, 1.7, 2.2};
  double a0 = 0.0, m0 = 0.1, b0 = 0.0, eta0 = 0.5;
  double best_start = std::numeric_limits<double>::infinity();
  for (const double mc : m_cand)
    for (const double ec : eta_cand) {
      double ac, bc;
      const double c2 = profiled(mc, ec, ac, bc);
      if (std::isfinite(c2) && c2 < best_start) {
        best_start = c2;
        a0 = ac;
        m0 = mc;
        b0 = bc;
        eta0 = ec;
      }
    }

  const ModelFn mixed = [](double x, std::span<const double> th, double* grad) {
    const double e = std::exp(-th[1] * x) / std::sqrt(x);
    const double p = std::pow(x, -th[3]);
    if (grad) {
      grad[0] = e;
      grad[1] = -th[0] * x * e;
      grad[2] = p;
      grad[3] = -th[2] * std::log(x) * p;
    }
    return th[0] * e + th[2] * p;
  };
  const ModelFn power = [](double x, std::span<const double> th, double* grad) {
    const double p = std::pow(x, -th[1]);
    if (grad) {
      grad[0] = p;
      grad[1] = -th[0] * std::log(x) * p;
    }
    return th[0] * p;
  };

  Eq7Fit fit;
  const double lo = *std::min_element(r.begin(), r.end());
  const double hi = *std::max_element(r.begin(), r.end());

  {
    const std::vector<double> clamp = {kNan, 0.0, kNan, kNan};
    auto out =
        lm_fit(r, g, w, {a0, m0, b0, eta0}, mixed, clamp, error.empty());
    auto& res = fit.mixed;
    res.model = FitModel::eq7;
    res.dof = out.dof;
    res.goodness = out.chi2 / out.dof;
    res.converged = out.converged;
    res.iterations = out.iterations;
    res.message = out.message;
    res.x_min = lo;
    res.x_max = hi;
    const char* names[] = {"a", "m", "b", "eta"};
    for (int k = 0; k < 4; ++k) {
      res.params[names[k]] = out.theta[k];
      res.errors[names[k]] = out.sigma[k];
    }
  }
  {
    const std::vector<double> clamp = {kNan, kNan};
    auto out = lm_fit(r, g, w, {b0 + a0, std::max(eta0, 0.05)}, power, clamp,
                      error.empty());
    auto& res = fit.pure_power;
    res.model = FitModel::power_law;
    res.dof = out.dof;
    res.goodness = out.chi2 / out.dof;
    res.converged = out.converged;
    res.iterations = out.iterations;
    res.message = out.message;
    res.x_min = lo;
    res.x_max = hi;
    res.params["b"] = out.theta[0];
    res.params["eta"] = out.theta[1];
    res.errors["b"] = out.sigma[0];
    res.errors["eta"] = out.sigma[1];
  }
  fit.pure_exponential = fit_exponential(r, g, error);

  const FitResult* best = nullptr;
  const char* tag = "";
  auto consider = [&](const FitResult& res, const char* name) {
    if (!res.converged) return;
    if (best) {
      const double d = res.goodness - best->goodness;
      const bool better =
          d < -1e-9 ||
          (std::abs(d) <= 1e-9 && res.params.size() < best->params.size());
      if (!better) return;
    }
    best = &res;
    tag = name;
  };
  consider(fit.mixed, "eq7");
  consider(fit.pure_power, "power_law");
  consider(fit.pure_exponential, "exponential");
  fit.preferred = tag;
  return fit;
}

}  // namespace onp
