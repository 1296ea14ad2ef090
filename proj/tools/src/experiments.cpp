#include "mrmap_tools/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "mrmap/flow.hpp"
#include "mrmap/io.hpp"
#include "mrmap/potential.hpp"
#include "mrmap_tools/corpus.hpp"

namespace mrmap_tools {

using namespace mrmap;

namespace {

// Stream ids for dataset-level draws, far away from the per-datum streams
// (0..n-1) and the init stream used by fit.
constexpr uint64_t kTrainDataStream = 0x7000000000000001ull;
constexpr uint64_t kValDataStream = 0x7000000000000002ull;
constexpr uint64_t kTruthStream = 0x7000000000000003ull;
constexpr uint64_t kEvalStreamBase = 0x7100000000000000ull;

const char* kPalette[6] = {"#d62728", "#1f77b4", "#2ca02c",
                           "#ff7f0e", "#9467bd", "#8c564b"};

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

Gauss1dReport run_gauss1d(const Gauss1dConfig& config) {
  if (config.n_grid.empty() || config.seeds < 1)
    throw std::invalid_argument("gauss1d: need a size grid and at least one seed");
  std::vector<int> grid = config.n_grid;
  std::sort(grid.begin(), grid.end());
  const int n_max = grid.back();
  const int n_sizes = static_cast<int>(grid.size());

  // rows indexed [size][seed]
  std::vector<std::vector<double>> star(n_sizes), hat(n_sizes), tilde(n_sizes);
  std::vector<std::vector<bool>> neg(n_sizes);
  for (int s = 0; s < config.seeds; ++s) {
    RngStream rng(config.seed, static_cast<uint64_t>(s));
    Vector x(n_max), d(n_max);
    const double sd = std::sqrt(config.theta);
    for (int i = 0; i < n_max; ++i) {
      x[i] = sd * rng.next_normal();
      d[i] = x[i] + config.sigma * rng.next_normal();
    }
    for (int gi = 0; gi < n_sizes; ++gi) {
      Vector xs(x.begin(), x.begin() + grid[gi]);
      Vector ds(d.begin(), d.begin() + grid[gi]);
      star[gi].push_back(theta_star_1d(xs));
      FlaggedEstimate fe = theta_hat_1d(xs, ds, config.sigma);
      hat[gi].push_back(fe.value);
      neg[gi].push_back(fe.negative);
      tilde[gi].push_back(theta_tilde_1d(xs, ds, config.sigma));
    }
  }

  Gauss1dReport report;
  const int top = n_sizes - 1;
  for (int s = 0; s < config.seeds; ++s) {
    report.mean_star += star[top][s];
    report.mean_hat += hat[top][s];
    report.mean_tilde += tilde[top][s];
  }
  report.mean_star /= config.seeds;
  report.mean_hat /= config.seeds;
  report.mean_tilde /= config.seeds;
  for (int gi = 0; gi < n_sizes; ++gi)
    for (int s = 0; s < config.seeds; ++s)
      if (neg[gi][s]) ++report.negative_flags;

  std::vector<double> log_n, log_err;
  for (int gi = 0; gi < n_sizes; ++gi) {
    double err = 0.0;
    for (int s = 0; s < config.seeds; ++s) err += std::abs(hat[gi][s] - config.theta);
    err /= config.seeds;
    log_n.push_back(std::log(static_cast<double>(grid[gi])));
    log_err.push_back(std::log(err));
  }
  report.slope = fit_slope(log_n, log_err);

  if (!config.out.empty()) {
    fs::create_directories(config.out);
    auto csv = open_csv(config.out / "estimators.csv");
    csv << "n,seed,theta_star,theta_hat,theta_tilde,hat_negative\n";
    for (int gi = 0; gi < n_sizes; ++gi)
      for (int s = 0; s < config.seeds; ++s)
        csv << grid[gi] << "," << s << "," << format_double(star[gi][s]) << ","
            << format_double(hat[gi][s]) << "," << format_double(tilde[gi][s]) << ","
            << (neg[gi][s] ? 1 : 0) << "\n";
    auto sum = open_csv(config.out / "summary.csv");
    sum << "stat,value\n";
    sum << "mean_theta_star," << format_double(report.mean_star) << "\n";
    sum << "mean_theta_hat," << format_double(report.mean_hat) << "\n";
    sum << "mean_theta_tilde," << format_double(report.mean_tilde) << "\n";
    sum << "negative_flags," << report.negative_flags << "\n";
    sum << "slope," << format_double(report.slope) << "\n";
  }
  return report;
}

LangevinReport run_langevin(const LangevinConfig& config) {
  Matrix Theta = config.Theta;
  if (Theta.rows == 0) {
    Theta = Matrix(2, 2);
    Theta(0, 0) = 1000.0;
    Theta(0, 1) = Theta(1, 0) = -1.0;
    Theta(1, 1) = 2.0;
  }
  const int dim = Theta.rows;
  if (config.snapshots.empty() || config.chains < 1)
    throw std::invalid_argument("langevin: need snapshots and chains");
  std::vector<int> snaps = config.snapshots;
  std::sort(snaps.begin(), snaps.end());

  Eigen::MatrixXd T(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) T(i, j) = Theta(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  const Eigen::VectorXd v = es.eigenvectors().col(0);  // smallest eigenvalue: slow direction
  const double lambda_min = es.eigenvalues()(0);

  RngStream rng(config.seed, kTrainDataStream);
  Matrix init(dim, config.chains);
  std::vector<Matrix> snapshots;
  langevin_run(Theta, config.delta, snaps.back(), rng, init, snaps, &snapshots);

  RngStream truth_rng(config.seed, kTruthStream);
  Matrix truth = sample_gaussian_precision(Theta, config.chains, truth_rng);

  const Matrix S = ar1_stationary_cov(Theta, config.delta);
  double ar1_slow = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) ar1_slow += v(i) * S(i, j) * v(j);

  LangevinReport report;
  report.true_slow_var = 1.0 / lambda_min;
  for (size_t k = 0; k < snaps.size(); ++k) {
    double var = 0.0;
    for (int c = 0; c < config.chains; ++c) {
      double proj = 0.0;
      for (int i = 0; i < dim; ++i) proj += v(i) * snapshots[k](i, c);
      var += proj * proj;
    }
    var /= config.chains;
    report.iters.push_back(snaps[k]);
    report.slow_var.push_back(var);
    report.slow_ratio.push_back(var / report.true_slow_var);
    report.ar1_slow_var.push_back(ar1_slow);
  }
  report.snapshot_samples = snapshots;

  if (!config.out.empty()) {
    fs::create_directories(config.out);
    auto csv = open_csv(config.out / "samples.csv");
    csv << "kind,iters,chain,";
    for (int i = 0; i < dim; ++i) csv << (i ? "," : "") << "x" << i;
    csv << "\n";
    for (int c = 0; c < config.chains; ++c) {
      csv << "true,-1," << c << ",";
      for (int i = 0; i < dim; ++i) csv << (i ? "," : "") << format_double(truth(i, c));
      csv << "\n";
    }
    for (size_t k = 0; k < snaps.size(); ++k)
      for (int c = 0; c < config.chains; ++c) {
        csv << "langevin," << snaps[k] << "," << c << ",";
        for (int i = 0; i < dim; ++i) csv << (i ? "," : "") << format_double(snapshots[k](i, c));
        csv << "\n";
      }

    auto vcsv = open_csv(config.out / "variance.csv");
    vcsv << "iters,slow_var,true_slow_var,ratio,ar1_slow_var\n";
    for (size_t k = 0; k < snaps.size(); ++k)
      vcsv << report.iters[k] << "," << format_double(report.slow_var[k]) << ","
           << format_double(report.true_slow_var) << "," << format_double(report.slow_ratio[k])
           << "," << format_double(report.ar1_slow_var[k]) << "\n";

    if (dim == 2) {
      double lim = 1e-12;
      auto widen = [&](const Matrix& m) {
        for (double x : m.data) lim = std::max(lim, std::abs(x));
      };
      widen(truth);
      for (const auto& s : snapshots) widen(s);
      lim *= 1.1;
      for (size_t k = 0; k < snaps.size(); ++k) {
        ScatterSeries red, blue;
        red.color = "#d62728";
        blue.color = "#1f77b4";
        for (int c = 0; c < config.chains; ++c) {
          red.points.emplace_back(truth(0, c), truth(1, c));
          blue.points.emplace_back(snapshots[k](0, c), snapshots[k](1, c));
        }
        write_svg_scatter(config.out / ("snapshot_" + std::to_string(snaps[k]) + ".svg"),
                          {red, blue}, -lim, lim, -lim, lim,
                          "Langevin after " + std::to_string(snaps[k]) + " iterations");
      }
    }
  }
  return report;
}

int nearest_mean(const MixtureSpec& spec, const Vector& x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < spec.means.size(); ++k) {
    Vector diff = vsub(x, spec.means[k]);
    const double d2 = dot(diff, diff);
    if (d2 < best_d) {
      best_d = d2;
      best = static_cast<int>(k);
    }
  }
  return best;
}

namespace {

struct RecoveredPoint {
  Vector x, d_embedded, xhat;
  double phi_true = 0.0, phi_model = 0.0;
};

std::vector<RecoveredPoint> recover_points(const PotentialParams& params, const MixtureSpec& spec,
                                           const Matrix& data, const TrainConfig& tc,
                                           uint64_t stream_base) {
  std::vector<RecoveredPoint> out;
  const int p = data.rows;
  for (int c = 0; c < data.cols; ++c) {
    RecoveredPoint pt;
    pt.x.resize(p);
    for (int i = 0; i < p; ++i) pt.x[i] = data(i, c);
    RngStream rng(tc.seed, stream_base + static_cast<uint64_t>(c));
    ForwardOperator op = sample_mask(p, tc.mask_fraction, rng);
    LatentDatum datum = make_latent(pt.x, op, tc.sigma, rng);
    FlowTrajectory traj = run_flow(params, datum, tc.cg_iters, 0.0);
    pt.d_embedded = apply_adjoint(op, datum.d);
    pt.xhat = decode(params, traj.u[params.ell]);
    pt.phi_true = -mixture_log_density(spec, pt.x);
    pt.phi_model = potential_value(params, traj.u);
    out.push_back(std::move(pt));
  }
  return out;
}

void write_points_csv(const fs::path& path, const std::vector<RecoveredPoint>& pts) {
  auto csv = open_csv(path);
  const int p = pts.empty() ? 0 : static_cast<int>(pts.front().x.size());
  for (int i = 0; i < p; ++i) csv << (i ? "," : "") << "x" << i;
  for (int i = 0; i < p; ++i) csv << ",d" << i;
  for (int i = 0; i < p; ++i) csv << ",xhat" << i;
  csv << ",phi_true,phi_model\n";
  for (const auto& pt : pts) {
    for (int i = 0; i < p; ++i) csv << (i ? "," : "") << format_double(pt.x[i]);
    for (int i = 0; i < p; ++i) csv << "," << format_double(pt.d_embedded[i]);
    for (int i = 0; i < p; ++i) csv << "," << format_double(pt.xhat[i]);
    csv << "," << format_double(pt.phi_true) << "," << format_double(pt.phi_model) << "\n";
  }
}

void write_points_svg(const fs::path& path, const MixtureSpec& spec,
                      const std::vector<RecoveredPoint>& pts, const Vector RecoveredPoint::*field,
                      const std::string& title) {
  ScatterSeries series;
  for (const auto& pt : pts) {
    const Vector& v = pt.*field;
    series.points.emplace_back(v[0], v[1]);
    series.point_colors.push_back(kPalette[nearest_mean(spec, v) % 6]);
  }
  write_svg_scatter(path, {series}, -12.0, 12.0, -12.0, 12.0, title);
}

}  // namespace

MixtureReport run_mixture(const MixtureConfig& config) {
  const MixtureSpec spec = MixtureSpec::default_hexagon();
  TrainConfig tc = config.train;
  tc.validate();

  RngStream train_rng(tc.seed, kTrainDataStream);
  Matrix train_data = sample_mixture(spec, config.n_train, train_rng);
  RngStream val_rng(tc.seed, kValDataStream);
  Matrix val_data = sample_mixture(spec, config.n_val, val_rng);

  FitResult fitted = fit(train_data, tc);

  MixtureReport report;
  report.metrics = fitted.metrics;
  report.params = fitted.params;
  report.final_rc = fitted.metrics.back().rc;
  for (const auto& em : fitted.metrics) report.train_seconds += em.wall_seconds;

  auto val_pts = recover_points(fitted.params, spec, val_data, tc, kEvalStreamBase);
  auto train_pts =
      recover_points(fitted.params, spec, train_data, tc, kEvalStreamBase + (1ull << 32));
  double mse = 0.0;
  int preserved = 0;
  for (const auto& pt : val_pts) {
    Vector diff = vsub(pt.xhat, pt.x);
    mse += dot(diff, diff);
    if (nearest_mean(spec, pt.xhat) == nearest_mean(spec, pt.x)) ++preserved;
  }
  report.val_mse = mse / config.n_val;
  report.preservation = static_cast<double>(preserved) / config.n_val;

  if (!config.out.empty()) {
    fs::create_directories(config.out);
    save_checkpoint(config.out / "checkpoint.json", fitted.params, tc);
    write_metrics_csv(config.out / "metrics.csv", fitted.metrics);
    write_points_csv(config.out / "train_points.csv", train_pts);
    write_points_csv(config.out / "val_points.csv", val_pts);
    write_points_svg(config.out / "data.svg", spec, train_pts, &RecoveredPoint::x,
                     "Training data");
    write_points_svg(config.out / "latent.svg", spec, val_pts, &RecoveredPoint::d_embedded,
                     "Latent observations");
    write_points_svg(config.out / "recovered.svg", spec, val_pts, &RecoveredPoint::xhat,
                     "Recovered");
    auto sum = open_csv(config.out / "summary.csv");
    sum << "stat,value\n";
    sum << "final_rc," << format_double(report.final_rc) << "\n";
    sum << "val_mse," << format_double(report.val_mse) << "\n";
    sum << "preservation," << format_double(report.preservation) << "\n";
    sum << "train_seconds," << format_double(report.train_seconds) << "\n";
  }
  return report;
}

RecoverReport run_recover(const RecoverConfig& config) {
  const Matrix& images = config.images;
  const int p = images.rows;
  if (p != config.params.p)
    throw std::runtime_error("recover: dataset dimension does not match checkpoint");
  if (config.masks_per_image < 1) throw std::invalid_argument("recover: masks_per_image");

  if (!config.out.empty()) fs::create_directories(config.out);

  RecoverReport report;
  report.fractions = config.fractions;
  constexpr uint64_t kStreamsPerImage = 64;
  for (size_t fi = 0; fi < config.fractions.size(); ++fi) {
    const double fraction = config.fractions[fi];
    std::vector<double> errs;
    int skipped = 0;
    for (int c = 0; c < images.cols; ++c) {
      Vector x(p);
      for (int i = 0; i < p; ++i) x[i] = images(i, c);
      const double x2 = dot(x, x);
      if (x2 == 0.0) {
        if (fi == 0)
          std::cerr << "warning: skipping all-zero image " << c
                    << " (relative error undefined)\n";
        ++skipped;
        continue;
      }
      RngStream rng(config.seed, static_cast<uint64_t>(c) * kStreamsPerImage + fi);
      for (int t = 0; t < config.masks_per_image; ++t) {
        ForwardOperator op = sample_mask(p, fraction, rng);
        LatentDatum datum = make_latent(x, op, config.sigma, rng);
        FlowTrajectory traj = run_flow(config.params, datum);
        Vector xhat = decode(config.params, traj.u[config.params.ell]);
        Vector diff = vsub(xhat, x);
        errs.push_back(dot(diff, diff) / x2);
        if (t == 0 && c < config.pgm_examples && !config.out.empty() && p == kImagePixels) {
          Matrix img(kImageSide, kImageSide);
          for (int i = 0; i < p; ++i) img(i / kImageSide, i % kImageSide) = xhat[i];
          char name[64];
          std::snprintf(name, sizeof(name), "image%03d_f%03d.pgm", c,
                        static_cast<int>(std::lround(fraction * 100)));
          write_pgm(config.out / name, img);
        }
      }
    }
    if (fi == 0) report.skipped = skipped;
    double mean = 0.0;
    for (double e : errs) mean += e;
    mean /= errs.size();
    double var = 0.0;
    for (double e : errs) var += (e - mean) * (e - mean);
    report.mean_rel_err.push_back(mean);
    report.std_rel_err.push_back(errs.size() > 1 ? std::sqrt(var / (errs.size() - 1)) : 0.0);
  }

  if (!config.out.empty()) {
    if (config.pgm_examples > 0 && p == kImagePixels)
      for (int c = 0; c < std::min(config.pgm_examples, images.cols); ++c) {
        char name[64];
        std::snprintf(name, sizeof(name), "image%03d_orig.pgm", c);
        write_pgm(config.out / name, image_from_column(images, c));
      }
    auto csv = open_csv(config.out / "recovery.csv");
    csv << "fraction,mean_rel_err,std_rel_err,skipped\n";
    for (size_t fi = 0; fi < config.fractions.size(); ++fi)
      csv << format_double(config.fractions[fi]) << "," << format_double(report.mean_rel_err[fi])
          << "," << format_double(report.std_rel_err[fi]) << "," << report.skipped << "\n";
  }
  return report;
}

void write_metrics_csv(const fs::path& path, const std::vector<EpochMetrics>& metrics) {
  auto csv = open_csv(path);
  csv << "epoch,re,rp,rc,total,lr,seconds\n";
  for (const auto& em : metrics)
    csv << em.epoch << "," << format_double(em.re) << "," << format_double(em.rp) << ","
        << format_double(em.rc) << "," << format_double(em.total) << "," << format_double(em.lr)
        << "," << format_double(em.wall_seconds) << "\n";
}

}  // namespace mrmap_tools
