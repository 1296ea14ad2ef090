#include <cmath>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "mrmap/io.hpp"
#include "mrmap_tools/corpus.hpp"
#include "mrmap_tools/experiments.hpp"

namespace {

using namespace mrmap;
using namespace mrmap_tools;

/// Flat JSON object as a CLI11 config source: keys are long option names,
/// arrays map to repeated values. Unknown keys are rejected by CLI11.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    input >> j;
    if (!j.is_object()) throw CLI::ConfigError("config must be a JSON object");
    std::vector<CLI::ConfigItem> out;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.name = key;
      if (value.is_array())
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(value));
      out.push_back(std::move(item));
    }
    return out;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  }
};

void setup_config(CLI::App* cmd) {
  cmd->set_config("--config", "", "JSON settings file; command-line flags win on conflict")
      ->check(CLI::ExistingFile);
  cmd->config_formatter(std::make_shared<JsonConfig>());
}

void add_train_options(CLI::App* cmd, TrainConfig& tc) {
  cmd->add_option("--epochs", tc.epochs, "training epochs")->capture_default_str();
  cmd->add_option("--batch-size", tc.batch_size)->capture_default_str();
  cmd->add_option("--lr", tc.lr, "initial learning rate")->capture_default_str();
  cmd->add_option("--lr-decay-factor", tc.lr_decay_factor)->capture_default_str();
  cmd->add_option("--lr-decay-every", tc.lr_decay_every, "epochs between decays")
      ->capture_default_str();
  cmd->add_option("--weight-decay", tc.weight_decay)->capture_default_str();
  cmd->add_option("--alpha", tc.alpha, "projected-loss weight")->capture_default_str();
  cmd->add_option("--gamma", tc.gamma, "consistency-loss weight")->capture_default_str();
  cmd->add_option("--sigma", tc.sigma, "observation noise level")->capture_default_str();
  cmd->add_option("--mask-fraction", tc.mask_fraction, "observed fraction during training")
      ->capture_default_str();
  cmd->add_option("--q", tc.q, "embedding dimension")->capture_default_str();
  cmd->add_option("--ell", tc.ell, "network depth")->capture_default_str();
  cmd->add_option("--beta", tc.beta, "Tikhonov weight")->capture_default_str();
  cmd->add_option("--h-step", tc.h, "step size of the hyperbolic recurrence")
      ->capture_default_str();
  cmd->add_option("--cg-iters", tc.cg_iters)->capture_default_str();
  cmd->add_option("--seed", tc.seed, "master seed")->capture_default_str();
}

Matrix matrix_from_flat(const std::vector<double>& flat) {
  const int dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(flat.size()))));
  if (static_cast<size_t>(dim) * dim != flat.size())
    throw CLI::ValidationError("--theta", "needs a square number of entries (row-major)");
  Matrix m(dim, dim);
  m.data = flat;
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum-recovery MAP estimation of Gibbs potentials"};
  app.require_subcommand(1);

  Gauss1dConfig gauss;
  auto* cmd_gauss = app.add_subcommand("gauss1d", "scalar Gaussian estimator sweep");
  setup_config(cmd_gauss);
  cmd_gauss->add_option("--theta", gauss.theta, "true variance")->capture_default_str();
  cmd_gauss->add_option("--sigma", gauss.sigma, "observation noise")->capture_default_str();
  cmd_gauss->add_option("--n-grid", gauss.n_grid, "sample sizes (largest one is reported)")
      ->capture_default_str();
  cmd_gauss->add_option("--seeds", gauss.seeds, "independent replications")->capture_default_str();
  cmd_gauss->add_option("--seed", gauss.seed)->capture_default_str();
  cmd_gauss->add_option("--out", gauss.out, "output directory")->required();

  LangevinConfig lang;
  lang.chains = 500;
  std::vector<double> theta_flat;
  auto* cmd_lang = app.add_subcommand("langevin", "Langevin sampling vs the exact Gaussian");
  setup_config(cmd_lang);
  cmd_lang->add_option("--delta", lang.delta, "step size")->capture_default_str();
  cmd_lang->add_option("--chains", lang.chains)->capture_default_str();
  cmd_lang->add_option("--snapshots", lang.snapshots, "iteration counts to record")
      ->capture_default_str();
  cmd_lang->add_option("--theta", theta_flat,
                       "precision matrix, row-major (default [[1000,-1],[-1,2]])");
  cmd_lang->add_option("--seed", lang.seed)->capture_default_str();
  cmd_lang->add_option("--out", lang.out, "output directory")->required();

  MixtureConfig mix;
  auto* cmd_mix = app.add_subcommand("mixture", "Gaussian-mixture recovery experiment");
  setup_config(cmd_mix);
  add_train_options(cmd_mix, mix.train);
  cmd_mix->add_option("--n-train", mix.n_train)->capture_default_str();
  cmd_mix->add_option("--n-val", mix.n_val)->capture_default_str();
  cmd_mix->add_option("--out", mix.out, "output directory")->required();

  int train_count = 2000, test_count = 500;
  uint64_t images_seed = 1;
  std::filesystem::path images_out;
  auto* cmd_mkimg = app.add_subcommand("make-images", "generate the procedural 8x8 corpus");
  setup_config(cmd_mkimg);
  cmd_mkimg->add_option("--train-count", train_count)->capture_default_str();
  cmd_mkimg->add_option("--test-count", test_count)->capture_default_str();
  cmd_mkimg->add_option("--seed", images_seed)->capture_default_str();
  cmd_mkimg->add_option("--out", images_out, "output directory")->required();

  TrainConfig img_tc;
  img_tc.mask_fraction = 0.3;
  img_tc.sigma = 0.05;
  std::filesystem::path img_data, img_out;
  auto* cmd_timg = app.add_subcommand("train-images", "train a model on an image dataset");
  setup_config(cmd_timg);
  add_train_options(cmd_timg, img_tc);
  cmd_timg->add_option("--data", img_data, "dataset CSV (with .json sidecar)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_timg->add_option("--out", img_out, "output directory")->required();

  RecoverConfig rec;
  rec.pgm_examples = 4;
  rec.sigma = -1.0;  // default: checkpoint value
  std::filesystem::path rec_ckpt, rec_data;
  auto* cmd_rec = app.add_subcommand("recover", "masked recovery sweep over pixel fractions");
  setup_config(cmd_rec);
  cmd_rec->add_option("--checkpoint", rec_ckpt)->required()->check(CLI::ExistingFile);
  cmd_rec->add_option("--data", rec_data, "dataset CSV (with .json sidecar)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_rec->add_option("--fractions", rec.fractions, "observed-pixel fractions")
      ->capture_default_str();
  cmd_rec->add_option("--masks-per-image", rec.masks_per_image)->capture_default_str();
  cmd_rec->add_option("--sigma", rec.sigma, "observation noise (default: checkpoint value)");
  cmd_rec->add_option("--pgm-examples", rec.pgm_examples)->capture_default_str();
  cmd_rec->add_option("--seed", rec.seed)->capture_default_str();
  cmd_rec->add_option("--out", rec.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(cmd_gauss)) {
      Gauss1dReport r = run_gauss1d(gauss);
      std::cout << "mean theta_star = " << r.mean_star << "\nmean theta_hat  = " << r.mean_hat
                << "\nmean theta_tilde = " << r.mean_tilde
                << "\nnegative flags = " << r.negative_flags << "\nerror slope = " << r.slope
                << "\n";
    } else if (app.got_subcommand(cmd_lang)) {
      if (!theta_flat.empty()) lang.Theta = matrix_from_flat(theta_flat);
      LangevinReport r = run_langevin(lang);
      for (size_t k = 0; k < r.iters.size(); ++k)
        std::cout << "iters " << r.iters[k] << ": slow-direction variance ratio "
                  << r.slow_ratio[k] << "\n";
    } else if (app.got_subcommand(cmd_mix)) {
      MixtureReport r = run_mixture(mix);
      std::cout << "final mean R_c = " << r.final_rc << "\nvalidation MSE = " << r.val_mse
                << "\ncomponent preservation = " << r.preservation
                << "\ntraining time = " << r.train_seconds << " s\n";
    } else if (app.got_subcommand(cmd_mkimg)) {
      std::filesystem::create_directories(images_out);
      Matrix train = make_image_corpus(train_count, images_seed, 0);
      Matrix test = make_image_corpus(test_count, images_seed, 1u << 24);
      nlohmann::json meta{{"kind", "images8x8"}, {"side", kImageSide}};
      save_dataset(images_out / "train.csv", train, meta);
      save_dataset(images_out / "test.csv", test, meta);
      std::cout << "wrote " << train_count << " train and " << test_count << " test images\n";
    } else if (app.got_subcommand(cmd_timg)) {
      Matrix data = load_dataset(img_data);
      FitResult fitted = fit(data, img_tc);
      std::filesystem::create_directories(img_out);
      save_checkpoint(img_out / "checkpoint.json", fitted.params, img_tc);
      write_metrics_csv(img_out / "metrics.csv", fitted.metrics);
      std::cout << "final loss = " << fitted.metrics.back().total << "\n";
    } else if (app.got_subcommand(cmd_rec)) {
      Checkpoint ckpt = load_checkpoint(rec_ckpt);
      rec.params = ckpt.params;
      if (rec.sigma < 0.0) rec.sigma = ckpt.config.sigma;
      rec.images = load_dataset(rec_data);
      RecoverReport r = run_recover(rec);
      for (size_t fi = 0; fi < r.fractions.size(); ++fi)
        std::cout << "fraction " << r.fractions[fi] << ": relative error " << r.mean_rel_err[fi]
                  << " +- " << r.std_rel_err[fi] << "\n";
      if (r.skipped > 0) std::cout << "skipped " << r.skipped << " all-zero images\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
