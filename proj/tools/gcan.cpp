#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gcan/gcan.hpp"
#include "gcan/verify.hpp"

namespace {

using namespace gcan;

constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Explicit path, else $GCAN_DATA_DIR/<fallback>.
std::string resolve(const std::string& given, const char* fallback, const char* flag) {
  if (!given.empty()) return given;
  if (const char* dir = std::getenv("GCAN_DATA_DIR"); dir && *dir) return (std::filesystem::path(dir) / fallback).string();
  throw UsageError(std::string(flag) + " is required (or set GCAN_DATA_DIR)");
}

struct Args {
  std::string signature;
  std::string suite = "all";
  std::string fault;
  std::size_t samples = 200;
  std::size_t n_traj = 256;
  std::size_t steps = 5000;
  std::uint64_t seed = 0;
  std::string model = "gca";
  std::size_t hidden = 0;
  bool velocities = false;
  double noise = 0.01;
  std::size_t batch = 128;
  double lr = 1e-3;
  std::string out, data, checkpoint, log;
};

int cmd_table(const Args& a) {
  std::cout << format_cayley_table(*Algebra::make(a.signature));
  return 0;
}

int cmd_verify(const Args& a) {
  const auto& names = verify::suite_names();
  if (std::find(names.begin(), names.end(), a.suite) == names.end()) throw UsageError("unknown suite \"" + a.suite + "\"");
  verify::Options opt;
  opt.seed = a.seed;
  opt.samples = a.samples;
  if (!a.fault.empty()) {
    const auto comma = a.fault.find(',');
    if (comma == std::string::npos) throw UsageError("--fault expects j,k");
    opt.fault = {{std::stoul(a.fault.substr(0, comma)), std::stoul(a.fault.substr(comma + 1))}};
  }
  return verify::print_report(verify::run_suite(a.suite, opt), std::cout) ? 0 : 1;
}

int cmd_gen(const Args& a) {
  tetris::GeneratorConfig g;
  g.n_traj = a.n_traj;
  g.seed = a.seed;
  g.noise = a.noise;
  g.velocities = a.velocities;
  const auto path = resolve(a.out, "tetris.bin", "--out");
  tetris::save_dataset(tetris::generate_dataset(g), path);
  std::cout << "wrote " << a.n_traj << " trajectories to " << path << '\n';
  return 0;
}

tetris::ModelConfig model_config(const Args& a) {
  tetris::ModelConfig gca;
  gca.velocities = a.velocities;
  tetris::ModelConfig mc = tetris::model_kind_from_string(a.model) == tetris::ModelKind::gca_mlp ? gca : tetris::matched_baseline(gca);
  if (a.hidden) mc.hidden = a.hidden;
  return mc;
}

int cmd_train(const Args& a) {
  const auto data = tetris::load_dataset(resolve(a.data, "tetris.bin", "--data"));
  if (a.velocities && !data.has_velocities) throw UsageError("--velocities needs a dataset generated with --velocities");
  const auto mc = model_config(a);
  auto model = tetris::build_model(mc);
  model->reset_parameters(a.seed);
  std::ofstream file;
  std::ostream* log = &std::cout;
  if (!a.log.empty()) {
    file.open(a.log);
    if (!file) throw Error(ErrorCode::io_error, "cannot write " + a.log);
    log = &file;
  }
  tetris::train_model(*model, data, {a.steps, a.batch, a.lr, a.seed, 0}, nullptr, log);
  const auto ckpt = resolve(a.checkpoint, "model.ckpt", "--checkpoint");
  save_checkpoint(model->params(), ckpt, {{"model", mc.to_json()}, {"steps", a.steps}, {"seed", a.seed}});
  std::cerr << "saved " << model->parameter_count() << " parameters to " << ckpt << '\n';
  return 0;
}

int cmd_eval(const Args& a) {
  const auto ckpt = resolve(a.checkpoint, "model.ckpt", "--checkpoint");
  const auto meta = checkpoint_meta(ckpt);
  if (!meta.contains("model")) throw Error(ErrorCode::parse_error, ckpt + " has no model description");
  auto model = tetris::build_model(tetris::ModelConfig::from_json(meta["model"]));
  load_checkpoint(model->params(), ckpt);
  const auto data = tetris::load_dataset(resolve(a.data, "tetris.bin", "--data"));
  if (model->config().velocities && !data.has_velocities) throw UsageError("model expects velocities but the dataset has none");
  const double mse = tetris::evaluate(*model, data);
  std::cout << nlohmann::json{{"model", tetris::to_string(model->config().kind)}, {"n_traj", data.n_traj}, {"mse", mse}}.dump()
            << '\n';
  return 0;
}

bool usage_code(ErrorCode c) {
  return c == ErrorCode::dimension_cap || c == ErrorCode::bad_signature || c == ErrorCode::parse_error ||
         c == ErrorCode::invalid_config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric Clifford algebra networks: tables, checks and the Tetris experiment"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with default flag values; command-line flags win");
  Args a;

  auto* table = app.add_subcommand("table", "Print the Cayley table of G(p,q,r)");
  table->add_option("signature", a.signature, "p,q,r")->required();

  auto* ver = app.add_subcommand("verify", "Run invariant suites");
  ver->add_option("suite", a.suite, "cayley, algebra, pin, layers, train, tetris or all");
  ver->add_option("--seed", a.seed);
  ver->add_option("--samples", a.samples, "random cases per property")->check(CLI::PositiveNumber);
  ver->add_option("--fault", a.fault)->group("");

  auto* gen = app.add_subcommand("gen", "Generate a Tetris trajectory file");
  gen->add_option("--n-traj", a.n_traj)->check(CLI::PositiveNumber);
  gen->add_option("--seed", a.seed);
  gen->add_option("--noise", a.noise)->check(CLI::NonNegativeNumber);
  gen->add_flag("--velocities", a.velocities);
  gen->add_option("--out", a.out);

  auto* train = app.add_subcommand("train", "Train a model; one JSON record per step");
  train->add_option("--data", a.data);
  train->add_option("--steps", a.steps)->check(CLI::PositiveNumber);
  train->add_option("--seed", a.seed);
  train->add_option("--model", a.model)->check(CLI::IsMember({"gca", "mlp"}));
  train->add_option("--hidden", a.hidden, "hidden width (default: 38 for gca, parameter-matched for mlp)");
  train->add_flag("--velocities", a.velocities);
  train->add_option("--batch", a.batch)->check(CLI::PositiveNumber);
  train->add_option("--lr", a.lr)->check(CLI::PositiveNumber);
  train->add_option("--checkpoint", a.checkpoint, "output checkpoint");
  train->add_option("--log", a.log, "NDJSON file (default stdout)");

  auto* eval = app.add_subcommand("eval", "Test MSE of a checkpoint on a dataset");
  eval->add_option("--data", a.data);
  eval->add_option("--checkpoint", a.checkpoint);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*table) return cmd_table(a);
    if (*ver) return cmd_verify(a);
    if (*gen) return cmd_gen(a);
    if (*train) return cmd_train(a);
    return cmd_eval(a);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage_code(e.code()) ? kUsage : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
