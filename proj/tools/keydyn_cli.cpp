#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "keydyn/commands.hpp"
#include "keydyn/errors.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Experiment config file (JSON)");
  cmd->add_option("--seed", flags.seed, "Top-level random seed");
  cmd->add_option("--out", flags.out, "Experiment directory");
}

keydyn::ExperimentConfig resolve(const CommonFlags& flags) {
  auto config = flags.config_path.empty() ? keydyn::ExperimentConfig{}
                                          : keydyn::ExperimentConfig::load(flags.config_path);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.out) config.out_dir = *flags.out;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keystroke dynamics simulator and verification pipeline"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string init_path = "keydyn.json";
  int users = 0;
  int chars = 0;
  std::string keyboard = "all";
  std::optional<double> nu;
  std::optional<double> threshold;
  std::string which = "all";

  auto* init = app.add_subcommand("init", "Write a config file with every default filled in");
  init->add_option("path", init_path, "Destination file")->capture_default_str();
  add_common(init, flags);

  auto* simulate = app.add_subcommand("simulate", "Simulate the session grid and write manifest.json");
  add_common(simulate, flags);
  simulate->add_option("--users", users, "Use only the first N users of the profile table")->check(CLI::PositiveNumber);
  simulate->add_option("--chars", chars, "Characters per session")->check(CLI::PositiveNumber);

  auto* extract = app.add_subcommand("extract", "Compute windowed features for every session");
  add_common(extract, flags);

  auto* ks = app.add_subcommand("ks", "Kolmogorov-Smirnov p-value matrices");
  add_common(ks, flags);
  ks->add_option("--keyboard", keyboard, "laptop, mechanical, cross or all")
      ->check(CLI::IsMember({"laptop", "mechanical", "cross", "all"}));

  auto* ocsvm = app.add_subcommand("ocsvm", "One-class SVM inlier-rate matrices");
  add_common(ocsvm, flags);
  ocsvm->add_option("--nu", nu, "One-class nu")->check(CLI::Range(1e-6, 1.0));

  auto* rf = app.add_subcommand("rf", "Random forest session comparison tables");
  add_common(rf, flags);
  rf->add_option("--keyboard", keyboard, "laptop, mechanical, cross or all")
      ->check(CLI::IsMember({"laptop", "mechanical", "cross", "all"}));
  rf->add_option("--threshold", threshold, "Accuracy above which sessions are different users");

  auto* report = app.add_subcommand("report", "Produce tables and a summary");
  add_common(report, flags);
  report->add_option("which", which, "ks, ocsvm, rf or all")->check(CLI::IsMember({"ks", "ocsvm", "rf", "all"}));
  report->add_option("--keyboard", keyboard, "laptop, mechanical, cross or all")
      ->check(CLI::IsMember({"laptop", "mechanical", "cross", "all"}));
  report->add_option("--nu", nu, "One-class nu")->check(CLI::Range(1e-6, 1.0));
  report->add_option("--threshold", threshold, "Accuracy above which sessions are different users");

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = resolve(flags);
    if (nu) config.ocsvm.nu = *nu;
    if (threshold) config.rf.threshold = *threshold;
    const auto scope = keydyn::parse_keyboard_scope(keyboard);

    if (init->parsed()) {
      keydyn::cmd_init(init_path, config);
      std::cout << init_path << '\n';
    } else if (simulate->parsed()) {
      if (users > 0) {
        auto& list = config.profiles.users;
        if (static_cast<std::size_t>(users) < list.size()) list.resize(static_cast<std::size_t>(users));
      }
      if (chars > 0) config.n_chars = chars;
      keydyn::cmd_simulate(config);
      std::cout << config.manifest_path().string() << '\n';
    } else if (extract->parsed()) {
      const auto n = keydyn::cmd_extract(config.manifest_path());
      std::cout << n << " feature files written\n";
    } else if (ks->parsed()) {
      keydyn::cmd_ks(config, scope);
      std::cout << config.report_dir().string() << '\n';
    } else if (ocsvm->parsed()) {
      keydyn::cmd_ocsvm(config);
      std::cout << config.report_dir().string() << '\n';
    } else if (rf->parsed()) {
      keydyn::cmd_rf(config, scope);
      std::cout << config.report_dir().string() << '\n';
    } else if (report->parsed()) {
      std::cout << keydyn::cmd_report(config, which, scope).to_text();
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
