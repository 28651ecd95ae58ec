#include <CLI11.hpp>

#include "postlie/cli/run.hpp"

int main(int argc, char** argv) {
  using postlie::cli::RunConfig;
  CLI::App app{"Exact post-Lie algebra, cohomology, deformation and decorated-tree computations"};
  app.set_version_flag("--version", postlie::cli::kVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  // lists: comma-separated or repeated, never swallowing the positional input
  auto list = [](CLI::Option* o) {
    return o->expected(1)->allow_extra_args(false)->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  };
  auto common = [&](CLI::App* sub, bool with_input) {
    if (with_input) sub->add_option("input", cfg.input, "input JSON file, - for stdin")->capture_default_str();
    sub->add_option("-o,--output", cfg.output, "report path, - for stdout")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "worker threads (default: $POSTLIE_THREADS or 1)");
  };

  auto* check = app.add_subcommand("check", "axiom reports for an algebra");
  common(check, true);

  auto* mc = app.add_subcommand("mc", "Maurer-Cartan residual of the perturbation (pi, omega)");
  common(mc, true);

  auto* coh = app.add_subcommand("cohomology", "post-Lie cohomology of the pre-Lie product");
  common(coh, true);
  list(coh->add_option("--degree", cfg.degrees, "cohomology degrees (1..4), e.g. 1,2,3"))->capture_default_str();
  coh->add_option("--les", cfg.les, "verify the long exact sequence through this degree");

  auto* deform = app.add_subcommand("deform", "formal deformations: residuals, infinitesimal, trivialize");
  deform->add_option("action", cfg.action, "residuals | infinitesimal | trivialize")
      ->required()
      ->check(CLI::IsMember({"residuals", "infinitesimal", "trivialize"}));
  common(deform, true);
  deform->add_option("--random-order", cfg.random_order, "sample a valid deformation of this order from a bare algebra");
  deform->add_option("--seed", cfg.seed, "random seed")->capture_default_str();

  auto* trees = app.add_subcommand("trees", "tree operations on JSON inputs");
  trees->add_option("action", cfg.action, "graft | deform-graft | uparrow | products")
      ->required()
      ->check(CLI::IsMember({"graft", "deform-graft", "uparrow", "products"}));
  common(trees, true);

  auto* verify = app.add_subcommand("trees-verify", "truncated axiom sweep over enumerated trees");
  common(verify, false);
  verify->add_option("--d", cfg.d, "decorations live in N^{d+1}")->capture_default_str();
  verify->add_option("--max-edges", cfg.max_edges, "edges per basis tree, planting edge included")->capture_default_str();
  verify->add_option("--max-decoration", cfg.max_decoration, "componentwise bound on decorations")
      ->capture_default_str();
  verify->add_option("--mode", cfg.mode, "post-lie | pre-lie")
      ->check(CLI::IsMember({"post-lie", "pre-lie"}))
      ->capture_default_str();
  list(verify->add_option("--t", cfg.t_samples, "rational t samples for the t-family"))->capture_default_str();
  verify->add_option("--order", cfg.deformation_order, "deformation residual order, negative disables")
      ->capture_default_str();
  list(verify->add_option("--scaling", cfg.scaling, "scaling weights (d+1 entries)"));
  list(verify->add_option("--mutation", cfg.mutations, "deliberate breakage for harness tests"))
      ->check(CLI::IsMember({"graft-onto-noise-leaves", "uparrow-noise-leaves", "clamp-edge-cutoff", "unit-binomials"}));
  verify->add_flag("!--no-antisymmetry", cfg.antisymmetry, "evaluate every ordered triple");
  verify->add_option("--max-witnesses", cfg.max_witnesses, "witnesses kept in the report")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return postlie::cli::run_io(cfg);
}
