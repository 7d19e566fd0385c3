#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "commands.hpp"
#include "willslab/errors.hpp"

using namespace wills;
using namespace wills::tool;

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input:
    case ErrorKind::infeasible:
    case ErrorKind::degenerate:
      return 2;
    default:
      return 3; // convergence, tuning, conditioning, proposal, band width
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"willslab: intrinsic volumes, Hadwiger-Wills sampling and "
               "Gaussian-limit experiments for convex bodies"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunContext ctx;
  app.add_option("--seed", ctx.seed.seed, "global RNG seed")
      ->capture_default_str();
  app.add_option("--stream", ctx.seed.stream, "base stream index")
      ->capture_default_str();
  app.add_option("--streams", ctx.streams,
                 "number of deterministic work streams")
      ->capture_default_str();
  app.add_option("--threads", ctx.threads, "worker thread cap")
      ->capture_default_str();
  app.add_option("--out", ctx.out_dir, "output directory")
      ->capture_default_str();
  app.add_option("--format", ctx.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json", "bin"}))
      ->capture_default_str();
  app.add_flag("--check", ctx.check,
               "exit 4 when the command's acceptance check fails");

  VolumesArgs volumes;
  auto* cmd_volumes_app =
      app.add_subcommand("volumes", "exact or fitted intrinsic volumes");
  cmd_volumes_app->add_option("--body", volumes.body_spec,
                              "body JSON (inline or file path)")
      ->required();
  cmd_volumes_app->add_flag("--fit-steiner", volumes.fit_steiner,
                            "Monte Carlo Steiner recovery");
  cmd_volumes_app->add_flag("--constrain-v0", volumes.constrain_v0,
                            "pin v_0 = 1 in the fit");
  cmd_volumes_app->add_option("--radii", volumes.radii,
                              "fit radii (default: geometric spread)");
  cmd_volumes_app->add_option("--wills-scan", volumes.wills_lambdas,
                              "lambdas for W(lambda K) importance sampling");
  cmd_volumes_app
      ->add_option_function<double>(
          "--n", [&volumes](double v) { volumes.n = static_cast<std::size_t>(v); },
          "draws per radius / per lambda")
      ->capture_default_str();

  SampleArgs sample;
  auto* cmd_sample_app = app.add_subcommand("sample", "draw X_K or H_K batches");
  cmd_sample_app->add_option("--body", sample.body_spec, "body JSON")
      ->required();
  cmd_sample_app->add_option("--kind", sample.kind, "points | h")
      ->check(CLI::IsMember({"points", "h"}))
      ->capture_default_str();
  cmd_sample_app
      ->add_option("--route", sample.route,
                   "auto | box-exact | ball-exact | mixture | mala")
      ->check(CLI::IsMember(
          {"auto", "box-exact", "ball-exact", "mixture", "mala"}))
      ->capture_default_str();
  cmd_sample_app->add_option_function<double>(
      "--n", [&sample](double v) { sample.n = static_cast<std::size_t>(v); },
      "number of draws");
  cmd_sample_app->add_flag("--binary", sample.binary,
                           "also write the compact binary batch");
  cmd_sample_app->add_option("--burn-in", sample.burn_in, "MALA burn-in");
  cmd_sample_app->add_option("--step", sample.step, "MALA step");
  cmd_sample_app->add_option("--thin", sample.thin, "MALA thinning");
  cmd_sample_app->add_flag("--no-auto-tune", sample.no_auto_tune,
                           "freeze the MALA step");

  SteinArgs stein;
  auto* cmd_stein_app =
      app.add_subcommand("stein", "A + B bound against the TV proxy");
  cmd_stein_app->add_option("--body", stein.body_spec, "body JSON")->required();
  cmd_stein_app->add_option("--profile", stein.profile_path,
                            "profile JSON for bodies without closed forms");
  cmd_stein_app->add_option_function<double>(
      "--n", [&stein](double v) { stein.n = static_cast<std::size_t>(v); },
      "sample budget");

  CltArgs clt;
  auto* cmd_clt_app =
      app.add_subcommand("clt", "distance-to-Gaussian rate experiment");
  cmd_clt_app->add_option("--family", clt.family, "cube | ball")
      ->check(CLI::IsMember({"cube", "ball"}))
      ->capture_default_str();
  cmd_clt_app->add_option("--c", clt.c, "size constant")->capture_default_str();
  cmd_clt_app->add_option("--alpha", clt.alpha, "size exponent")
      ->capture_default_str();
  cmd_clt_app->add_option("--dgrid", clt.d_grid, "e.g. 16:16384:x4 or 8,16,32")
      ->capture_default_str();
  cmd_clt_app->add_option_function<double>(
      "--n", [&clt](double v) { clt.n = static_cast<std::size_t>(v); },
      "draws per dimension");

  SurfaceLawArgs surface;
  auto* cmd_surface_app = app.add_subcommand(
      "surface-law", "face-dimension law on a distance slice");
  cmd_surface_app->add_option("--body", surface.body_spec, "body JSON")
      ->required();
  cmd_surface_app->add_option("--profile", surface.profile_path,
                              "profile JSON for polytopes");
  cmd_surface_app->add_option("--r", surface.r, "slice distance")
      ->capture_default_str();
  cmd_surface_app->add_option_function<double>(
      "--n", [&surface](double v) { surface.n = static_cast<std::size_t>(v); },
      "number of draws");

  IbpArgs ibp;
  auto* cmd_ibp_app =
      app.add_subcommand("ibp-check", "integration-by-parts residual");
  cmd_ibp_app->add_option("--body", ibp.body_spec, "body JSON")->required();
  cmd_ibp_app->add_option("--fn", ibp.fn, "identity | constant | cubic")
      ->check(CLI::IsMember({"identity", "constant", "cubic"}))
      ->capture_default_str();
  cmd_ibp_app->add_option_function<double>(
      "--n", [&ibp](double v) { ibp.n = static_cast<std::size_t>(v); },
      "number of draws");

  BlArgs bl;
  auto* cmd_bl_app =
      app.add_subcommand("bl-check", "Brascamp-Lieb variance inequality");
  cmd_bl_app->add_option("--body", bl.body_spec, "body JSON (box)")->required();
  cmd_bl_app->add_option("--epsilon", bl.epsilon, "strong-convexity epsilon")
      ->capture_default_str();
  cmd_bl_app->add_option("--fn", bl.fn, "linear | quadratic")
      ->check(CLI::IsMember({"linear", "quadratic"}))
      ->capture_default_str();
  cmd_bl_app->add_option_function<double>(
      "--n", [&bl](double v) { bl.n = static_cast<std::size_t>(v); },
      "number of draws");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_volumes_app->parsed()) return cmd_volumes(ctx, volumes);
    if (cmd_sample_app->parsed()) return cmd_sample(ctx, sample);
    if (cmd_stein_app->parsed()) return cmd_stein(ctx, stein);
    if (cmd_clt_app->parsed()) return cmd_clt(ctx, clt);
    if (cmd_surface_app->parsed()) return cmd_surface_law(ctx, surface);
    if (cmd_ibp_app->parsed()) return cmd_ibp(ctx, ibp);
    if (cmd_bl_app->parsed()) return cmd_bl(ctx, bl);
  } catch (const Error& e) {
    std::fprintf(stderr, "willslab: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "willslab: unexpected failure: %s\n", e.what());
    return 1;
  }
  return 0;
}
