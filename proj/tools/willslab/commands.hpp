#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "willslab/rng.hpp"

namespace wills::tool {

inline constexpr const char* kVersion = "willslab 0.1.0";

/// Global run configuration; everything a command needs to reproduce its
/// artifacts bit-identically (thread count deliberately excluded: it may not
/// change any output).
struct RunContext {
  SeedSpec seed{0, 0};
  std::size_t streams = 32;
  int threads = 1;
  std::string out_dir = ".";
  std::string format = "csv"; // csv | json
  bool check = false;
};

struct VolumesArgs {
  std::string body_spec;
  bool fit_steiner = false;
  bool constrain_v0 = false;
  std::vector<double> radii;        // empty: defaults
  std::vector<double> wills_lambdas;
  std::size_t n = 1000000;
};

struct SampleArgs {
  std::string body_spec;
  std::string kind = "points"; // points | h
  std::string route = "auto";  // auto | box-exact | ball-exact | mixture | mala
  std::size_t n = 10000;
  bool binary = false;
  // mala knobs
  std::size_t burn_in = 2000;
  double step = 0.5;
  std::size_t thin = 1;
  bool no_auto_tune = false;
};

struct SteinArgs {
  std::string body_spec;
  std::string profile_path; // optional, for bodies without closed forms
  std::size_t n = 100000;
};

struct CltArgs {
  std::string family = "cube"; // cube | ball
  double c = 0.5;
  double alpha = 0.0;
  std::string d_grid = "16:16384:x4";
  std::size_t n = 1000000;
};

struct SurfaceLawArgs {
  std::string body_spec;
  std::string profile_path;
  double r = 1.0;
  std::size_t n = 1000000;
};

struct IbpArgs {
  std::string body_spec;
  std::string fn = "identity"; // identity | constant | cubic
  std::size_t n = 100000;
};

struct BlArgs {
  std::string body_spec;
  double epsilon = 0.1;
  std::string fn = "linear"; // linear | quadratic
  std::size_t n = 100000;
};

int cmd_volumes(const RunContext& ctx, const VolumesArgs& args);
int cmd_sample(const RunContext& ctx, const SampleArgs& args);
int cmd_stein(const RunContext& ctx, const SteinArgs& args);
int cmd_clt(const RunContext& ctx, const CltArgs& args);
int cmd_surface_law(const RunContext& ctx, const SurfaceLawArgs& args);
int cmd_ibp(const RunContext& ctx, const IbpArgs& args);
int cmd_bl(const RunContext& ctx, const BlArgs& args);

std::vector<int> parse_d_grid(const std::string& spec);

} // namespace wills::tool
