#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "svg.hpp"
#include "willslab/cltlab.hpp"
#include "willslab/errors.hpp"
#include "willslab/intrinsic.hpp"
#include "willslab/numeric.hpp"
#include "willslab/parallel.hpp"
#include "willslab/sampling.hpp"
#include "willslab/serialize.hpp"
#include "willslab/stein.hpp"
#include "willslab/volumetry.hpp"

namespace wills::tool {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw_error(ErrorKind::input, "cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ConvexBody load_body(const std::string& spec) {
  if (!spec.empty() && spec.front() == '{') return body_from_json(spec);
  return body_from_json(read_file(spec));
}

IntrinsicProfile load_or_derive_profile(const ConvexBody& body,
                                        const std::string& profile_path) {
  if (!profile_path.empty())
    return profile_from_json(read_file(profile_path));
  return profile_for(body);
}

void write_text(const RunContext& ctx, const std::string& name,
                const std::string& content) {
  fs::create_directories(ctx.out_dir);
  const fs::path path = fs::path(ctx.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw_error(ErrorKind::input, "cannot write artifact: " + path.string());
  out << content;
}

/// Config echo embedded in every artifact. Thread count is an execution
/// detail and never recorded: artifacts must be identical across --threads.
json meta_block(const RunContext& ctx, const std::string& command,
                json config) {
  json meta;
  meta["tool"] = kVersion;
  meta["command"] = command;
  meta["seed"] = ctx.seed.seed;
  meta["stream"] = ctx.seed.stream;
  meta["streams"] = ctx.streams;
  meta["config"] = std::move(config);
  return meta;
}

std::string csv_number(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

SamplerTag parse_route_tag(const std::string& route) {
  if (route == "box-exact") return SamplerTag::box_exact;
  if (route == "ball-exact") return SamplerTag::ball_exact;
  if (route == "mixture") return SamplerTag::mixture;
  if (route == "mala") return SamplerTag::mala;
  throw_error(ErrorKind::input, "unknown route: " + route);
}

} // namespace

std::vector<int> parse_d_grid(const std::string& spec) {
  std::vector<int> grid;
  if (spec.find(':') != std::string::npos) {
    // start:stop:xFACTOR
    const auto first = spec.find(':');
    const auto second = spec.find(':', first + 1);
    if (second == std::string::npos || spec[second + 1] != 'x')
      throw_error(ErrorKind::input,
                  "d grid must be 'start:stop:xFACTOR' or a comma list");
    const long start = std::stol(spec.substr(0, first));
    const long stop = std::stol(spec.substr(first + 1, second - first - 1));
    const long factor = std::stol(spec.substr(second + 2));
    if (start < 1 || stop < start || factor < 2)
      throw_error(ErrorKind::input, "bad d grid bounds");
    for (long d = start; d <= stop; d *= factor)
      grid.push_back(static_cast<int>(d));
    return grid;
  }
  std::stringstream stream(spec);
  std::string token;
  while (std::getline(stream, token, ','))
    grid.push_back(std::stoi(token));
  if (grid.empty()) throw_error(ErrorKind::input, "empty d grid");
  return grid;
}

int cmd_volumes(const RunContext& ctx, const VolumesArgs& args) {
  const ConvexBody body = load_body(args.body_spec);
  json config{{"body", json::parse(body_to_json(body))},
              {"fit_steiner", args.fit_steiner},
              {"constrain_v0", args.constrain_v0},
              {"n", args.n}};

  if (body.kind() != BodyKind::hpolytope && !args.fit_steiner &&
      args.wills_lambdas.empty()) {
    const IntrinsicProfile profile = profile_for(body);
    json doc = json::parse(profile_to_json(profile));
    doc["meta"] = meta_block(ctx, "volumes", config);
    write_text(ctx, "profile.json", doc.dump(2) + "\n");
    return 0;
  }

  if (args.fit_steiner || (args.wills_lambdas.empty() &&
                           body.kind() == BodyKind::hpolytope)) {
    std::vector<double> radii = args.radii;
    if (radii.empty()) radii = default_steiner_radii(body, body.dim() + 4);
    config["radii"] = radii;
    SteinerFitOptions opts;
    opts.threads = ctx.threads;
    opts.constrain_v0 = args.constrain_v0;
    const SteinerFit fit = fit_steiner(body, radii, args.n, ctx.seed, opts);

    std::ostringstream csv;
    csv << "r,estimate,stderr,n\n";
    for (std::size_t i = 0; i < fit.radii.size(); ++i)
      csv << csv_number(fit.radii[i]) << "," << csv_number(fit.volumes[i].value)
          << "," << csv_number(fit.volumes[i].stderr) << ","
          << fit.volumes[i].n << "\n";
    write_text(ctx, "steiner_fit.csv", csv.str());

    json doc;
    doc["v"] = std::vector<double>(fit.v.data(), fit.v.data() + fit.v.size());
    json cov = json::array();
    for (int i = 0; i < fit.covariance.rows(); ++i) {
      json row = json::array();
      for (int j = 0; j < fit.covariance.cols(); ++j)
        row.push_back(fit.covariance(i, j));
      cov.push_back(row);
    }
    doc["covariance"] = cov;
    doc["condition"] = fit.condition;
    if ((fit.v.array() > 0.0).all()) {
      const json profile = json::parse(profile_to_json(fit.to_profile()));
      doc["d"] = profile["d"];
      doc["log_v"] = profile["log_v"];
    }
    doc["meta"] = meta_block(ctx, "volumes", config);
    write_text(ctx, "profile.json", doc.dump(2) + "\n");
  }

  if (!args.wills_lambdas.empty()) {
    config["lambdas"] = args.wills_lambdas;
    WillsScanOptions wopts;
    wopts.threads = ctx.threads;
    const WillsScan scan = estimate_wills_scaled(body, args.wills_lambdas,
                                                 args.n, ctx.seed, wopts);
    std::ostringstream csv;
    csv << "lambda,estimate,stderr,n,ess\n";
    for (std::size_t i = 0; i < scan.lambdas.size(); ++i)
      csv << csv_number(scan.lambdas[i]) << "," << csv_number(scan.estimates[i])
          << "," << csv_number(scan.stderrs[i]) << "," << args.n << ","
          << csv_number(scan.ess[i]) << "\n";
    write_text(ctx, "wills_scan.csv", csv.str());
  }
  return 0;
}

int cmd_sample(const RunContext& ctx, const SampleArgs& args) {
  const ConvexBody body = load_body(args.body_spec);
  json config{{"body", json::parse(body_to_json(body))},
              {"kind", args.kind},
              {"route", args.route},
              {"n", args.n}};

  MalaOptions mala;
  mala.burn_in = args.burn_in;
  mala.step = args.step;
  mala.thin = args.thin;
  mala.auto_tune = !args.no_auto_tune;

  const bool want_h = args.kind == "h";
  if (!want_h && args.kind != "points")
    throw_error(ErrorKind::input, "kind must be 'points' or 'h'");

  // One sub-batch per stream, concatenated in stream order.
  SampleBatch combined;
  combined.seed = ctx.seed;
  combined.dim = want_h ? 1 : body.dim();
  combined.kind = want_h ? BatchKind::h_values : BatchKind::points;
  if (!want_h)
    combined.points.resize(static_cast<Eigen::Index>(args.n), body.dim());
  else
    combined.h.reserve(args.n);

  const bool has_profile = body.kind() != BodyKind::hpolytope;
  double acceptance_sum = 0.0, ess_sum = 0.0;
  std::size_t chains = 0;
  Eigen::Index write_row = 0;
  for (std::size_t s = 0; s < ctx.streams; ++s) {
    const std::size_t chunk = stream_chunk(args.n, ctx.streams, s);
    if (chunk == 0) continue;
    const SeedSpec seed = ctx.seed.with_stream(ctx.seed.stream + s);
    SampleBatch part;
    if (want_h && (args.route == "auto" || args.route == "mixture") &&
        has_profile) {
      part = sample_hk_mixture(vk_law(profile_for(body)), body.dim(), chunk,
                               seed);
      combined.sampler = SamplerTag::mixture;
    } else {
      SampleBatch points;
      if (args.route == "auto") {
        points = sample_points_auto(body, chunk, seed, mala);
      } else {
        switch (parse_route_tag(args.route)) {
          case SamplerTag::box_exact:
            points = sample_box_exact(body, chunk, seed);
            break;
          case SamplerTag::ball_exact:
            points = sample_ball_exact(body, chunk, seed);
            break;
          case SamplerTag::mala:
            points = sample_mala(body, chunk, mala, seed);
            break;
          case SamplerTag::mixture:
            throw_error(ErrorKind::input,
                        want_h ? "mixture route needs a closed-form profile "
                                 "(box or ball); use mala for polytopes"
                               : "route 'mixture' draws H values; use "
                                 "--kind h");
        }
      }
      combined.sampler = points.sampler;
      if (points.diagnostics) {
        acceptance_sum += points.diagnostics->acceptance_rate;
        ess_sum += points.diagnostics->ess;
        ++chains;
      }
      part = want_h ? h_from_points(body, points) : std::move(points);
    }
    if (want_h) {
      combined.h.insert(combined.h.end(), part.h.begin(), part.h.end());
    } else {
      combined.points.middleRows(write_row,
                                 static_cast<Eigen::Index>(chunk)) =
          part.points;
      write_row += static_cast<Eigen::Index>(chunk);
    }
  }
  if (chains > 0) {
    MalaDiagnostics diag;
    diag.acceptance_rate = acceptance_sum / static_cast<double>(chains);
    diag.ess = ess_sum;
    combined.diagnostics = diag;
  }

  json doc;
  doc["kind"] = want_h ? "h_values" : "points";
  doc["sampler"] = to_string(combined.sampler);
  doc["origin"] = describe(body);
  doc["n"] = combined.size();
  doc["dim"] = body.dim();
  if (combined.diagnostics) {
    doc["acceptance_rate"] = combined.diagnostics->acceptance_rate;
    doc["ess"] = combined.diagnostics->ess;
  }
  if (ctx.format == "json") {
    if (want_h) {
      doc["values"] = combined.h;
    } else {
      json points = json::array();
      for (Eigen::Index i = 0; i < combined.points.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < body.dim(); ++j)
          row.push_back(combined.points(i, j));
        points.push_back(row);
      }
      doc["points"] = points;
    }
  }
  doc["meta"] = meta_block(ctx, "sample", config);
  write_text(ctx, "batch.json", doc.dump(2) + "\n");

  if (ctx.format == "csv") {
    std::ostringstream csv;
    write_batch_csv(combined, csv);
    write_text(ctx, "batch.csv", csv.str());
  }
  if (args.binary || ctx.format == "bin") {
    std::ostringstream bin(std::ios::binary);
    write_batch_binary(combined, bin);
    write_text(ctx, "batch.bin", bin.str());
  }
  return 0;
}

int cmd_stein(const RunContext& ctx, const SteinArgs& args) {
  const ConvexBody body = load_body(args.body_spec);
  const IntrinsicProfile profile =
      load_or_derive_profile(body, args.profile_path);
  json config{{"body", json::parse(body_to_json(body))}, {"n", args.n}};

  SteinOptions opts;
  opts.streams = ctx.streams;
  opts.threads = ctx.threads;
  const SteinReport report = stein_bound(body, profile, args.n, ctx.seed, opts);

  json doc;
  doc["d"] = report.d;
  doc["body"] = report.body;
  doc["sigma"] = report.sigma;
  doc["A"] = report.a;
  doc["A_stderr"] = report.a_stderr;
  doc["B"] = report.b;
  doc["B_stderr"] = report.b_stderr;
  doc["bound"] = report.bound;
  doc["bound_alt"] = report.bound_alt;
  doc["empirical_tv"] = report.empirical_tv;
  doc["bound_active"] = report.bound_active();
  doc["bound_alt_active"] =
      report.bound_alt >= report.empirical_tv - 4.0 * report.combined_stderr();
  doc["n"] = report.n;
  doc["meta"] = meta_block(ctx, "stein", config);
  write_text(ctx, "stein_report.json", doc.dump(2) + "\n");

  std::ostringstream csv;
  csv << "d,A,A_stderr,B,B_stderr,bound,empirical_tv,n\n"
      << report.d << "," << csv_number(report.a) << ","
      << csv_number(report.a_stderr) << "," << csv_number(report.b) << ","
      << csv_number(report.b_stderr) << "," << csv_number(report.bound) << ","
      << csv_number(report.empirical_tv) << "," << report.n << "\n";
  write_text(ctx, "stein_report.csv", csv.str());

  if (ctx.check && !report.bound_active()) return 4;
  return 0;
}

int cmd_clt(const RunContext& ctx, const CltArgs& args) {
  FamilySpec spec;
  if (args.family == "cube")
    spec.kind = FamilySpec::Kind::cube;
  else if (args.family == "ball")
    spec.kind = FamilySpec::Kind::ball;
  else
    throw_error(ErrorKind::input, "family must be 'cube' or 'ball'");
  spec.c = args.c;
  spec.alpha = args.alpha;
  const std::vector<int> grid = parse_d_grid(args.d_grid);
  json config{{"family", args.family}, {"c", args.c},     {"alpha", args.alpha},
              {"dgrid", args.d_grid},  {"n", args.n}};

  ExperimentOptions opts;
  opts.streams = ctx.streams;
  opts.threads = ctx.threads;
  const CltReport report =
      run_family_experiment(spec, grid, args.n, ctx.seed, opts);

  // d^{1/2 - alpha} * KS: the rate-scaled distance; bounded along families
  // with diameter c d^alpha.
  double scaled_max = 0.0;
  json rows = json::array();
  for (const auto& row : report.rows) {
    const double scaled =
        std::pow(static_cast<double>(row.d), 0.5 - args.alpha) * row.ks;
    scaled_max = std::max(scaled_max, scaled);
    rows.push_back({{"d", row.d},
                    {"ks", row.ks},
                    {"ks_band", row.ks_band},
                    {"tv_proxy", row.tv},
                    {"w1", row.w1},
                    {"scaled_ks", scaled},
                    {"n", row.n}});
  }
  json doc;
  doc["family"] = args.family;
  doc["c"] = args.c;
  doc["alpha"] = args.alpha;
  doc["rows"] = rows;
  doc["slope"] = report.fit.slope;
  doc["slope_stderr"] = report.fit.stderr;
  doc["scaled_ks_max"] = scaled_max;
  doc["meta"] = meta_block(ctx, "clt", config);
  write_text(ctx, "clt_report.json", doc.dump(2) + "\n");

  std::ostringstream csv;
  csv << "d,ks,ks_band,tv_proxy,w1,n\n";
  for (const auto& row : report.rows)
    csv << row.d << "," << csv_number(row.ks) << "," << csv_number(row.ks_band)
        << "," << csv_number(row.tv) << "," << csv_number(row.w1) << ","
        << row.n << "\n";
  write_text(ctx, "clt_report.csv", csv.str());
  write_text(ctx, "clt_report.svg", clt_report_svg(report));
  return 0;
}

int cmd_surface_law(const RunContext& ctx, const SurfaceLawArgs& args) {
  const ConvexBody body = load_body(args.body_spec);
  const IntrinsicProfile profile =
      load_or_derive_profile(body, args.profile_path);
  json config{{"body", json::parse(body_to_json(body))},
              {"r", args.r},
              {"n", args.n}};

  const SurfaceSliceResult slice =
      estimate_surface_slice(body, profile, args.r, args.n, ctx.seed);

  std::ostringstream csv;
  csv << "i,empirical,theoretical\n";
  for (std::size_t i = 0; i < slice.empirical.size(); ++i)
    csv << i << "," << csv_number(slice.empirical[i]) << ","
        << csv_number(slice.theoretical.probs[i]) << "\n";
  write_text(ctx, "surface_law.csv", csv.str());

  json doc;
  doc["r"] = slice.r;
  doc["band_half_width"] = slice.band_half_width;
  doc["hits"] = slice.hits;
  doc["skipped_boundary"] = slice.skipped_boundary;
  doc["tv"] = slice.tv;
  doc["e_p_theoretical"] = slice.theoretical.e_p;
  doc["meta"] = meta_block(ctx, "surface-law", config);
  write_text(ctx, "surface_law.json", doc.dump(2) + "\n");
  return 0;
}

int cmd_ibp(const RunContext& ctx, const IbpArgs& args) {
  const ConvexBody body = load_body(args.body_spec);
  IbpTestFn fn;
  if (args.fn == "identity")
    fn = IbpTestFn::identity;
  else if (args.fn == "constant")
    fn = IbpTestFn::constant;
  else if (args.fn == "cubic")
    fn = IbpTestFn::cubic;
  else
    throw_error(ErrorKind::input, "fn must be identity|constant|cubic");
  json config{{"body", json::parse(body_to_json(body))},
              {"fn", args.fn},
              {"n", args.n}};

  SteinOptions opts;
  opts.streams = ctx.streams;
  opts.threads = ctx.threads;
  const Estimate residual = check_ibp(body, fn, args.n, ctx.seed, opts);
  const bool pass = std::abs(residual.value) <= 4.0 * residual.stderr;

  json doc;
  doc["fn"] = args.fn;
  doc["residual"] = residual.value;
  doc["stderr"] = residual.stderr;
  doc["within_4_stderr"] = pass;
  doc["meta"] = meta_block(ctx, "ibp-check", config);
  write_text(ctx, "ibp_check.json", doc.dump(2) + "\n");
  return (ctx.check && !pass) ? 4 : 0;
}

int cmd_bl(const RunContext& ctx, const BlArgs& args) {
  const ConvexBody body = load_body(args.body_spec);
  BlTestFn fn;
  if (args.fn == "linear")
    fn = BlTestFn::linear;
  else if (args.fn == "quadratic")
    fn = BlTestFn::quadratic;
  else
    throw_error(ErrorKind::input, "fn must be linear|quadratic");
  json config{{"body", json::parse(body_to_json(body))},
              {"epsilon", args.epsilon},
              {"fn", args.fn},
              {"n", args.n}};

  SteinOptions opts;
  opts.streams = ctx.streams;
  opts.threads = ctx.threads;
  const BrascampLiebResult out =
      brascamp_lieb_check(body, args.epsilon, fn, args.n, ctx.seed, opts);

  json doc;
  doc["epsilon"] = args.epsilon;
  doc["fn"] = args.fn;
  doc["variance"] = out.variance.value;
  doc["variance_stderr"] = out.variance.stderr;
  doc["bound"] = out.bound.value;
  doc["bound_stderr"] = out.bound.stderr;
  doc["holds"] = out.holds;
  doc["meta"] = meta_block(ctx, "bl-check", config);
  write_text(ctx, "bl_check.json", doc.dump(2) + "\n");
  return (ctx.check && !out.holds) ? 4 : 0;
}

} // namespace wills::tool
