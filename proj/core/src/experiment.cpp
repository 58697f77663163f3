#include "lightray/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lightray/error.hpp"
#include "lightray/phantom.hpp"
#include "lightray/priors.hpp"
#include "lightray/slices.hpp"
#include "lightray/solvers.hpp"
#include "lightray/version.hpp"

namespace lightray {

namespace {

template <typename Fn>
auto stage(std::string_view name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), "stage '" + std::string(name) + "': " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Io, "stage '" + std::string(name) + "': " + e.what());
  }
}

std::string file_stem(Method m) {
  std::string s(to_string(m));
  for (char& c : s) {
    if (c == '-') c = '_';
  }
  return s;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void note(const RunOptions& o, const std::string& msg) {
  if (o.log) o.log(msg);
}

}  // namespace

const ReportRow* ExperimentReport::find(std::string_view method) const {
  for (const auto& r : rows) {
    if (r.method == method) return &r;
  }
  return nullptr;
}

const MethodRun* ExperimentRun::find(Method method) const {
  for (const auto& m : methods) {
    if (m.method == method) return &m;
  }
  return nullptr;
}

ReportRow report_row(std::string_view method, const ReconResult& result) {
  ReportRow row;
  row.method = std::string(method);
  if (result.dp_iter) {
    row.iter_dp = *result.dp_iter;
    row.rre_dp = result.record(*result.dp_iter).rre;
  }
  require(result.min_rre_iter.has_value(), ErrorCode::InvalidArgument, "report rows need RRE histories");
  row.iter_min = *result.min_rre_iter;
  row.rre_min = result.record(row.iter_min).rre;
  return row;
}

std::string format_report_table(const ExperimentReport& report) {
  std::ostringstream os;
  os << "method,rre_dp,iter_dp,rre_min,iter_min\n";
  for (const auto& r : report.rows) {
    os << r.method << ',' << (r.rre_dp ? fixed4(*r.rre_dp) : "") << ','
       << (r.iter_dp ? std::to_string(*r.iter_dp) : "") << ',' << fixed4(r.rre_min) << ',' << r.iter_min << '\n';
  }
  return os.str();
}

std::filesystem::path report_table(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / "report.csv";
  std::ofstream os(path);
  require(os.good(), ErrorCode::Io, "cannot write " + path.string());
  os << format_report_table(report);
  require(os.good(), ErrorCode::Io, "failed writing " + path.string());
  return path;
}

ExperimentReport read_run_directory(const std::filesystem::path& dir) {
  ExperimentReport report;
  for (Method m : {Method::Landweber, Method::Fista, Method::Tikhonov, Method::GenTikhonov}) {
    const auto history_path = dir / ("history_" + file_stem(m) + ".csv");
    const auto stop_path = dir / ("stop_" + file_stem(m) + ".txt");
    if (!std::filesystem::exists(history_path) || !std::filesystem::exists(stop_path)) continue;

    std::map<std::string, std::string> stop;
    std::ifstream ss(stop_path);
    for (std::string line; std::getline(ss, line);) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) stop[line.substr(0, eq)] = line.substr(eq + 1);
    }
    std::map<int, double> rre;
    std::ifstream hs(history_path);
    std::string line;
    std::getline(hs, line);
    require(line == "iter,rre,rrn,objective,lambda", ErrorCode::Io, "unexpected history header in " + history_path.string());
    while (std::getline(hs, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string iter, value;
      std::getline(ls, iter, ',');
      std::getline(ls, value, ',');
      try {
        rre[std::stoi(iter)] = value == "nan" ? std::nan("") : std::stod(value);
      } catch (const std::exception&) {
        fail(ErrorCode::Io, "malformed history row in " + history_path.string());
      }
    }
    ReportRow row;
    row.method = std::string(to_string(m));
    auto as_iter = [&](const std::string& key) -> std::optional<int> {
      const auto it = stop.find(key);
      if (it == stop.end() || it->second == "none") return std::nullopt;
      return std::stoi(it->second);
    };
    row.iter_dp = as_iter("dp_iter");
    if (row.iter_dp) row.rre_dp = rre.at(*row.iter_dp);
    const auto min_iter = as_iter("min_rre_iter");
    require(min_iter && rre.count(*min_iter), ErrorCode::Io, "run directory lacks a minimum-RRE record for " + row.method);
    row.iter_min = *min_iter;
    row.rre_min = rre.at(*min_iter);
    report.rows.push_back(row);
  }
  return report;
}

ExperimentRun build_problem(const ExperimentConfig& cfg, const RunOptions& options) {
  stage("config", [&] {
    cfg.validate();
    return 0;
  });
  ExperimentRun run;
  run.grid = stage("grid", [&] { return cfg.grid.build(); });
  run.x_true = stage("phantom", [&] {
    cfg.phantom.validate(cfg.grid.time_extent);
    return rasterize_phantom(cfg.phantom, run.grid);
  });
  const auto rays = stage("rays", [&] { return enumerate_rays(run.grid, cfg.rays.policy()); });
  note(options, "rays: " + std::to_string(rays.size()));
  run.A = stage("assemble", [&] {
    AssemblyOptions ao;
    ao.scale_by_segment_length = cfg.rays.scale_by_segment_length;
    return assemble_operator(run.grid, rays, ao);
  });
  note(options, "operator: " + std::to_string(run.A.rows()) + " x " + std::to_string(run.A.cols()) + ", " +
                    std::to_string(run.A.nonzeros()) + " nonzeros");
  run.obs = stage("noise", [&] { return add_noise(run.A.apply(run.x_true), cfg.noise.level, cfg.noise.seed); });
  return run;
}

MethodRun run_method(const ExperimentRun& problem, const MethodConfig& mc, const ExperimentConfig& cfg) {
  MethodRun out;
  out.method = mc.method;
  const std::string name = "solve:" + std::string(to_string(mc.method));
  stage(name, [&] {
    const Eigen::VectorXd* truth = &problem.x_true;
    switch (mc.method) {
      case Method::Landweber:
        out.result = landweber(problem.A, problem.obs, truth, mc.options);
        break;
      case Method::Fista: {
        FistaSweep sweep = fista_sweep(problem.A, problem.obs, truth, mc.options);
        out.lambdas = sweep.lambdas;
        out.lambda_min_rre = sweep.min_rre;
        out.result = std::move(sweep.best);
        break;
      }
      case Method::Tikhonov:
        out.result = hybrid_tikhonov(problem.A, problem.obs, truth, mc.options);
        break;
      case Method::GenTikhonov: {
        const CovarianceOperator Q = build_covariance_operator(cfg.grid.build(), mc.prior);
        out.result = gen_tikhonov(problem.A, problem.obs, Q, truth, mc.options);
        break;
      }
    }
    return 0;
  });
  return out;
}

std::string manifest_json(const ExperimentConfig& cfg, const ExperimentRun& run) {
  nlohmann::json m;
  m["version"] = std::string(version_string());
  m["config_hash"] = config_hash(cfg);
  m["seed"] = cfg.noise.seed;
  m["config"] = nlohmann::json::parse(to_json(cfg));
  m["rows"] = run.A.rows();
  m["columns"] = run.A.cols();
  m["nonzeros"] = run.A.nonzeros();
  m["noise_delta"] = run.obs.delta;
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& mr : run.methods) {
    nlohmann::json e;
    e["method"] = std::string(to_string(mr.method));
    e["stop_reason"] = std::string(to_string(mr.result.stop_reason));
    e["iterations"] = mr.result.history.size();
    e["lambda"] = mr.result.lambda;
    if (!mr.lambdas.empty()) e["lambda_grid"] = mr.lambdas;
    methods.push_back(e);
  }
  m["methods"] = methods;
  return m.dump(2) + "\n";
}

ExperimentRun run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  ExperimentRun run = build_problem(cfg, options);

  std::vector<MethodConfig> plan;
  if (options.methods) {
    for (Method m : *options.methods) {
      if (const MethodConfig* configured = cfg.find(m)) {
        plan.push_back(*configured);
      } else {
        MethodConfig fallback;
        fallback.method = m;
        fallback.options.dp_enabled = false;
        plan.push_back(fallback);
      }
    }
  } else {
    plan = cfg.solvers;
  }

  for (const auto& mc : plan) {
    note(options, "solving: " + std::string(to_string(mc.method)));
    run.methods.push_back(run_method(run, mc, cfg));
    run.report.rows.push_back(report_row(to_string(mc.method), run.methods.back().result));
  }

  if (options.write_artifacts) {
    stage("write", [&] {
      const std::filesystem::path dir = cfg.output.directory;
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      require(!ec && std::filesystem::is_directory(dir), ErrorCode::Io, "cannot create " + dir.string());
      report_table(run.report, dir);
      {
        std::ofstream os(dir / "manifest.json");
        require(os.good(), ErrorCode::Io, "cannot write manifest");
        os << manifest_json(cfg, run);
      }
      const SliceFormats formats = SliceFormats::from_names(cfg.output.formats);
      const bool raw = std::find(cfg.output.formats.begin(), cfg.output.formats.end(), "raw") != cfg.output.formats.end();
      for (const auto& mr : run.methods) {
        const std::string stem = file_stem(mr.method);
        write_history_csv(dir / ("history_" + stem + ".csv"), mr.result);
        write_stop_sidecar(dir / ("stop_" + stem + ".txt"), to_string(mr.method), mr.result);
        if (formats.pgm || formats.csv) export_slices(mr.result.x_best, run.grid, dir / ("slices_" + stem), formats);
        if (raw) export_volume(dir / ("volume_" + stem + ".raw"), mr.result.x_best, run.grid);
      }
      return 0;
    });
  }
  return run;
}

}  // namespace lightray
