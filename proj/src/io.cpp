#include "sir/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace sir::io {

using nlohmann::json;

namespace {

[[noreturn]] void io_fail(const std::string& msg) {
  fail(ErrorCode::io_error, msg);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) io_fail("cannot open " + tmp + " for writing");
    out << content;
    if (!out) io_fail("short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) io_fail("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Minimal CSV: comma-separated, no quoting, declared header required.
struct CsvReader {
  explicit CsvReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) io_fail("cannot open " + path);
  }

  // Returns false at EOF; errors carry the 1-based row number.
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++row_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      fields.clear();
      std::stringstream ss(line);
      std::string field;
      while (std::getline(ss, field, ',')) fields.push_back(field);
      if (!line.empty() && line.back() == ',') fields.push_back("");
      return true;
    }
    return false;
  }

  void expect_header(const std::vector<std::string>& names) {
    std::vector<std::string> fields;
    if (!next(fields)) io_fail(path_ + ": empty file, expected header");
    if (fields != names) {
      std::string want;
      for (const auto& n : names) want += (want.empty() ? "" : ",") + n;
      io_fail(path_ + " row 1: bad header, expected '" + want + "'");
    }
  }

  [[noreturn]] void fail_row(const std::string& msg) {
    io_fail(path_ + " row " + std::to_string(row_) + ": " + msg);
  }

  double parse_double(const std::string& s) {
    try {
      size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) fail_row("bad numeric value '" + s + "'");
      return v;
    } catch (const std::exception&) {
      fail_row("bad numeric value '" + s + "'");
    }
  }

  const std::string& path() const { return path_; }
  long row() const { return row_; }

private:
  std::string path_;
  std::ifstream in_;
  long row_ = 0;
};

bool parse_month(const std::string& s, int& ym) {
  if (s.size() != 7 || s[4] != '-') return false;
  for (int i : {0, 1, 2, 3, 5, 6})
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  const int year = std::stoi(s.substr(0, 4));
  const int month = std::stoi(s.substr(5, 2));
  if (month < 1 || month > 12) return false;
  ym = year * 12 + (month - 1);
  return true;
}

std::map<std::string, int> label_index(const std::vector<std::string>& labels) {
  std::map<std::string, int> out;
  for (size_t i = 0; i < labels.size(); ++i)
    out[labels[i]] = static_cast<int>(i);
  return out;
}

CovariateRole parse_role(const std::string& s) {
  if (s == "direct") return CovariateRole::direct;
  if (s == "sender") return CovariateRole::sender;
  if (s == "receiver") return CovariateRole::receiver;
  if (s == "both") return CovariateRole::both;
  io_fail("unknown covariate role '" + s + "'");
}

Transform parse_transform(const std::string& s) {
  if (s == "identity") return Transform::identity;
  if (s == "log1p") return Transform::log1p;
  io_fail("unknown covariate transform '" + s + "'");
}

// Raw covariate observations: per name, per raw period, a dense matrix plus
// presence flags.
struct RawCovariate {
  std::vector<MatrixXd> values;       // per raw period
  std::vector<Eigen::MatrixXi> seen;  // 1 when the cell appeared in the file
};

std::map<std::string, RawCovariate>
read_covariate_file(const std::string& path, const std::vector<std::string>& actors,
                    const std::vector<std::string>& periods) {
  const auto aidx = label_index(actors);
  const auto pidx = label_index(periods);
  const int n = static_cast<int>(actors.size());
  const int T = static_cast<int>(periods.size());

  std::map<std::string, RawCovariate> out;
  CsvReader csv(path);
  csv.expect_header({"period", "source", "target", "name", "value"});
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != 5) csv.fail_row("expected 5 fields, got " + std::to_string(f.size()));
    const auto pit = pidx.find(f[0]);
    if (pit == pidx.end()) csv.fail_row("period '" + f[0] + "' outside declared range");
    const auto sit = aidx.find(f[1]);
    const auto tit = aidx.find(f[2]);
    if (sit == aidx.end()) csv.fail_row("unknown actor '" + f[1] + "'");
    if (tit == aidx.end()) csv.fail_row("unknown actor '" + f[2] + "'");
    const double v = csv.parse_double(f[4]);
    if (!std::isfinite(v)) csv.fail_row("non-finite covariate value");
    auto& rc = out[f[3]];
    if (rc.values.empty()) {
      rc.values.assign(T, MatrixXd::Zero(n, n));
      rc.seen.assign(T, Eigen::MatrixXi::Zero(n, n));
    }
    rc.values[pit->second](sit->second, tit->second) = v;
    rc.seen[pit->second](sit->second, tit->second) = 1;
  }
  return out;
}

// Resolve the covariate value for (i, j) at raw period r under the fill
// policy; `need_diag` marks influence usage where self-pairs are required.
double resolve_cell(const RawCovariate& rc, const std::string& name, int i,
                    int j, int r, FillPolicy fill) {
  if (rc.seen[r](i, j)) return rc.values[r](i, j);
  if (fill == FillPolicy::carry_forward) {
    for (int back = r - 1; back >= 0; --back)
      if (rc.seen[back](i, j)) return rc.values[back](i, j);
  }
  fail(ErrorCode::io_error,
       "covariate '" + name + "' missing cell (" + std::to_string(i) + "," +
           std::to_string(j) + ") at period index " + std::to_string(r) +
           " under " + (fill == FillPolicy::strict ? "strict" : "carry-forward") +
           " fill policy");
}

double apply_transform(double v, Transform t) {
  if (t == Transform::log1p) {
    if (v < -1.0 + 1e-12)
      fail(ErrorCode::io_error, "log1p transform applied to value <= -1");
    return std::log1p(v);
  }
  return v;
}

json report_to_json(const ComparisonReport& report) {
  json models = json::array();
  for (const auto& ms : report.models) {
    json folds = json::array();
    for (const auto& f : ms.folds) {
      folds.push_back({{"dawid_sebastiani", f.dawid_sebastiani},
                       {"logarithmic", f.logarithmic},
                       {"brier", f.brier},
                       {"spherical", f.spherical},
                       {"rmse", f.rmse},
                       {"cells", f.cells}});
    }
    json summary;
    for (const auto& [rule, s] : ms.summary)
      summary[rule] = {{"mean", s.mean}, {"min", s.min}, {"max", s.max}};
    models.push_back(
        {{"model", ms.model}, {"folds", folds}, {"summary", summary}});
  }
  json folds_json = json::array();
  for (const auto& f : report.plan.folds) folds_json.push_back(f);
  return {{"plan",
           {{"k", report.plan.k},
            {"m", report.plan.m},
            {"seed", report.plan.seed},
            {"overlap", report.plan.overlap},
            {"folds", folds_json}}},
          {"fold_cells", report.fold_cells},
          {"models", models}};
}

CovariateKind parse_kind(const std::string& s) {
  if (s == "intercept") return CovariateKind::intercept;
  if (s == "normal_static") return CovariateKind::normal_static;
  if (s == "ar1") return CovariateKind::ar1;
  if (s == "self_indicator") return CovariateKind::self_indicator;
  io_fail("unknown simulated covariate kind '" + s + "'");
}

} // namespace

std::vector<std::string> month_range(const std::string& start,
                                     const std::string& end) {
  int a, b;
  if (!parse_month(start, a))
    io_fail("bad period label '" + start + "', expected YYYY-MM");
  if (!parse_month(end, b))
    io_fail("bad period label '" + end + "', expected YYYY-MM");
  if (b < a) io_fail("period range end precedes start");
  std::vector<std::string> out;
  for (int ym = a; ym <= b; ++ym) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", ym / 12, ym % 12 + 1);
    out.push_back(buf);
  }
  return out;
}

DyadTensor ingest_events(const std::string& path,
                         const std::vector<std::string>& actors,
                         const std::vector<std::string>& periods,
                         bool drop_unknown) {
  if (actors.size() < 2) io_fail("need at least 2 actors");
  if (periods.size() < 2) io_fail("need at least 2 periods");
  const auto aidx = label_index(actors);
  const auto pidx = label_index(periods);

  DyadTensor y(static_cast<int>(actors.size()), static_cast<int>(periods.size()),
               actors, periods);

  CsvReader csv(path);
  csv.expect_header({"period", "source", "target", "count"});
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != 4)
      csv.fail_row("expected 4 fields, got " + std::to_string(f.size()));
    const auto pit = pidx.find(f[0]);
    if (pit == pidx.end()) {
      int ym;
      if (!parse_month(f[0], ym))
        csv.fail_row("unparseable period '" + f[0] + "'");
      csv.fail_row("period '" + f[0] + "' outside declared range");
    }
    const auto sit = aidx.find(f[1]);
    const auto tit = aidx.find(f[2]);
    if (sit == aidx.end() || tit == aidx.end()) {
      if (drop_unknown) continue;
      csv.fail_row("unknown actor '" + (sit == aidx.end() ? f[1] : f[2]) + "'");
    }
    if (sit->second == tit->second)
      csv.fail_row("source equals target ('" + f[1] + "'); self-ties are undefined");
    const double c = csv.parse_double(f[3]);
    if (c < 0) csv.fail_row("negative count");
    if (std::abs(c - std::round(c)) > 1e-8) csv.fail_row("non-integral count");
    y.cell(sit->second, tit->second, pit->second) += c;
  }
  return y;
}

std::tuple<DirectDesign, InfluenceDesign, InfluenceDesign>
ingest_designs(const RunConfig& cfg, const DyadTensor& y) {
  const int n = y.n;
  const int Tm = y.modeled_periods();

  std::map<std::string, RawCovariate> raw;
  if (!cfg.covariates.empty()) {
    if (cfg.covariates_file.empty())
      io_fail("run config lists covariates but no covariates file");
    raw = read_covariate_file(cfg.covariates_file, y.actor_labels,
                              y.period_labels);
  }

  DirectDesign Z;
  Z.intercept = cfg.intercept;
  InfluenceDesign Ws;
  Ws.side = InfluenceSide::sender;
  InfluenceDesign Wr;
  Wr.side = InfluenceSide::receiver;

  auto add_direct = [&](const std::string& name, Cube cube) {
    for (const auto& existing : Z.names)
      if (existing == name)
        io_fail("direct design name collision: '" + name + "'");
    Z.names.push_back(name);
    Z.cols.push_back(std::move(cube));
  };
  auto add_influence = [&](InfluenceDesign& W, const std::string& name,
                           Cube cube) {
    for (const auto& existing : W.names)
      if (existing == name)
        io_fail("influence design name collision: '" + name + "'");
    W.names.push_back(name);
    W.cols.push_back(std::move(cube));
  };

  if (cfg.intercept) {
    Cube ones(n, Tm, 0.0);
    for (int m = 0; m < Tm; ++m)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          if (i != j) ones.at(i, j, m) = 1.0;
    add_direct("intercept", std::move(ones));
  }
  if (cfg.lagged_dv) {
    PredictorTensor x = lag_log_transform(y);
    add_direct("lagged_dv", x.values);
  }
  if (cfg.reciprocal_dv) {
    Cube rec(n, Tm, 0.0);
    for (int m = 0; m < Tm; ++m)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          if (i != j) rec.at(i, j, m) = std::log1p(y.values.at(j, i, m));
    add_direct("reciprocal_dv", std::move(rec));
  }

  for (const auto& use : cfg.covariates) {
    const auto it = raw.find(use.name);
    if (it == raw.end())
      io_fail("covariate '" + use.name + "' not present in " +
              cfg.covariates_file);
    if (use.lag < 0 || use.lag > 1)
      io_fail("covariate '" + use.name + "': only lags 0 and 1 fit the declared period range");
    const bool influence_use = use.role != CovariateRole::direct;
    Cube cube(n, Tm, 0.0);
    for (int m = 0; m < Tm; ++m) {
      const int r = m + 1 - use.lag;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          if (i == j && !influence_use) continue;
          const double v =
              resolve_cell(it->second, use.name, i, j, r, cfg.fill);
          cube.at(i, j, m) = apply_transform(v, use.transform);
        }
    }
    switch (use.role) {
      case CovariateRole::direct:
        add_direct(use.name, std::move(cube));
        break;
      case CovariateRole::sender:
        add_influence(Ws, use.name, std::move(cube));
        break;
      case CovariateRole::receiver:
        add_influence(Wr, use.name, std::move(cube));
        break;
      case CovariateRole::both:
        add_influence(Ws, use.name, cube);
        add_influence(Wr, use.name, std::move(cube));
        break;
    }
  }

  Z.q = static_cast<int>(Z.cols.size());
  Ws.p = static_cast<int>(Ws.cols.size());
  Wr.p = static_cast<int>(Wr.cols.size());
  if (Ws.p != Wr.p)
    io_fail("sender and receiver influence designs have different sizes (" +
            std::to_string(Ws.p) + " vs " + std::to_string(Wr.p) +
            "); use role 'both' or balance the lists");
  Z.validate();
  Ws.validate();
  Wr.validate();
  return {std::move(Z), std::move(Ws), std::move(Wr)};
}

RunConfig load_run_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    io_fail(path + ": invalid JSON: " + e.what());
  }
  try {
    RunConfig cfg;
    cfg.events_file = j.at("events").get<std::string>();
    cfg.covariates_file = j.value("covariates_file", std::string{});
    cfg.actors = j.at("actors").get<std::vector<std::string>>();
    cfg.period_start = j.at("periods").at("start").get<std::string>();
    cfg.period_end = j.at("periods").at("end").get<std::string>();
    if (j.contains("direct")) {
      const auto& d = j["direct"];
      cfg.intercept = d.value("intercept", true);
      cfg.lagged_dv = d.value("lagged_dv", false);
      cfg.reciprocal_dv = d.value("reciprocal_dv", false);
    }
    if (j.contains("covariates"))
      for (const auto& c : j["covariates"]) {
        CovariateUse use;
        use.name = c.at("name").get<std::string>();
        use.role = parse_role(c.value("role", "direct"));
        use.lag = c.value("lag", 1);
        use.transform = parse_transform(c.value("transform", "identity"));
        cfg.covariates.push_back(use);
      }
    const std::string fill = j.value("fill", "strict");
    if (fill == "strict")
      cfg.fill = FillPolicy::strict;
    else if (fill == "carry_forward")
      cfg.fill = FillPolicy::carry_forward;
    else
      io_fail("unknown fill policy '" + fill + "'");
    cfg.drop_unknown_actors = j.value("drop_unknown_actors", false);
    if (j.contains("estimator")) {
      const auto& e = j["estimator"];
      cfg.estimator.tol = e.value("tol", 1e-8);
      cfg.estimator.max_outer = e.value("max_outer", 100);
      cfg.estimator.seed = e.value("seed", 1u);
      cfg.estimator.multi_start = e.value("multi_start", 0);
    }
    if (j.contains("scoring") && j["scoring"].contains("kmax_override"))
      cfg.scoring.kmax_override = j["scoring"]["kmax_override"].get<int>();
    if (j.contains("cv")) {
      const auto& c = j["cv"];
      cfg.cv.k = c.value("k", 10);
      cfg.cv.m = c.value("m", 5);
      cfg.cv.seed = c.value("seed", 0u);
      cfg.cv.overlap = c.value("overlap", false);
    }
    if (j.contains("holdout") && j["holdout"].contains("horizons"))
      cfg.horizons = j["holdout"]["horizons"].get<std::vector<int>>();
    return cfg;
  } catch (const json::exception& e) {
    io_fail(path + ": " + e.what());
  }
}

Dataset load_dataset(const RunConfig& cfg) {
  Dataset ds;
  const auto periods = month_range(cfg.period_start, cfg.period_end);
  ds.y = ingest_events(cfg.events_file, cfg.actors, periods,
                       cfg.drop_unknown_actors);
  std::tie(ds.Z, ds.Ws, ds.Wr) = ingest_designs(cfg, ds.y);
  return ds;
}

void write_fit_json(const std::string& path, const SirFit& fit,
                    const VcovResult& vcov, const Dataset& data) {
  auto vec = [](const VectorXd& v) {
    json a = json::array();
    for (long i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
  };
  auto mat = [&](const MatrixXd& m) {
    json rows = json::array();
    for (long r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (long c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(row);
    }
    return rows;
  };
  json j;
  j["schema"] = "sirnet-fit-v1";
  j["model"] = {{"n", data.y.n},
                {"T", data.y.T},
                {"actors", data.y.actor_labels},
                {"periods", data.y.period_labels},
                {"q", data.Z.q},
                {"p", data.Ws.p},
                {"theta_names", data.Z.names},
                {"alpha_names", data.Ws.names},
                {"beta_names", data.Wr.names}};
  j["estimate"] = {{"theta", vec(fit.params.theta)},
                   {"alpha", vec(fit.params.alpha)},
                   {"beta", vec(fit.params.beta)}};
  j["inference"] = {{"psi_names", vcov.names},
                    {"se_hessian", vec(vcov.se_hessian)},
                    {"se_sandwich", vec(vcov.se_sandwich)},
                    {"vcov_hessian", mat(vcov.vcov_hessian)},
                    {"vcov_sandwich", mat(vcov.vcov_sandwich)}};
  json ms = {{"starts", fit.multistart.starts},
             {"logliks", fit.multistart.logliks},
             {"max_param_spread", fit.multistart.max_param_spread},
             {"disagreement", fit.multistart.disagreement}};
  j["fit"] = {{"loglik", fit.loglik()},
              {"loglik_trace", fit.loglik_trace},
              {"outer_iterations", fit.outer_iterations},
              {"converged", fit.converged},
              {"mask", fit.mask},
              {"multistart", ms}};
  atomic_write(path, j.dump(2) + "\n");
}

LoadedFit load_fit_json(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    io_fail(path + ": invalid JSON: " + e.what());
  }
  try {
    if (j.at("schema").get<std::string>() != "sirnet-fit-v1")
      io_fail(path + ": unsupported schema");
    LoadedFit lf;
    auto vec = [&](const json& a) {
      VectorXd v(a.size());
      for (size_t i = 0; i < a.size(); ++i) v[static_cast<long>(i)] = a[i];
      return v;
    };
    lf.params.theta = vec(j.at("estimate").at("theta"));
    lf.params.alpha = vec(j.at("estimate").at("alpha"));
    lf.params.beta = vec(j.at("estimate").at("beta"));
    lf.theta_names = j.at("model").at("theta_names").get<std::vector<std::string>>();
    lf.alpha_names = j.at("model").at("alpha_names").get<std::vector<std::string>>();
    lf.beta_names = j.at("model").at("beta_names").get<std::vector<std::string>>();
    lf.loglik_trace = j.at("fit").at("loglik_trace").get<std::vector<double>>();
    lf.converged = j.at("fit").at("converged").get<bool>();
    return lf;
  } catch (const json::exception& e) {
    io_fail(path + ": " + e.what());
  }
}

void write_scores_json(const std::string& path, const ScoreReport& report) {
  json j;
  j["schema"] = "sirnet-scores-v1";
  j["cells"] = report.cells;
  j["dawid_sebastiani"] = report.dawid_sebastiani;
  j["logarithmic"] = report.logarithmic;
  j["brier"] = report.brier;
  j["spherical"] = report.spherical;
  j["rmse"] = report.rmse;
  atomic_write(path, j.dump(2) + "\n");
}

void write_comparison_json(const std::string& path,
                           const ComparisonReport& report,
                           const std::string& schema) {
  json j = report_to_json(report);
  j["schema"] = schema;
  atomic_write(path, j.dump(2) + "\n");
}

void write_predictions_csv(const std::string& path, const Cube& mu,
                           const DyadTensor& y) {
  std::ostringstream out;
  out << "period,source,target,mu\n";
  for (int m = 0; m < mu.slices(); ++m)
    for (int i = 0; i < y.n; ++i)
      for (int j = 0; j < y.n; ++j) {
        if (i == j) continue;
        out << y.period_labels[m + 1] << ',' << y.actor_labels[i] << ','
            << y.actor_labels[j] << ',' << fmt_double(mu.at(i, j, m)) << '\n';
      }
  atomic_write(path, out.str());
}

std::pair<VectorXd, VectorXd> load_predictions_csv(const std::string& path,
                                                   const DyadTensor& y) {
  const auto aidx = label_index(y.actor_labels);
  const auto pidx = label_index(y.period_labels);
  std::vector<double> ys, mus;
  CsvReader csv(path);
  csv.expect_header({"period", "source", "target", "mu"});
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != 4) csv.fail_row("expected 4 fields");
    const auto pit = pidx.find(f[0]);
    if (pit == pidx.end()) csv.fail_row("unknown period '" + f[0] + "'");
    if (pit->second == 0) csv.fail_row("period '" + f[0] + "' is not modeled (no lag available)");
    const auto sit = aidx.find(f[1]);
    const auto tit = aidx.find(f[2]);
    if (sit == aidx.end()) csv.fail_row("unknown actor '" + f[1] + "'");
    if (tit == aidx.end()) csv.fail_row("unknown actor '" + f[2] + "'");
    if (sit->second == tit->second) csv.fail_row("diagonal cell");
    ys.push_back(y.values.at(sit->second, tit->second, pit->second));
    mus.push_back(csv.parse_double(f[3]));
  }
  VectorXd yo = Eigen::Map<VectorXd>(ys.data(), static_cast<long>(ys.size()));
  VectorXd mo = Eigen::Map<VectorXd>(mus.data(), static_cast<long>(mus.size()));
  return {yo, mo};
}

void export_influence(const std::string& path, const InfluenceDesign& W,
                      const VectorXd& coef, int m,
                      const std::vector<std::string>& actors,
                      double threshold) {
  const MatrixXd scores = influence_scores(W, coef, m);
  std::ostringstream out;
  out << "actor,peer,score\n";
  const int n = static_cast<int>(actors.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (std::abs(scores(i, j)) > threshold)
        out << actors[i] << ',' << actors[j] << ',' << fmt_double(scores(i, j))
            << '\n';
    }
  atomic_write(path, out.str());
}

std::vector<ScoreReport> load_external_scores(const std::string& path) {
  std::vector<ScoreReport> out;
  CsvReader csv(path);
  csv.expect_header({"fold", "dawid_sebastiani", "logarithmic", "brier",
                     "spherical", "rmse", "cells"});
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != 7) csv.fail_row("expected 7 fields");
    ScoreReport r;
    r.dawid_sebastiani = csv.parse_double(f[1]);
    r.logarithmic = csv.parse_double(f[2]);
    r.brier = csv.parse_double(f[3]);
    r.spherical = csv.parse_double(f[4]);
    r.rmse = csv.parse_double(f[5]);
    r.cells = static_cast<long>(csv.parse_double(f[6]));
    out.push_back(r);
  }
  return out;
}

SimConfig load_sim_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    io_fail(path + ": invalid JSON: " + e.what());
  }
  try {
    SimConfig cfg;
    cfg.n = j.at("n").get<int>();
    cfg.T = j.at("T").get<int>();
    cfg.burn_in = j.value("burn_in", 10);
    cfg.seed = j.value("seed", 1u);
    auto vec = [](const json& a) {
      VectorXd v(a.size());
      for (size_t i = 0; i < a.size(); ++i) v[static_cast<long>(i)] = a[i];
      return v;
    };
    cfg.truth.theta = vec(j.at("theta"));
    cfg.truth.alpha = vec(j.at("alpha"));
    cfg.truth.beta = vec(j.at("beta"));
    cfg.shared_w = j.value("shared_w", true);
    cfg.guard = j.value("guard", 20.0);
    auto parse_covs = [&](const char* key, bool influence) {
      std::vector<CovariateSpec> specs;
      if (!j.contains(key)) {
        SimConfig basic = SimConfig::basic(cfg.n, cfg.T, cfg.seed, cfg.truth);
        return influence ? basic.w_covariates : basic.z_covariates;
      }
      for (const auto& c : j[key]) {
        CovariateSpec s;
        s.name = c.at("name").get<std::string>();
        s.kind = parse_kind(c.at("kind").get<std::string>());
        s.scale = c.value("scale", 1.0);
        s.rho = c.value("rho", 0.8);
        specs.push_back(s);
      }
      return specs;
    };
    cfg.z_covariates = parse_covs("z_covariates", false);
    cfg.w_covariates = parse_covs("w_covariates", true);
    return cfg;
  } catch (const json::exception& e) {
    io_fail(path + ": " + e.what());
  }
}

void write_sim_outputs(const std::string& dir, const SimConfig& cfg,
                       const SimResult& sim) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) io_fail("cannot create directory " + dir);

  // events: sparse nonzero cells
  {
    std::ostringstream out;
    out << "period,source,target,count\n";
    for (int t = 0; t < sim.y.T; ++t)
      for (int i = 0; i < sim.y.n; ++i)
        for (int j = 0; j < sim.y.n; ++j) {
          if (i == j) continue;
          const double c = sim.y.values.at(i, j, t);
          if (c != 0.0)
            out << sim.y.period_labels[t] << ',' << sim.y.actor_labels[i] << ','
                << sim.y.actor_labels[j] << ',' << fmt_double(c) << '\n';
        }
    atomic_write(dir + "/events.csv", out.str());
  }

  // covariates keyed by raw period label; design slice m maps to raw period m
  // under the default lag of 1
  json cov_list = json::array();
  {
    std::ostringstream out;
    out << "period,source,target,name,value\n";
    auto emit = [&](const InfluenceDesign& W, const std::string& suffix,
                    const std::string& role) {
      for (int k = 0; k < W.p; ++k) {
        const std::string name = W.names[k] + suffix;
        cov_list.push_back({{"name", name},
                            {"role", role},
                            {"lag", 1},
                            {"transform", "identity"}});
        for (int m = 0; m < W.Tm(); ++m)
          for (int i = 0; i < W.n(); ++i)
            for (int j = 0; j < W.n(); ++j)
              out << sim.y.period_labels[m] << ',' << sim.y.actor_labels[i]
                  << ',' << sim.y.actor_labels[j] << ',' << name << ','
                  << fmt_double(W.cols[k].at(i, j, m)) << '\n';
      }
    };
    for (int k = 0; k < sim.Z.q; ++k) {
      if (sim.Z.intercept && k == 0) continue;
      cov_list.push_back({{"name", sim.Z.names[k]},
                          {"role", "direct"},
                          {"lag", 1},
                          {"transform", "identity"}});
      for (int m = 0; m < sim.Z.Tm(); ++m)
        for (int i = 0; i < sim.y.n; ++i)
          for (int j = 0; j < sim.y.n; ++j) {
            if (i == j) continue;
            out << sim.y.period_labels[m] << ',' << sim.y.actor_labels[i] << ','
                << sim.y.actor_labels[j] << ',' << sim.Z.names[k] << ','
                << fmt_double(sim.Z.cols[k].at(i, j, m)) << '\n';
          }
    }
    if (cfg.shared_w) {
      emit(sim.Ws, "", "both");
    } else {
      emit(sim.Ws, "_s", "sender");
      emit(sim.Wr, "_r", "receiver");
    }
    atomic_write(dir + "/covariates.csv", out.str());
  }

  // ready-to-run config
  {
    json j;
    j["schema"] = "sirnet-run-config-v1";
    j["events"] = dir + "/events.csv";
    j["covariates_file"] = dir + "/covariates.csv";
    j["actors"] = sim.y.actor_labels;
    j["periods"] = {{"start", sim.y.period_labels.front()},
                    {"end", sim.y.period_labels.back()}};
    j["direct"] = {{"intercept", sim.Z.intercept},
                   {"lagged_dv", false},
                   {"reciprocal_dv", false}};
    j["covariates"] = cov_list;
    j["estimator"] = {{"tol", 1e-8}, {"max_outer", 100}, {"seed", cfg.seed}};
    j["cv"] = {{"k", 10}, {"m", 5}, {"seed", cfg.seed}, {"overlap", false}};
    j["holdout"] = {{"horizons", {2, 3, 4, 5}}};
    atomic_write(dir + "/run.json", j.dump(2) + "\n");
  }

  // generating parameters, for recovery checks
  {
    json j;
    j["schema"] = "sirnet-sim-truth-v1";
    j["seed"] = cfg.seed;
    j["theta"] = std::vector<double>(cfg.truth.theta.data(),
                                     cfg.truth.theta.data() + cfg.truth.theta.size());
    j["alpha"] = std::vector<double>(cfg.truth.alpha.data(),
                                     cfg.truth.alpha.data() + cfg.truth.alpha.size());
    j["beta"] = std::vector<double>(cfg.truth.beta.data(),
                                    cfg.truth.beta.data() + cfg.truth.beta.size());
    atomic_write(dir + "/truth.json", j.dump(2) + "\n");
  }
}

} // namespace sir::io
