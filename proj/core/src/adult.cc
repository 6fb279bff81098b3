#include "recmix/adult.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "recmix/cdf_recursion.h"
#include "recmix/errors.h"

namespace recmix {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n\"");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n\"");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string normalize_header(const std::string& raw) {
  std::string out;
  for (char c : trim(raw)) {
    if (c == '-' || c == ' ' || c == '.') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  // Common variant spellings.
  if (out == "educational_num") return "education_num";
  if (out == "marital_state") return "marital_status";
  return out;
}

[[noreturn]] void bad_row(int line, const std::string& why) {
  fail(ErrorCode::kUnparseableRow, "line " + std::to_string(line) + ": " + why);
}

double parse_cell(const std::string& cell, int line, const std::string& column) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    bad_row(line, "column '" + column + "' is not numeric: '" + cell + "'");
  }
  if (used != cell.size() || !std::isfinite(v)) {
    bad_row(line, "column '" + column + "' is not numeric: '" + cell + "'");
  }
  return v;
}

int parse_label(const std::string& cell, int line) {
  std::string v = cell;
  if (!v.empty() && v.back() == '.') v.pop_back();  // test split writes ">50K."
  if (v == ">50K") return 1;
  if (v == "<=50K") return 0;
  bad_row(line, "unrecognized income value '" + cell + "'");
}

}  // namespace

AdultDataset load_adult(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open '" + path + "'");

  std::string line;
  int line_no = 1;
  if (!std::getline(in, line)) fail(ErrorCode::kUnparseableRow, "line 1: missing header");
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index.emplace(normalize_header(header[i]), i);
  auto column = [&](const std::string& name) {
    const auto it = index.find(name);
    if (it == index.end()) fail(ErrorCode::kMissingColumn, "missing column '" + name + "'");
    return it->second;
  };
  std::vector<std::size_t> numeric_idx;
  for (const auto& c : kAdultNumericColumns) numeric_idx.push_back(column(c));
  std::vector<std::size_t> cat_idx;
  for (const auto& c : kAdultCategoricalColumns) cat_idx.push_back(column(c));
  const std::size_t label_idx = column("income");

  std::vector<std::vector<double>> numeric;
  std::vector<double> labels;
  std::vector<std::vector<std::string>> cats(cat_idx.size());
  int dropped = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      bad_row(line_no, "expected " + std::to_string(header.size()) + " cells, found " +
                           std::to_string(cells.size()));
    }
    if (std::any_of(cells.begin(), cells.end(), [](const auto& c) { return c == "?"; })) {
      ++dropped;
      continue;
    }
    std::vector<double> row;
    for (std::size_t j = 0; j < numeric_idx.size(); ++j) {
      row.push_back(parse_cell(cells[numeric_idx[j]], line_no, kAdultNumericColumns[j]));
    }
    labels.push_back(parse_label(cells[label_idx], line_no));
    numeric.push_back(std::move(row));
    for (std::size_t j = 0; j < cat_idx.size(); ++j) cats[j].push_back(cells[cat_idx[j]]);
  }

  AdultDataset data;
  data.dropped_rows = dropped;
  const auto rows = static_cast<Eigen::Index>(numeric.size());
  const auto p = static_cast<Eigen::Index>(numeric_idx.size());
  data.features.resize(rows, p + 1);
  data.labels.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    data.features(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) data.features(i, j + 1) = numeric[i][j];
    data.labels(i) = labels[i];
  }
  // Standardize; constant columns are only centered.
  for (Eigen::Index j = 1; j <= p && rows > 0; ++j) {
    auto col = data.features.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = rows > 1 ? std::sqrt(col.squaredNorm() / (rows - 1)) : 0.0;
    if (sd > 0.0) col /= sd;
  }
  for (std::size_t j = 0; j < cat_idx.size(); ++j) {
    CategoricalColumn cc;
    cc.name = kAdultCategoricalColumns[j];
    cc.levels = cats[j];
    std::sort(cc.levels.begin(), cc.levels.end());
    cc.levels.erase(std::unique(cc.levels.begin(), cc.levels.end()), cc.levels.end());
    for (const auto& v : cats[j]) {
      cc.codes.push_back(static_cast<int>(
          std::lower_bound(cc.levels.begin(), cc.levels.end(), v) - cc.levels.begin()));
    }
    data.categorical.push_back(std::move(cc));
  }
  return data;
}

AdultGlmSource::AdultGlmSource(const AdultDataset& data) : data_(data) {
  if (data.rows() == 0) fail(ErrorCode::kEmptySample, "AdultGlmSource: empty dataset");
}

int AdultGlmSource::dim() const { return static_cast<int>(data_.features.cols()); }

GlmData AdultGlmSource::real_batch(int n, RngStream& rng) const {
  std::uniform_int_distribution<Eigen::Index> pick(0, data_.rows() - 1);
  GlmData out{SampleMatrix(n, data_.features.cols()), Vec(n)};
  for (int i = 0; i < n; ++i) {
    const Eigen::Index r = pick(rng.engine());
    out.x.row(i) = data_.features.row(r);
    out.y(i) = data_.labels(r);
  }
  return out;
}

SampleMatrix AdultGlmSource::covariates(int m, RngStream& rng) const {
  std::uniform_int_distribution<Eigen::Index> pick(0, data_.rows() - 1);
  SampleMatrix out(m, data_.features.cols());
  for (int i = 0; i < m; ++i) out.row(i) = data_.features.row(pick(rng.engine()));
  return out;
}

Vec fit_adult_theta_star(const AdultDataset& data) {
  const GlmData all{data.features, data.labels};
  const GlmData none{SampleMatrix(0, data.features.cols()), Vec(0)};
  return fit_weighted_mle(GlmFamily::logistic(), all, none, 1.0,
                          Vec::Zero(data.features.cols()))
      .theta;
}

AdultStudyResult run_adult_study(const AdultDataset& data, const ScenarioConfig& cfg) {
  cfg.validate();
  AdultStudyResult out;
  out.theta_star = fit_adult_theta_star(data);
  const AdultGlmSource source(data);
  const GlmFamily family = GlmFamily::logistic();

  const int points = static_cast<int>(cfg.w_grid.size());
  const int reps = cfg.replications;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  auto sweep = [&](const std::string& label, const std::function<double(double, RngStream&)>& chain) {
    std::vector<double> tails(static_cast<std::size_t>(points) * reps);
    parallel_for(points * reps, cfg.threads, [&](int task) {
      const int g = task / reps;
      const int r = task % reps;
      RngStream rng(cfg.seed, RngStream::replication_stream(static_cast<std::uint64_t>(r)));
      try {
        tails[task] = chain(cfg.w_grid[g], rng);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kDomainError) throw;
        tails[task] = kInf;
      }
    });
    SweepResult series{label, {}};
    for (int g = 0; g < points; ++g) {
      GridPoint p = summarize(cfg.w_grid[g], std::span(tails).subspan(g * reps, reps));
      p.m = cfg.m;
      series.points.push_back(p);
    }
    return series;
  };

  out.logistic = sweep("logistic", [&](double w, RngStream& rng) {
    const GlmTrajectory traj =
        run_glm_chain(family, source, out.theta_star, MixConfig{w, cfg.n, cfg.m}, cfg.T, rng);
    if (traj.failed) return kInf;
    return tail_limit_estimate(traj.theta_errors(), cfg.tail_len);
  });

  for (const auto& col : data.categorical) {
    const auto levels = static_cast<double>(col.levels.size());
    std::vector<Atom> atoms;
    std::vector<double> counts(col.levels.size(), 0.0);
    for (int c : col.codes) counts[c] += 1.0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
      atoms.push_back({(j + 1.0) / (levels + 1.0), counts[j] / col.codes.size()});
    }
    const WeightedEcdf truth = WeightedEcdf::from_atoms(std::move(atoms));
    out.categorical.push_back(sweep(col.name, [&](double w, RngStream& rng) {
      const CdfTrajectory traj = run_cdf_chain(truth, MixConfig{w, cfg.n, cfg.m}, cfg.T, rng);
      return tail_limit_estimate(traj.cvm_err, cfg.tail_len);
    }));
  }
  return out;
}

}  // namespace recmix
