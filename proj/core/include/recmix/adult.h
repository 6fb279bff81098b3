#pragma once

#include <string>
#include <vector>

#include "recmix/glm_recursion.h"
#include "recmix/linalg_stats.h"
#include "recmix/scenario.h"

namespace recmix {

inline const std::vector<std::string> kAdultNumericColumns = {
    "age", "education_num", "capital_gain", "capital_loss", "hours_per_week"};
inline const std::vector<std::string> kAdultCategoricalColumns = {"workclass", "education",
                                                                  "marital_status"};

struct CategoricalColumn {
  std::string name;
  std::vector<std::string> levels;  // sorted; index = position in this list
  std::vector<int> codes;           // one per retained row
};

struct AdultDataset {
  // Intercept column followed by the standardized numeric columns.
  Mat features;
  Vec labels;  // 1 iff income > 50K
  std::vector<CategoricalColumn> categorical;
  int dropped_rows = 0;

  int rows() const { return static_cast<int>(features.rows()); }
};

// Header-keyed CSV reader. Header names are matched case-insensitively with
// '-' and ' ' treated as '_'. Rows holding "?" in any cell are dropped.
// Throws MissingColumn, UnparseableRow (with the line number) or IoError.
AdultDataset load_adult(const std::string& path);

// Adult covariates resampled with replacement; real responses are the
// observed labels of the sampled rows.
class AdultGlmSource : public GlmDataSource {
 public:
  explicit AdultGlmSource(const AdultDataset& data);

  int dim() const override;
  GlmData real_batch(int n, RngStream& rng) const override;
  SampleMatrix covariates(int m, RngStream& rng) const override;

 private:
  const AdultDataset& data_;
};

// Logistic fit of the labels on the full dataset.
Vec fit_adult_theta_star(const AdultDataset& data);

struct AdultStudyResult {
  Vec theta_star;
  SweepResult logistic;
  std::vector<SweepResult> categorical;  // one per categorical column
};

// w-sweep of the logistic chain (error ||theta_t - theta*||^2) and of the
// CDF chain for each categorical column, with categories placed at
// (j + 1) / (K + 1) and the full-data frequencies as truth.
AdultStudyResult run_adult_study(const AdultDataset& data, const ScenarioConfig& cfg);

}  // namespace recmix
