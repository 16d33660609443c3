#pragma once

// Replicated simulation sweeps: draw a model, sample data, estimate beta and
// compare with the exact value. Replication k of cell (d, n) always uses the
// RNG stream replication_seed(seed, d, n, k), so results do not depend on the
// worker count.

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <vector>

#include "confspec/estimator.hpp"

namespace confspec::sim {

struct SimulationConfig {
  std::vector<Eigen::Index> dims{5};
  std::vector<Eigen::Index> sizes{1000};
  int reps = 100;
  std::uint64_t seed = 1;
  estimator::GridConfig grid{};
  unsigned threads = 1;
  std::uint64_t permutations = 0;  // 0 skips the permutation test

  void validate() const;
};

struct SimulationRecord {
  std::uint64_t seed = 0;
  int rep = 0;
  Eigen::Index d = 0;
  Eigen::Index n = 0;
  double beta_true = 0.0;
  double gamma_true = 0.0;
  double eta_true = 0.0;
  double beta_hat = 0.0;
  double eta_hat = 0.0;
  double distance = 0.0;
  std::optional<double> beta_prime;
};

struct CellSummary {
  Eigen::Index d = 0;
  Eigen::Index n = 0;
  int reps = 0;
  double pearson_beta = 0.0;
  double rmse_beta = 0.0;
  double pearson_eta = 0.0;
  double fisher_p = 1.0;
  std::optional<double> permutation_p;
};

struct SimulationResult {
  std::vector<SimulationRecord> records;  // cell-major, then replication index
  std::vector<CellSummary> cells;
  double pearson_beta = 0.0;
  double rmse_beta = 0.0;
};

std::uint64_t replication_seed(std::uint64_t root, Eigen::Index d, Eigen::Index n, int rep);

struct ReplicationDraw {
  scm::ModelParams params;
  scm::Dataset data;
};

// Model and dataset of one replication, drawn from the stream `seed`.
ReplicationDraw draw_replication(Eigen::Index d, Eigen::Index n, std::uint64_t seed);

SimulationRecord run_replication(Eigen::Index d, Eigen::Index n, std::uint64_t seed,
                                 const estimator::GridConfig& grid);

SimulationResult run_simulation(const SimulationConfig& cfg);

CellSummary summarize(std::span<const SimulationRecord> records, std::uint64_t permutations,
                      std::uint64_t seed);

void write_records_csv(const std::vector<SimulationRecord>& records, std::ostream& out);
std::vector<SimulationRecord> read_records_csv(std::istream& in);

nlohmann::json summary_json(const SimulationResult& result, const SimulationConfig& cfg);

}  // namespace confspec::sim
