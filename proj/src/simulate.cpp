#include "confspec/simulate.hpp"

#include <ostream>
#include <sstream>

#include "confspec/dataset_io.hpp"
#include "confspec/stats.hpp"

namespace confspec::sim {

void SimulationConfig::validate() const {
  if (dims.empty() || sizes.empty()) fail(ErrorKind::InvalidInput, "need at least one d and one n");
  for (auto d : dims) {
    if (d < 2) fail(ErrorKind::InvalidInput, "dimension must be at least 2");
  }
  for (auto n : sizes) {
    if (n < 2) fail(ErrorKind::InvalidInput, "sample size must be at least 2");
  }
  if (reps < 1) fail(ErrorKind::InvalidInput, "reps must be positive");
  grid.validate();
}

std::uint64_t replication_seed(std::uint64_t root, Eigen::Index d, Eigen::Index n, int rep) {
  std::uint64_t s = derive_seed(root, static_cast<std::uint64_t>(d));
  s = derive_seed(s, static_cast<std::uint64_t>(n));
  return derive_seed(s, static_cast<std::uint64_t>(rep));
}

ReplicationDraw draw_replication(Eigen::Index d, Eigen::Index n, std::uint64_t seed) {
  Engine rng(seed);
  auto params = scm::sample_params(d, rng);
  auto data = scm::sample_dataset(params, n, rng);
  return {std::move(params), std::move(data)};
}

SimulationRecord run_replication(Eigen::Index d, Eigen::Index n, std::uint64_t seed,
                                 const estimator::GridConfig& grid) {
  const auto [params, data] = draw_replication(d, n, seed);
  const auto truth = scm::ground_truth(params);
  const auto est = estimator::estimate_from_data(data, grid);

  SimulationRecord r;
  r.seed = seed;
  r.d = d;
  r.n = n;
  r.beta_true = truth.beta;
  r.gamma_true = truth.gamma;
  r.eta_true = truth.eta;
  r.beta_hat = est.beta_hat;
  r.eta_hat = est.eta_hat;
  r.distance = est.distance;
  if (n > d + 2) r.beta_prime = scm::beta_prime(data);
  return r;
}

CellSummary summarize(std::span<const SimulationRecord> records, std::uint64_t permutations,
                      std::uint64_t seed) {
  CellSummary s;
  if (records.empty()) return s;
  s.d = records.front().d;
  s.n = records.front().n;
  s.reps = static_cast<int>(records.size());
  std::vector<double> bt, bh, et, eh;
  for (const auto& r : records) {
    bt.push_back(r.beta_true);
    bh.push_back(r.beta_hat);
    et.push_back(r.eta_true);
    eh.push_back(r.eta_hat);
  }
  if (records.size() >= 2) {
    s.pearson_beta = stats::pearson(bt, bh);
    s.pearson_eta = stats::pearson(et, eh);
    s.fisher_p = stats::fisher_p_value(s.pearson_beta, records.size());
    if (permutations > 0) s.permutation_p = stats::permutation_p_value(bt, bh, permutations, seed);
  }
  s.rmse_beta = stats::rmse(bt, bh);
  return s;
}

SimulationResult run_simulation(const SimulationConfig& cfg) {
  cfg.validate();
  struct Job {
    Eigen::Index d, n;
    int rep;
  };
  std::vector<Job> jobs;
  for (auto d : cfg.dims) {
    for (auto n : cfg.sizes) {
      for (int k = 0; k < cfg.reps; ++k) jobs.push_back({d, n, k});
    }
  }

  SimulationResult result;
  result.records.resize(jobs.size());
  stats::parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    auto rec = run_replication(job.d, job.n, replication_seed(cfg.seed, job.d, job.n, job.rep), cfg.grid);
    rec.rep = job.rep;
    result.records[i] = rec;
  });

  const auto reps = static_cast<std::size_t>(cfg.reps);
  for (std::size_t c = 0; c * reps < result.records.size(); ++c) {
    const std::span<const SimulationRecord> cell(result.records.data() + c * reps, reps);
    result.cells.push_back(summarize(cell, cfg.permutations, derive_seed(cfg.seed, 0xC0FFEEu + c)));
  }
  std::vector<double> bt, bh;
  for (const auto& r : result.records) {
    bt.push_back(r.beta_true);
    bh.push_back(r.beta_hat);
  }
  if (bt.size() >= 2) {
    result.pearson_beta = stats::pearson(bt, bh);
    result.rmse_beta = stats::rmse(bt, bh);
  }
  return result;
}

void write_records_csv(const std::vector<SimulationRecord>& records, std::ostream& out) {
  out << "seed,rep,d,n,beta_true,gamma_true,eta_true,beta_hat,eta_hat,distance,beta_prime\n";
  for (const auto& r : records) {
    out << r.seed << ',' << r.rep << ',' << r.d << ',' << r.n << ',' << io::format_double(r.beta_true) << ','
        << io::format_double(r.gamma_true) << ',' << io::format_double(r.eta_true) << ','
        << io::format_double(r.beta_hat) << ',' << io::format_double(r.eta_hat) << ','
        << io::format_double(r.distance) << ',';
    if (r.beta_prime) out << io::format_double(*r.beta_prime);
    out << '\n';
  }
}

std::vector<SimulationRecord> read_records_csv(std::istream& in) {
  std::vector<SimulationRecord> out;
  std::string line;
  std::getline(in, line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 11) throw ParseError(line_no, cells.size(), "expected 11 record fields");
    SimulationRecord r;
    r.seed = std::stoull(cells[0]);
    r.rep = std::stoi(cells[1]);
    r.d = std::stol(cells[2]);
    r.n = std::stol(cells[3]);
    r.beta_true = std::stod(cells[4]);
    r.gamma_true = std::stod(cells[5]);
    r.eta_true = std::stod(cells[6]);
    r.beta_hat = std::stod(cells[7]);
    r.eta_hat = std::stod(cells[8]);
    r.distance = std::stod(cells[9]);
    if (!cells[10].empty()) r.beta_prime = std::stod(cells[10]);
    out.push_back(r);
  }
  return out;
}

nlohmann::json summary_json(const SimulationResult& result, const SimulationConfig& cfg) {
  nlohmann::json j;
  j["config"] = {{"dims", cfg.dims},
                 {"sizes", cfg.sizes},
                 {"reps", cfg.reps},
                 {"seed", cfg.seed},
                 {"beta_steps", cfg.grid.beta_steps},
                 {"eta_steps", cfg.grid.eta_steps},
                 {"sigma_factor", cfg.grid.sigma_factor},
                 {"normalize", cfg.grid.normalize},
                 {"permutations", cfg.permutations}};
  j["pearson_beta"] = result.pearson_beta;
  j["rmse_beta"] = result.rmse_beta;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : result.cells) {
    nlohmann::json cj{{"d", c.d},
                      {"n", c.n},
                      {"reps", c.reps},
                      {"pearson_beta", c.pearson_beta},
                      {"rmse_beta", c.rmse_beta},
                      {"pearson_eta", c.pearson_eta},
                      {"fisher_p", c.fisher_p}};
    if (c.permutation_p) cj["permutation_p"] = *c.permutation_p;
    j["cells"].push_back(cj);
  }
  return j;
}

}  // namespace confspec::sim
