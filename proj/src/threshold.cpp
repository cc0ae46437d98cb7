#include "mqseg/threshold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "mqseg/kernels.hpp"
#include "mqseg/rng.hpp"

namespace mqseg {

namespace {

void fill_replicate(const PenalizedLlrTable& tab, int n, double beta,
                    std::uint64_t master_seed, std::uint64_t rep,
                    std::vector<std::int32_t>& prefix, double* out) {
  RngStream rng(substream_seed(master_seed, rep));
  prefix[0] = 0;
  for (int i = 1; i <= n; ++i)
    prefix[i] = prefix[i - 1] + (rng.bernoulli(beta) ? 1 : 0);
  (void)n;
  *out = max_penalized_scan(tab, prefix.data());
}

}  // namespace

double simulate_mn_once(int n, double beta, std::uint64_t master_seed,
                        std::uint64_t replicate_index) {
  PenalizedLlrTable tab(n, beta);
  std::vector<std::int32_t> prefix(n + 1);
  double out;
  fill_replicate(tab, n, beta, master_seed, replicate_index, prefix, &out);
  return out;
}

std::vector<double> simulate_mn(int n, double beta, int reps,
                                std::uint64_t master_seed, int nthreads) {
  if (n < 1) throw std::domain_error("simulate_mn: n must be >= 1");
  if (reps < 1) throw std::domain_error("simulate_mn: reps must be >= 1");
  if (nthreads <= 0)
    nthreads = std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min(nthreads, reps);

  PenalizedLlrTable tab(n, beta);
  std::vector<double> samples(reps);

  if (nthreads == 1) {
    std::vector<std::int32_t> prefix(n + 1);
    for (int r = 0; r < reps; ++r)
      fill_replicate(tab, n, beta, master_seed, r, prefix, &samples[r]);
    return samples;
  }

  // Replicates are independent substreams, so work can be handed out in any
  // order; an atomic counter keeps the threads busy without pre-chunking.
  std::atomic<int> next{0};
  auto worker = [&]() {
    std::vector<std::int32_t> prefix(n + 1);
    for (;;) {
      int r = next.fetch_add(1);
      if (r >= reps) break;
      fill_replicate(tab, n, beta, master_seed, r, prefix, &samples[r]);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return samples;
}

double mn_quantile(std::vector<double> samples, double alpha) {
  if (samples.empty()) throw std::domain_error("mn_quantile: no samples");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("mn_quantile: alpha must be in (0,1)");
  const int reps = static_cast<int>(samples.size());
  int rank = static_cast<int>(std::ceil(reps * (1.0 - alpha)));
  rank = std::clamp(rank, 1, reps);
  std::nth_element(samples.begin(), samples.begin() + (rank - 1),
                   samples.end());
  return samples[rank - 1];
}

bool ThresholdKey::operator<(const ThresholdKey& o) const {
  return std::tie(n, beta, alpha, reps, seed) <
         std::tie(o.n, o.beta, o.alpha, o.reps, o.seed);
}

ThresholdTable ThresholdTable::load(const std::string& path) {
  ThresholdTable table;
  std::ifstream in(path);
  if (!in) return table;  // no cache yet

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("threshold table " + path + ": empty file");
  if (line != "mqseg-thresholds v1")
    throw std::runtime_error("threshold table " + path +
                             ": unrecognized header '" + line + "'");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    ThresholdKey key;
    double q;
    if (!(fields >> key.n >> key.beta >> key.alpha >> key.reps >> key.seed >>
          q))
      throw std::runtime_error("threshold table " + path + ": bad line " +
                               std::to_string(lineno));
    std::string rest;
    if (fields >> rest)
      throw std::runtime_error("threshold table " + path + ": bad line " +
                               std::to_string(lineno));
    table.entries_[key] = q;
  }
  return table;
}

void ThresholdTable::save(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out)
      throw std::runtime_error("threshold table: cannot write " + tmp);
    out << "mqseg-thresholds v1\n";
    char buf[128];
    for (const auto& [key, q] : entries_) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d,%llu,%.17g\n", key.n,
                    key.beta, key.alpha, key.reps,
                    static_cast<unsigned long long>(key.seed), q);
      out << buf;
    }
    if (!out)
      throw std::runtime_error("threshold table: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("threshold table: rename to " + path + " failed");
}

std::optional<double> ThresholdTable::lookup(const ThresholdKey& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ThresholdTable::insert(const ThresholdKey& key, double q) {
  entries_[key] = q;
}

double threshold_for(ThresholdTable& table, const ThresholdKey& key,
                     const std::string& path, int nthreads) {
  if (auto hit = table.lookup(key)) return *hit;
  double q = mn_quantile(
      simulate_mn(key.n, key.beta, key.reps, key.seed, nthreads), key.alpha);
  table.insert(key, q);
  if (!path.empty()) table.save(path);
  return q;
}

}  // namespace mqseg
