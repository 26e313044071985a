// skipdisk command-line front end.
//
//   skipdisk gen      synthesize an fvecs dataset
//   skipdisk gt       brute-force ground truth (ivecs)
//   skipdisk build    build index + store files for one variant
//   skipdisk search   run queries, print neighbors and per-query stats
//   skipdisk bench    L-sweep benchmark, text table + JSONL records
//   skipdisk analyze  lower-bound tightness, calibration, epsilon sweep
//
// Settings resolve in precedence order: built-in defaults, then --config
// file, then SKIPDISK_* environment variables, then explicit flags.
// Exit codes: 0 ok, 2 config error, 3 data error, 4 I/O error.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "skipdisk/analyze.hpp"
#include "skipdisk/common.hpp"
#include "skipdisk/dataset.hpp"
#include "skipdisk/index.hpp"
#include "skipdisk/run_config.hpp"
#include "skipdisk/search.hpp"

namespace sd = skipdisk;
using nlohmann::json;

namespace {

std::string require(const sd::RunConfig& cfg, const std::string& key) {
  auto v = cfg.find(key);
  if (!v || v->empty()) {
    throw sd::ConfigError("missing required setting '" + key + "'");
  }
  return *v;
}

std::vector<std::uint32_t> parse_u32_list(const std::string& text,
                                          const std::string& what) {
  std::vector<std::uint32_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) {
      try {
        unsigned long v = std::stoul(item);
        out.push_back(static_cast<std::uint32_t>(v));
      } catch (const std::exception&) {
        throw sd::ConfigError("bad " + what + " list entry '" + item + "'");
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw sd::ConfigError("empty " + what + " list");
  return out;
}

std::vector<float> parse_float_list(const std::string& text,
                                    const std::string& what) {
  std::vector<float> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) {
      try {
        out.push_back(std::stof(item));
      } catch (const std::exception&) {
        throw sd::ConfigError("bad " + what + " list entry '" + item + "'");
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw sd::ConfigError("empty " + what + " list");
  return out;
}

sd::IoBackendConfig io_from_config(const sd::RunConfig& cfg) {
  sd::IoBackendConfig io;
  std::string kind = cfg.get_string("io", "real");
  if (kind == "real") {
    io.kind = sd::IoBackendConfig::Kind::real;
  } else if (kind == "sim") {
    io.kind = sd::IoBackendConfig::Kind::simulated;
  } else {
    throw sd::ConfigError("io must be 'real' or 'sim', got '" + kind + "'");
  }
  io.sim_mean_us = cfg.get_double("sim_mean_us", io.sim_mean_us);
  io.sim_jitter_us = cfg.get_double("sim_jitter_us", io.sim_jitter_us);
  std::uint64_t seed = cfg.get_u64("seed", 42);
  io.seed = sd::derive_seed(seed, sd::seed_tag::kSimulatedIo);
  return io;
}

sd::IndexConfig index_config_from(const sd::RunConfig& cfg) {
  sd::IndexConfig ic;
  ic.variant = sd::variant_from_name(cfg.get_string("variant", "pb"));
  ic.d_pq = cfg.get_u32("d_pq", ic.d_pq);
  ic.d_lb = cfg.get_u32("d_lb", ic.d_lb);
  ic.d_dade = cfg.get_u32("d_dade", ic.d_dade);
  ic.sub_dim = cfg.get_u32("sub_dim", ic.sub_dim);
  ic.pq_iters = cfg.get_u32("pq_iters", ic.pq_iters);
  ic.r = cfg.get_u32("r", ic.r);
  ic.l_build = cfg.get_u32("l_build", ic.l_build);
  ic.alpha = cfg.get_float("alpha", ic.alpha);
  ic.keep_fraction = cfg.get_float("keep_fraction", ic.keep_fraction);
  ic.p_s = cfg.get_float("p_s", ic.p_s);
  ic.pca_sample_cap = cfg.get_u64("pca_sample_cap", ic.pca_sample_cap);
  return ic;
}

sd::SkipDiskIndex load_from(const sd::RunConfig& cfg) {
  std::string prefix = require(cfg, "index");
  return sd::load_index(prefix + ".skix", prefix + ".skdv",
                        cfg.get_string("io", "real") == "real");
}

int run_gen(const sd::RunConfig& cfg) {
  sd::SyntheticSpec spec;
  spec.n = cfg.get_u64("n", 10000);
  spec.dim = cfg.get_u32("dim", 64);
  std::string model = cfg.get_string("model", "gaussian");
  if (model == "gaussian") {
    spec.model = sd::SyntheticModel::gaussian;
  } else if (model == "clustered") {
    spec.model = sd::SyntheticModel::clustered;
  } else {
    throw sd::ConfigError("model must be 'gaussian' or 'clustered'");
  }
  spec.clusters = cfg.get_u32("clusters", spec.clusters);
  spec.cluster_spread = cfg.get_float("spread", spec.cluster_spread);
  spec.seed = cfg.get_u64("seed", 42);
  std::string out = require(cfg, "out");

  sd::VectorDataset data = sd::gen_synthetic(spec);
  sd::write_fvecs(out, data);
  std::printf("wrote %zu x %u fvecs to %s\n", data.size(), data.dim,
              out.c_str());
  return 0;
}

int run_gt(const sd::RunConfig& cfg) {
  sd::VectorDataset data = sd::read_fvecs(require(cfg, "dataset"));
  sd::VectorDataset queries = sd::read_fvecs(require(cfg, "queries"));
  std::uint32_t k = cfg.get_u32("k", 100);
  std::string out = require(cfg, "out");
  if (queries.dim != data.dim) {
    throw sd::DataError("query dimension does not match dataset");
  }

  sd::KnnResult r = sd::brute_force_knn(data, queries, k);
  sd::IdDataset truth;
  truth.k = k;
  truth.data = std::move(r.ids);
  sd::write_ivecs(out, truth);
  std::printf("wrote %zu x %u ground-truth rows to %s\n", queries.size(), k,
              out.c_str());
  return 0;
}

void print_memory_table(const sd::SkipDiskIndex& index) {
  sd::MemoryAccounting m = sd::account_memory(index);
  double n = static_cast<double>(index.n);
  std::printf("memory accounting (%s, n=%" PRIu64 ", dim=%u):\n",
              sd::variant_name(index.config.variant), index.n, index.dim);
  auto row = [n](const char* name, std::uint64_t bytes) {
    std::printf("  %-16s %12" PRIu64 " B  %8.1f B/pt\n", name, bytes,
                n > 0 ? static_cast<double>(bytes) / n : 0.0);
  };
  row("graph", m.graph_bytes);
  row("pq_codes", m.pq_code_bytes);
  row("pq_codebook", m.pq_codebook_bytes);
  row("pivots", m.pivot_bytes);
  row("residuals", m.residual_bytes);
  row("resident_bitmap", m.bitmap_bytes);
  row("total", m.total());
}

int run_build(const sd::RunConfig& cfg) {
  sd::VectorDataset data = sd::read_fvecs(require(cfg, "dataset"));
  sd::IndexConfig ic = index_config_from(cfg);
  ic.clamp_prefixes(data.dim);
  std::uint64_t seed = cfg.get_u64("seed", 42);
  std::string out = require(cfg, "out");

  sd::SkipDiskIndex index =
      sd::build_index(data, ic, seed, out + ".skix", out + ".skdv");
  std::printf("built %s index over %zu x %u points -> %s.{skix,skdv}\n",
              sd::variant_name(ic.variant), data.size(), data.dim,
              out.c_str());
  if (index.config.variant == sd::Variant::est) {
    std::printf("calibration: epsilon=%.6f p_s=%.3f d_prefix=%u sample=%"
                PRIu64 "\n",
                index.calib.epsilon, index.calib.p_s, index.calib.d_prefix,
                index.calib.sample_size);
  }
  print_memory_table(index);
  return 0;
}

int run_search(const sd::RunConfig& cfg) {
  sd::SkipDiskIndex index = load_from(cfg);
  sd::VectorDataset queries = sd::read_fvecs(require(cfg, "queries"));

  sd::SearchParams sp;
  sp.k = cfg.get_u32("k", 10);
  auto ls = parse_u32_list(cfg.get_string("l", "100"), "l");
  sp.l = ls.front();
  sp.b = cfg.get_u32("b", 32);
  sp.io = io_from_config(cfg);
  sp.disable_filter = cfg.get_bool("disable_filter", false);
  if (cfg.has("eps")) {
    sp.epsilon_override = cfg.get_float("eps", 1.0f);
  }
  bool baseline = cfg.get_bool("baseline", false);

  std::FILE* sink = stdout;
  std::string out = cfg.get_string("out", "");
  if (!out.empty()) {
    sink = std::fopen(out.c_str(), "w");
    if (sink == nullptr) throw sd::IoError("cannot open " + out);
  }

  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    sd::SearchParams per = sp;
    per.io.seed = sd::derive_seed(sp.io.seed, qi);
    sd::SearchResult res = baseline
                               ? sd::search_baseline(index, queries.vec(qi), per)
                               : sd::search(index, queries.vec(qi), per);
    std::fprintf(sink, "query %zu:\n", qi);
    for (std::size_t i = 0; i < res.ids.size(); ++i) {
      std::fprintf(sink, "  %u %.8g\n", res.ids[i],
                   std::sqrt(static_cast<double>(res.dist_sq[i])));
    }
    std::fprintf(sink,
                 "stats: reads=%" PRIu64 " filtered=%" PRIu64
                 " generated=%zu drained=%zu exact=%zu latency_%s=%.3f\n",
                 res.stats.io.reads_issued, res.stats.io.skip_count,
                 res.stats.candidates_generated, res.stats.drain_discarded,
                 res.stats.exact_distances,
                 res.stats.simulated ? "ticks" : "us", res.stats.latency);
  }
  if (sink != stdout) std::fclose(sink);
  return 0;
}

json report_to_json(const sd::BenchReport& rep) {
  json j;
  j["variant"] = rep.variant;
  j["k"] = rep.k;
  j["l"] = rep.l;
  j["b"] = rep.b;
  j["n_queries"] = rep.n_queries;
  j["baseline"] = rep.baseline;
  j["io_mode"] = rep.io_mode;
  j["threads"] = rep.threads;
  j["recall_mean"] = rep.recall_mean;
  j["latency_mean"] = rep.latency_mean;
  j["latency_p50"] = rep.latency_p50;
  j["latency_p99"] = rep.latency_p99;
  j["latency_p999"] = rep.latency_p999;
  j["reads_mean"] = rep.reads_mean;
  j["filtered_mean"] = rep.filtered_mean;
  j["filtered_fraction"] = rep.filtered_fraction;
  j["drain_discarded_mean"] = rep.drain_discarded_mean;
  j["generated_mean"] = rep.generated_mean;
  j["exact_mean"] = rep.exact_mean;
  j["bytes_read"] = rep.bytes_read;
  j["memory_bytes"] = rep.memory.total();
  return j;
}

int run_bench(const sd::RunConfig& cfg) {
  sd::SkipDiskIndex index = load_from(cfg);
  sd::VectorDataset queries = sd::read_fvecs(require(cfg, "queries"));
  sd::IdDataset truth = sd::read_ivecs(require(cfg, "truth"));

  sd::BenchParams bp;
  bp.search.k = cfg.get_u32("k", 10);
  bp.search.b = cfg.get_u32("b", 32);
  bp.search.io = io_from_config(cfg);
  bp.search.disable_filter = cfg.get_bool("disable_filter", false);
  if (cfg.has("eps")) {
    bp.search.epsilon_override = cfg.get_float("eps", 1.0f);
  }
  bp.baseline = cfg.get_bool("baseline", false);
  bp.threads = cfg.get_u32("threads", 1);
  auto ls = parse_u32_list(cfg.get_string("l", "100"), "l");

  std::ofstream jsonl;
  std::string out = cfg.get_string("out", "");
  if (!out.empty()) {
    jsonl.open(out);
    if (!jsonl) throw sd::IoError("cannot open " + out);
  }

  std::printf(
      "%-5s %5s %5s %4s %9s %11s %11s %11s %9s %10s %12s\n", "var", "k", "l",
      "b", "recall", "lat_mean", "lat_p50", "lat_p99", "reads", "filt_frac",
      "mem_bytes");
  for (std::uint32_t l : ls) {
    bp.search.l = l;
    sd::BenchReport rep = sd::batch_bench(index, queries, bp, truth);
    std::printf("%-5s %5u %5u %4u %9.4f %11.2f %11.2f %11.2f %9.1f %10.4f "
                "%12" PRIu64 "\n",
                rep.variant.c_str(), rep.k, rep.l, rep.b, rep.recall_mean,
                rep.latency_mean, rep.latency_p50, rep.latency_p99,
                rep.reads_mean, rep.filtered_fraction, rep.memory.total());
    if (jsonl.is_open()) {
      jsonl << report_to_json(rep).dump() << "\n";
      if (!jsonl) throw sd::IoError("failed writing " + out);
    }
  }
  return 0;
}

int run_analyze(const sd::RunConfig& cfg) {
  sd::SkipDiskIndex index = load_from(cfg);

  std::printf("index: variant=%s n=%" PRIu64 " dim=%u d_prefix=%u\n",
              sd::variant_name(index.config.variant), index.n, index.dim,
              index.pivots.d_prefix);
  std::printf("explained variance at d_prefix: %.4f; d for 80%%: %u\n",
              sd::explained_variance(index.pca, index.pivots.d_prefix),
              sd::suggest_prefix_dim(index.pca, 0.8));
  if (index.config.variant == sd::Variant::est) {
    std::printf("calibration: epsilon=%.6f p_s=%.3f d_prefix=%u sample=%"
                PRIu64 "\n",
                index.calib.epsilon, index.calib.p_s, index.calib.d_prefix,
                index.calib.sample_size);
  }

  if (cfg.has("dataset")) {
    sd::VectorDataset data = sd::read_fvecs(require(cfg, "dataset"));
    std::vector<std::uint32_t> prefixes;
    if (cfg.has("prefixes")) {
      prefixes = parse_u32_list(require(cfg, "prefixes"), "prefixes");
    } else {
      for (std::uint32_t d : {data.dim / 8, data.dim / 4, data.dim / 2,
                              data.dim}) {
        if (d >= 1 && (prefixes.empty() || prefixes.back() != d)) {
          prefixes.push_back(d);
        }
      }
    }
    sd::TightnessParams tp;
    tp.n_pairs = cfg.get_u64("pairs", tp.n_pairs);
    tp.seed = cfg.get_u64("seed", 42);
    sd::TightnessReport rep =
        sd::tightness_report(data, index.pca, prefixes, tp);
    std::printf("lower-bound tightness over %zu pairs (mean LB/dist):\n",
                rep.pairs_used);
    std::printf("  %8s %12s %12s %12s\n", "d", "per-point", "cluster256",
                "point_wins");
    for (const auto& row : rep.rows) {
      std::printf("  %8u %12.4f %12.4f %12.4f\n", row.d_prefix,
                  row.mean_ratio_point, row.mean_ratio_cluster,
                  row.point_tighter_fraction);
    }
  }

  if (index.config.variant == sd::Variant::est && cfg.has("queries") &&
      cfg.has("truth")) {
    sd::VectorDataset queries = sd::read_fvecs(require(cfg, "queries"));
    sd::IdDataset truth = sd::read_ivecs(require(cfg, "truth"));
    sd::SearchParams sp;
    sp.k = cfg.get_u32("k", 10);
    sp.l = parse_u32_list(cfg.get_string("l", "100"), "l").front();
    sp.b = cfg.get_u32("b", 32);
    sp.io = io_from_config(cfg);
    std::vector<float> eps =
        parse_float_list(cfg.get_string("eps", "0.2,0.4,0.6,0.8,1.0"), "eps");
    auto rows = sd::epsilon_sweep(index, queries, truth, sp, eps);
    std::printf("epsilon sweep (k=%u l=%u b=%u):\n", sp.k, sp.l, sp.b);
    std::printf("  %8s %9s %9s %10s %11s\n", "eps", "recall", "reads",
                "filtered", "lat_mean");
    for (const auto& row : rows) {
      std::printf("  %8.3f %9.4f %9.1f %10.1f %11.2f\n", row.epsilon,
                  row.recall_mean, row.reads_mean, row.filtered_mean,
                  row.latency_mean);
    }
  }
  return 0;
}

// Bridges CLI flags into the RunConfig that the run_* functions consume.
struct FlagSet {
  CLI::App* cmd = nullptr;
  std::string config_path;
  std::vector<std::pair<CLI::Option*, std::function<std::string()>>> binds;
  std::vector<std::pair<CLI::Option*, std::string>> keys;

  void bind(CLI::Option* opt, std::string key,
            std::function<std::string()> render) {
    keys.emplace_back(opt, std::move(key));
    binds.emplace_back(opt, std::move(render));
  }

  sd::RunConfig resolve() const {
    sd::RunConfig cfg;
    if (!config_path.empty()) cfg = sd::load_run_config(config_path);
    sd::apply_env_overrides(&cfg);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (keys[i].first->count() > 0) {
        cfg.set(keys[i].second, binds[i].second());
      }
    }
    return cfg;
  }
};

// Shared flag plumbing; each helper registers one flag and its config key.
struct Flags {
  FlagSet set;
  // Storage must outlive parsing, hence deques of stable addresses.
  std::deque<std::string> strings;
  std::deque<std::uint64_t> u64s;
  std::deque<double> doubles;
  std::deque<bool> bools;
  std::deque<std::vector<std::uint32_t>> u32lists;
  std::deque<std::vector<float>> floatlists;

  explicit Flags(CLI::App* cmd) {
    set.cmd = cmd;
    cmd->add_option("--config", set.config_path,
                    "key=value config file (flags override it)");
  }

  void str(const std::string& flag, const std::string& key,
           const std::string& desc) {
    strings.emplace_back();
    std::string* slot = &strings.back();
    set.bind(set.cmd->add_option(flag, *slot, desc), key,
             [slot] { return *slot; });
  }
  void u64(const std::string& flag, const std::string& key,
           const std::string& desc) {
    u64s.emplace_back(0);
    std::uint64_t* slot = &u64s.back();
    set.bind(set.cmd->add_option(flag, *slot, desc), key,
             [slot] { return std::to_string(*slot); });
  }
  void dbl(const std::string& flag, const std::string& key,
           const std::string& desc) {
    doubles.emplace_back(0.0);
    double* slot = &doubles.back();
    set.bind(set.cmd->add_option(flag, *slot, desc), key, [slot] {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.9g", *slot);
      return std::string(buf);
    });
  }
  void flag(const std::string& flag_name, const std::string& key,
            const std::string& desc) {
    bools.emplace_back(false);
    bool* slot = &bools.back();
    set.bind(set.cmd->add_flag(flag_name, *slot, desc), key,
             [slot] { return *slot ? "1" : "0"; });
  }
  void u32list(const std::string& flag, const std::string& key,
               const std::string& desc) {
    u32lists.emplace_back();
    std::vector<std::uint32_t>* slot = &u32lists.back();
    set.bind(set.cmd->add_option(flag, *slot, desc), key, [slot] {
      std::string joined;
      for (std::uint32_t v : *slot) {
        if (!joined.empty()) joined += ',';
        joined += std::to_string(v);
      }
      return joined;
    });
  }
  void floatlist(const std::string& flag, const std::string& key,
                 const std::string& desc) {
    floatlists.emplace_back();
    std::vector<float>* slot = &floatlists.back();
    set.bind(set.cmd->add_option(flag, *slot, desc), key, [slot] {
      std::string joined;
      char buf[64];
      for (float v : *slot) {
        if (!joined.empty()) joined += ',';
        std::snprintf(buf, sizeof buf, "%.9g", v);
        joined += buf;
      }
      return joined;
    });
  }
};

void add_io_flags(Flags& f) {
  f.str("--io", "io", "I/O backend: real | sim");
  f.dbl("--sim-mean-us", "sim_mean_us", "simulated mean read latency");
  f.dbl("--sim-jitter-us", "sim_jitter_us", "simulated latency jitter");
}

void add_search_flags(Flags& f) {
  f.u64("--k", "k", "neighbors to return");
  f.u32list("--l", "l", "search list size(s); repeatable");
  f.u64("--b", "b", "max in-flight reads");
  f.floatlist("--eps", "eps", "estimation threshold override(s)");
  f.flag("--disable-filter", "disable_filter", "fetch every candidate");
  f.flag("--baseline", "baseline", "synchronous reference traversal");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skipdisk: disk-resident ANN with lower-bound read skipping"};
  app.require_subcommand(1);
  std::deque<Flags> all;

  auto& gen = all.emplace_back(app.add_subcommand("gen", "synthesize fvecs"));
  gen.u64("--n", "n", "number of points");
  gen.u64("--dim", "dim", "dimensionality");
  gen.str("--model", "model", "gaussian | clustered");
  gen.u64("--clusters", "clusters", "cluster count (clustered model)");
  gen.dbl("--spread", "spread", "cluster spread (clustered model)");
  gen.u64("--seed", "seed", "generator seed");
  gen.str("--out", "out", "output fvecs path");

  auto& gt = all.emplace_back(
      app.add_subcommand("gt", "brute-force ground truth"));
  gt.str("--dataset", "dataset", "fvecs dataset");
  gt.str("--queries", "queries", "fvecs queries");
  gt.u64("--k", "k", "neighbors per query");
  gt.str("--out", "out", "output ivecs path");

  auto& build = all.emplace_back(
      app.add_subcommand("build", "build index + store"));
  build.str("--dataset", "dataset", "fvecs dataset");
  build.str("--variant", "variant", "base | pb | pbc | est");
  build.u64("--dlb", "d_lb", "lower-bound pivot prefix length");
  build.u64("--ddade", "d_dade", "estimation pivot prefix length");
  build.u64("--dpq", "d_pq", "PQ input prefix length");
  build.u64("--sub-dim", "sub_dim", "PQ subspace width");
  build.u64("--pq-iters", "pq_iters", "PQ k-means iterations");
  build.u64("--r", "r", "graph degree bound");
  build.u64("--l-build", "l_build", "construction search list size");
  build.dbl("--alpha", "alpha", "robust-prune slack");
  build.dbl("--keep-fraction", "keep_fraction", "resident share (pbc)");
  build.dbl("--ps", "p_s", "estimation error parameter (est)");
  build.u64("--seed", "seed", "build seed");
  build.str("--out", "out", "output path prefix (.skix/.skdv)");

  auto& search = all.emplace_back(
      app.add_subcommand("search", "query an index"));
  search.str("--index", "index", "index path prefix");
  search.str("--queries", "queries", "fvecs queries");
  search.str("--out", "out", "results file (default stdout)");
  search.u64("--seed", "seed", "simulated-I/O seed");
  add_search_flags(search);
  add_io_flags(search);

  auto& bench = all.emplace_back(
      app.add_subcommand("bench", "L-sweep benchmark"));
  bench.str("--index", "index", "index path prefix");
  bench.str("--queries", "queries", "fvecs queries");
  bench.str("--truth", "truth", "ivecs ground truth");
  bench.str("--out", "out", "JSONL records path");
  bench.u64("--threads", "threads", "query threads");
  bench.u64("--seed", "seed", "simulated-I/O seed");
  add_search_flags(bench);
  add_io_flags(bench);

  auto& analyze = all.emplace_back(
      app.add_subcommand("analyze", "tightness + epsilon reports"));
  analyze.str("--index", "index", "index path prefix");
  analyze.str("--dataset", "dataset", "fvecs dataset (tightness)");
  analyze.str("--queries", "queries", "fvecs queries (epsilon sweep)");
  analyze.str("--truth", "truth", "ivecs truth (epsilon sweep)");
  analyze.u32list("--prefix", "prefixes", "prefix length(s); repeatable");
  analyze.u64("--pairs", "pairs", "sampled pairs for tightness");
  analyze.u64("--seed", "seed", "sampling seed");
  add_search_flags(analyze);
  add_io_flags(analyze);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (gen.set.cmd->parsed()) return run_gen(gen.set.resolve());
    if (gt.set.cmd->parsed()) return run_gt(gt.set.resolve());
    if (build.set.cmd->parsed()) return run_build(build.set.resolve());
    if (search.set.cmd->parsed()) return run_search(search.set.resolve());
    if (bench.set.cmd->parsed()) return run_bench(bench.set.resolve());
    if (analyze.set.cmd->parsed()) return run_analyze(analyze.set.resolve());
  } catch (const sd::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const sd::QueueFullError& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 4;
  } catch (const sd::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const sd::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  }
  return 0;
}
