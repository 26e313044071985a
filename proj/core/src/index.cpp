#include "skipdisk/index.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>
#include <numeric>

#include "skipdisk/distance.hpp"
#include "skipdisk/frontier.hpp"

namespace skipdisk {

namespace {

constexpr char kIndexMagic[4] = {'S', 'K', 'I', 'X'};
constexpr std::uint32_t kIndexVersion = 1;
constexpr std::uint32_t kCalibQueries = 1000;
constexpr std::uint32_t kCalibPerQuery = 8;
constexpr std::uint32_t kCalibSearchL = 64;

// ---- binary section plumbing ------------------------------------------

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) { raw(&v, 2); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void f32(float v) { raw(&v, 4); }
  void raw(const void* p, std::size_t size) {
    const char* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + size);
  }
  const std::vector<char>& bytes() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(const char* p, std::size_t size, std::string name)
      : p_(p), end_(p + size), name_(std::move(name)) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(*take(1)); }
  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  float f32() { return get<float>(); }
  void raw(void* out, std::size_t size) { std::memcpy(out, take(size), size); }
  bool exhausted() const { return p_ == end_; }

 private:
  template <typename T>
  T get() {
    T v;
    std::memcpy(&v, take(sizeof(T)), sizeof(T));
    return v;
  }
  const char* take(std::size_t size) {
    if (static_cast<std::size_t>(end_ - p_) < size) {
      throw DataError(name_ + ": truncated index section");
    }
    const char* at = p_;
    p_ += size;
    return at;
  }

  const char* p_;
  const char* end_;
  std::string name_;
};

struct Section {
  char tag[4];
  std::vector<char> payload;
};

void write_index_file(const std::filesystem::path& path,
                      const std::vector<Section>& sections) {
  Writer head;
  head.raw(kIndexMagic, 4);
  head.u32(kIndexVersion);
  head.u32(static_cast<std::uint32_t>(sections.size()));
  head.u32(0);
  // Directory: tag, pad, offset, size.  Sections follow the directory,
  // each prefixed by its own tag + length for standalone validation.
  std::uint64_t dir_bytes = sections.size() * 24ull;
  std::uint64_t offset = 16 + dir_bytes;
  Writer dir;
  for (const auto& s : sections) {
    dir.raw(s.tag, 4);
    dir.u32(0);
    dir.u64(offset);
    dir.u64(s.payload.size());
    offset += 12 + s.payload.size();
  }

  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot create " + path.string());
  auto put = [&](const void* p, std::size_t size) {
    if (std::fwrite(p, 1, size, f) != size) {
      std::fclose(f);
      throw IoError("write failed on " + path.string());
    }
  };
  put(head.bytes().data(), head.bytes().size());
  put(dir.bytes().data(), dir.bytes().size());
  for (const auto& s : sections) {
    std::uint64_t size = s.payload.size();
    put(s.tag, 4);
    put(&size, 8);
    put(s.payload.data(), s.payload.size());
  }
  if (std::fflush(f) != 0) {
    std::fclose(f);
    throw IoError("flush failed on " + path.string());
  }
  std::fclose(f);
}

std::vector<Section> read_index_file(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path.string());
  std::fseek(f, 0, SEEK_END);
  long fsize = std::ftell(f);
  std::fseek(f, 0, SEEK_SET);
  std::vector<char> all(static_cast<std::size_t>(fsize));
  if (std::fread(all.data(), 1, all.size(), f) != all.size()) {
    std::fclose(f);
    throw IoError("read failed on " + path.string());
  }
  std::fclose(f);

  if (all.size() < 16 || std::memcmp(all.data(), kIndexMagic, 4) != 0) {
    throw DataError(path.string() + ": not an index file");
  }
  Reader head(all.data() + 4, 12, path.string());
  std::uint32_t version = head.u32();
  if (version != kIndexVersion) {
    throw DataError(path.string() + ": unsupported index version " +
                    std::to_string(version));
  }
  std::uint32_t count = head.u32();
  if (all.size() < 16 + count * 24ull) {
    throw DataError(path.string() + ": truncated directory");
  }
  std::vector<Section> sections;
  for (std::uint32_t i = 0; i < count; ++i) {
    Reader dir(all.data() + 16 + i * 24ull, 24, path.string());
    Section s;
    dir.raw(s.tag, 4);
    dir.u32();
    std::uint64_t offset = dir.u64();
    std::uint64_t size = dir.u64();
    if (offset + 12 + size > all.size()) {
      throw DataError(path.string() + ": section out of bounds");
    }
    if (std::memcmp(all.data() + offset, s.tag, 4) != 0) {
      throw DataError(path.string() + ": section magic mismatch");
    }
    std::uint64_t inline_size;
    std::memcpy(&inline_size, all.data() + offset + 4, 8);
    if (inline_size != size) {
      throw DataError(path.string() + ": section length mismatch");
    }
    const char* payload = all.data() + offset + 12;
    s.payload.assign(payload, payload + size);
    sections.push_back(std::move(s));
  }
  return sections;
}

const Section* find_section(const std::vector<Section>& sections,
                            const char tag[4]) {
  for (const auto& s : sections) {
    if (std::memcmp(s.tag, tag, 4) == 0) return &s;
  }
  return nullptr;
}

// ---- per-structure encode/decode --------------------------------------

Section make_conf(const SkipDiskIndex& idx) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(idx.config.variant));
  w.u32(idx.dim);
  w.u64(idx.n);
  w.u64(idx.seed);
  w.u32(idx.config.d_pq);
  w.u32(idx.config.d_lb);
  w.u32(idx.config.d_dade);
  w.u32(idx.config.sub_dim);
  w.u32(idx.config.pq_iters);
  w.u32(idx.config.r);
  w.u32(idx.config.l_build);
  w.f32(idx.config.alpha);
  w.f32(idx.config.keep_fraction);
  w.f32(idx.config.p_s);
  w.u64(idx.config.pca_sample_cap);
  return Section{{'C', 'O', 'N', 'F'}, w.bytes()};
}

void parse_conf(const Section& s, const std::string& name, SkipDiskIndex* idx) {
  Reader r(s.payload.data(), s.payload.size(), name);
  std::uint32_t variant = r.u32();
  if (variant > 3) throw DataError(name + ": unknown variant code");
  idx->config.variant = static_cast<Variant>(variant);
  idx->dim = r.u32();
  idx->n = r.u64();
  idx->seed = r.u64();
  idx->config.d_pq = r.u32();
  idx->config.d_lb = r.u32();
  idx->config.d_dade = r.u32();
  idx->config.sub_dim = r.u32();
  idx->config.pq_iters = r.u32();
  idx->config.r = r.u32();
  idx->config.l_build = r.u32();
  idx->config.alpha = r.f32();
  idx->config.keep_fraction = r.f32();
  idx->config.p_s = r.f32();
  idx->config.pca_sample_cap = r.u64();
}

Section make_pca(const PcaModel& m) {
  Writer w;
  w.u32(m.dim);
  w.raw(m.mean.data(), m.mean.size() * 4);
  w.raw(m.rotation.data(), m.rotation.size() * 4);
  w.raw(m.eigenvalues.data(), m.eigenvalues.size() * 4);
  return Section{{'P', 'C', 'A', 'R'}, w.bytes()};
}

void parse_pca(const Section& s, const std::string& name, PcaModel* m) {
  Reader r(s.payload.data(), s.payload.size(), name);
  m->dim = r.u32();
  m->mean.resize(m->dim);
  m->rotation.resize(static_cast<std::size_t>(m->dim) * m->dim);
  m->eigenvalues.resize(m->dim);
  r.raw(m->mean.data(), m->mean.size() * 4);
  r.raw(m->rotation.data(), m->rotation.size() * 4);
  r.raw(m->eigenvalues.data(), m->eigenvalues.size() * 4);
}

Section make_pq(const PqCodebook& cb, const PqCodes& codes) {
  Writer w;
  w.u32(cb.m);
  w.u32(cb.sub_dim);
  w.raw(cb.centroids.data(), cb.centroids.size() * 4);
  w.raw(codes.codes.data(), codes.codes.size());
  return Section{{'P', 'Q', 'C', 'B'}, w.bytes()};
}

void parse_pq(const Section& s, const std::string& name, std::uint64_t n,
              PqCodebook* cb, PqCodes* codes) {
  Reader r(s.payload.data(), s.payload.size(), name);
  cb->m = r.u32();
  cb->sub_dim = r.u32();
  cb->centroids.resize(static_cast<std::size_t>(cb->m) * 256 * cb->sub_dim);
  r.raw(cb->centroids.data(), cb->centroids.size() * 4);
  codes->m = cb->m;
  codes->codes.resize(n * cb->m);
  r.raw(codes->codes.data(), codes->codes.size());
}

Section make_graph(const NeighborGraph& g) {
  Writer w;
  w.u64(g.size());
  w.u32(g.r);
  w.u32(g.entry);
  for (std::size_t i = 0; i < g.size(); ++i) {
    w.u32(g.len[i]);  // u8 value stored zero-extended to u32
    w.raw(g.adjacency.data() + i * g.r, static_cast<std::size_t>(g.r) * 4);
  }
  return Section{{'G', 'R', 'P', 'H'}, w.bytes()};
}

void parse_graph(const Section& s, const std::string& name, std::uint64_t n,
                 NeighborGraph* g) {
  Reader r(s.payload.data(), s.payload.size(), name);
  std::uint64_t gn = r.u64();
  if (gn != n) throw DataError(name + ": graph size mismatch");
  g->r = r.u32();
  g->entry = r.u32();
  g->adjacency.resize(n * g->r);
  g->len.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t len = r.u32();
    if (len > g->r) throw DataError(name + ": neighbor list overflow");
    g->len[i] = static_cast<std::uint8_t>(len);
    r.raw(g->adjacency.data() + i * g->r, static_cast<std::size_t>(g->r) * 4);
  }
}

Section make_pivots(const PivotStore& p) {
  Writer w;
  w.u32(p.d_prefix);
  w.u32(static_cast<std::uint32_t>(p.precision));
  w.u64(p.resident_count());
  std::vector<std::uint8_t> bitmap((p.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.resident[i]) bitmap[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  w.raw(bitmap.data(), bitmap.size());
  w.raw(p.residuals.data(), p.residuals.size() * 4);
  if (p.precision == PivotPrecision::bf16) {
    w.raw(p.pivots_bf16.data(), p.pivots_bf16.size() * 2);
  } else {
    w.raw(p.pivots_f32.data(), p.pivots_f32.size() * 4);
  }
  return Section{{'P', 'V', 'T', 'S'}, w.bytes()};
}

void parse_pivots(const Section& s, const std::string& name, std::uint64_t n,
                  PivotStore* p) {
  Reader r(s.payload.data(), s.payload.size(), name);
  p->d_prefix = r.u32();
  std::uint32_t precision = r.u32();
  if (precision != 2 && precision != 4) {
    throw DataError(name + ": bad pivot precision");
  }
  p->precision = static_cast<PivotPrecision>(precision);
  std::uint64_t resident_count = r.u64();
  std::vector<std::uint8_t> bitmap((n + 7) / 8);
  r.raw(bitmap.data(), bitmap.size());
  p->resident.resize(n);
  p->slot.assign(n, kInvalidId);
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool res = (bitmap[i / 8] >> (i % 8)) & 1u;
    p->resident[i] = res ? 1 : 0;
    if (res) p->slot[i] = static_cast<std::uint32_t>(count++);
  }
  if (count != resident_count) {
    throw DataError(name + ": resident bitmap/count mismatch");
  }
  p->residuals.resize(resident_count);
  r.raw(p->residuals.data(), p->residuals.size() * 4);
  if (p->precision == PivotPrecision::bf16) {
    p->pivots_bf16.resize(resident_count * p->d_prefix);
    r.raw(p->pivots_bf16.data(), p->pivots_bf16.size() * 2);
  } else {
    p->pivots_f32.resize(resident_count * p->d_prefix);
    r.raw(p->pivots_f32.data(), p->pivots_f32.size() * 4);
  }
}

Section make_calib(const EstimationCalibration& c) {
  Writer w;
  w.f32(c.epsilon);
  w.f32(c.p_s);
  w.u32(c.d_prefix);
  w.u32(0);
  w.u64(c.sample_size);
  return Section{{'E', 'S', 'T', 'C'}, w.bytes()};
}

void parse_calib(const Section& s, const std::string& name,
                 EstimationCalibration* c) {
  Reader r(s.payload.data(), s.payload.size(), name);
  c->epsilon = r.f32();
  c->p_s = r.f32();
  c->d_prefix = r.u32();
  r.u32();
  c->sample_size = r.u64();
}

void save_index(const SkipDiskIndex& idx, const std::filesystem::path& path) {
  std::vector<Section> sections;
  sections.push_back(make_conf(idx));
  sections.push_back(make_pca(idx.pca));
  sections.push_back(make_pq(idx.pq, idx.codes));
  sections.push_back(make_graph(idx.graph));
  sections.push_back(make_pivots(idx.pivots));
  if (idx.config.variant == Variant::est) {
    sections.push_back(make_calib(idx.calib));
  }
  write_index_file(path, sections);
}

VectorDataset prefix_slice(const VectorDataset& reduced, std::uint32_t d) {
  VectorDataset out;
  out.dim = d;
  out.data.resize(reduced.size() * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < reduced.size(); ++i) {
    std::copy_n(reduced.vec(i).data(), d, out.data.data() + i * d);
  }
  return out;
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::base:
      return "base";
    case Variant::pb:
      return "pb";
    case Variant::pbc:
      return "pbc";
    case Variant::est:
      return "est";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "base") return Variant::base;
  if (name == "pb") return Variant::pb;
  if (name == "pbc") return Variant::pbc;
  if (name == "est") return Variant::est;
  throw ConfigError("unknown variant '" + name + "'");
}

void IndexConfig::clamp_prefixes(std::uint32_t dim) {
  d_pq = std::min(d_pq, dim);
  d_lb = std::min(d_lb, dim);
  d_dade = std::min(d_dade, dim);
  if (d_pq % sub_dim != 0) d_pq -= d_pq % sub_dim;
}

void IndexConfig::validate(std::uint32_t dim) const {
  if (d_pq == 0 || d_pq > dim) throw ConfigError("d_pq out of range");
  if (d_lb == 0 || d_lb > dim) throw ConfigError("d_lb out of range");
  if (d_dade == 0 || d_dade > dim) throw ConfigError("d_dade out of range");
  if (sub_dim == 0 || d_pq % sub_dim != 0) {
    throw ConfigError("d_pq must be divisible by sub_dim");
  }
  if (pq_iters == 0) throw ConfigError("pq_iters must be >= 1");
  if (r < 2) throw ConfigError("R must be >= 2");
  if (l_build < r) throw ConfigError("L_build must be >= R");
  if (alpha < 1.0f) throw ConfigError("alpha must be >= 1");
  if (!(keep_fraction > 0.0f && keep_fraction <= 1.0f)) {
    throw ConfigError("keep_fraction must be in (0, 1]");
  }
  if (!(p_s > 0.0f && p_s < 1.0f)) throw ConfigError("p_s must be in (0, 1)");
  if (pca_sample_cap < 2) throw ConfigError("pca_sample_cap must be >= 2");
}

MemoryAccounting account_memory(const SkipDiskIndex& index) {
  // Accounting covers the canonical resident structures; transient
  // acceleration tables (the pivot slot index) are derivable from the
  // bitmap and not charged.
  MemoryAccounting a;
  a.graph_bytes = index.graph.adjacency.size() * 4 + index.graph.len.size();
  a.pq_code_bytes = index.codes.codes.size();
  a.pq_codebook_bytes = index.pq.centroids.size() * 4;
  a.pivot_bytes = index.pivots.precision == PivotPrecision::bf16
                      ? index.pivots.pivots_bf16.size() * 2
                      : index.pivots.pivots_f32.size() * 4;
  a.residual_bytes = index.pivots.residuals.size() * 4;
  a.bitmap_bytes = (index.pivots.size() + 7) / 8;
  return a;
}

std::vector<std::pair<PointId, PointId>> collect_calibration_pairs(
    const VectorDataset& data, const NeighborGraph& graph, const PcaModel& pca,
    const PqCodebook& pq, const PqCodes& codes, std::size_t n_queries,
    std::size_t per_query, std::uint64_t seed) {
  const std::size_t n = data.size();
  Rng rng(derive_seed(seed, seed_tag::kCalibration));

  std::vector<PointId> qids(n);
  std::iota(qids.begin(), qids.end(), 0u);
  std::size_t nq = std::min(n_queries, n);
  for (std::size_t i = 0; i < nq; ++i) {
    std::size_t j = i + rng.bounded(n - i);
    std::swap(qids[i], qids[j]);
  }

  std::vector<std::pair<PointId, PointId>> pairs;
  pairs.reserve(nq * per_query);
  std::vector<float> q_reduced(pq.d_pq());
  std::vector<std::uint32_t> stamp(n, 0);
  std::uint32_t epoch = 0;
  FrontierList frontier(kCalibSearchL);
  std::vector<PointId> cands;

  for (std::size_t qi = 0; qi < nq; ++qi) {
    PointId qid = qids[qi];
    pca_apply(pca, data.vec(qid), q_reduced);
    QueryLut lut = build_lut(pq, q_reduced);

    ++epoch;
    frontier.clear();
    cands.clear();
    stamp[graph.entry] = epoch;
    frontier.insert(adc_distance(lut, codes.row(graph.entry), pq.m),
                    graph.entry);
    cands.push_back(graph.entry);
    while (frontier.has_unchecked()) {
      auto e = frontier.pop_unchecked();
      for (PointId nb : graph.neighbors(e.id)) {
        if (stamp[nb] == epoch) continue;
        stamp[nb] = epoch;
        frontier.insert(adc_distance(lut, codes.row(nb), pq.m), nb);
        cands.push_back(nb);
      }
    }
    std::size_t take = std::min(per_query, cands.size());
    for (std::size_t i = 0; i < take; ++i) {
      std::size_t j = i + rng.bounded(cands.size() - i);
      std::swap(cands[i], cands[j]);
      pairs.emplace_back(qid, cands[i]);
    }
  }
  return pairs;
}

std::vector<SkipDiskIndex> build_index_family(
    const VectorDataset& data, std::span<const IndexConfig> configs,
    std::uint64_t seed, std::span<const std::filesystem::path> index_paths,
    const std::filesystem::path& store_path) {
  if (configs.empty() || configs.size() != index_paths.size()) {
    throw ConfigError("build_index_family: config/path count mismatch");
  }
  const std::size_t n = data.size();
  if (n < 2) throw DataError("build_index_family: need at least two points");
  for (const auto& cfg : configs) {
    cfg.validate(data.dim);
    if (cfg.d_pq != configs[0].d_pq || cfg.sub_dim != configs[0].sub_dim ||
        cfg.pq_iters != configs[0].pq_iters || cfg.r != configs[0].r ||
        cfg.l_build != configs[0].l_build || cfg.alpha != configs[0].alpha ||
        cfg.pca_sample_cap != configs[0].pca_sample_cap) {
      throw ConfigError(
          "build_index_family: configs differ in shared build stages");
    }
  }

  PcaModel pca = fit_pca(data, configs[0].pca_sample_cap, seed);

  std::uint32_t d_max = configs[0].d_pq;
  for (const auto& cfg : configs) {
    d_max = std::max(d_max, cfg.pivot_prefix());
  }
  VectorDataset reduced = pca_apply_batch(pca, data, d_max);

  const VectorDataset* reduced_pq = &reduced;
  VectorDataset reduced_pq_storage;
  if (configs[0].d_pq != d_max) {
    reduced_pq_storage = prefix_slice(reduced, configs[0].d_pq);
    reduced_pq = &reduced_pq_storage;
  }
  PqCodebook pq =
      train_pq(*reduced_pq, configs[0].sub_dim, configs[0].pq_iters, seed);
  PqCodes codes = pq_encode_all(pq, *reduced_pq);

  BuildParams bp{configs[0].r, configs[0].l_build, configs[0].alpha};
  NeighborGraph graph = build_vamana(data, bp, seed);

  bool any_est = std::any_of(configs.begin(), configs.end(), [](const auto& c) {
    return c.variant == Variant::est;
  });
  std::vector<std::pair<PointId, PointId>> calib_ids;
  if (any_est) {
    calib_ids = collect_calibration_pairs(data, graph, pca, pq, codes,
                                          kCalibQueries, kCalibPerQuery, seed);
  }

  write_store(data, store_path);

  std::vector<SkipDiskIndex> out;
  out.reserve(configs.size());
  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    const IndexConfig& cfg = configs[ci];
    SkipDiskIndex idx;
    idx.config = cfg;
    idx.n = n;
    idx.dim = data.dim;
    idx.seed = seed;
    idx.pca = pca;
    idx.pq = pq;
    idx.codes = codes;
    idx.graph = graph;

    std::vector<std::uint8_t> resident;
    if (cfg.resident_fraction() >= 1.0f) {
      resident.assign(n, 1);
    } else {
      resident = select_resident_points(graph, cfg.resident_fraction());
    }
    std::uint32_t dp = cfg.pivot_prefix();
    const VectorDataset* reduced_p = &reduced;
    VectorDataset reduced_p_storage;
    if (dp != d_max) {
      reduced_p_storage = prefix_slice(reduced, dp);
      reduced_p = &reduced_p_storage;
    }
    idx.pivots = build_pivots(*reduced_p, resident, cfg.pivot_precision());

    if (cfg.variant == Variant::est) {
      std::vector<std::pair<std::span<const float>, std::span<const float>>>
          pairs;
      pairs.reserve(calib_ids.size());
      for (auto [qid, pid] : calib_ids) {
        pairs.emplace_back(data.vec(qid), data.vec(pid));
      }
      idx.calib = calibrate_epsilon(pca, pairs, cfg.p_s, cfg.d_dade);
    }

    save_index(idx, index_paths[ci]);
    idx.store = std::make_unique<DiskStore>(store_path, /*try_direct=*/false);
    out.push_back(std::move(idx));
  }
  return out;
}

SkipDiskIndex build_index(const VectorDataset& data, const IndexConfig& config,
                          std::uint64_t seed,
                          const std::filesystem::path& index_path,
                          const std::filesystem::path& store_path) {
  std::array<IndexConfig, 1> cfgs{config};
  std::array<std::filesystem::path, 1> paths{index_path};
  auto family = build_index_family(data, cfgs, seed, paths, store_path);
  return std::move(family[0]);
}

SkipDiskIndex load_index(const std::filesystem::path& index_path,
                         const std::filesystem::path& store_path,
                         bool try_direct) {
  std::vector<Section> sections = read_index_file(index_path);
  const std::string name = index_path.string();

  SkipDiskIndex idx;
  const Section* conf = find_section(sections, "CONF");
  if (!conf) throw DataError(name + ": missing CONF section");
  parse_conf(*conf, name, &idx);

  const Section* pca = find_section(sections, "PCAR");
  if (!pca) throw DataError(name + ": missing PCAR section");
  parse_pca(*pca, name, &idx.pca);
  if (idx.pca.dim != idx.dim) throw DataError(name + ": PCA dim mismatch");

  const Section* pq = find_section(sections, "PQCB");
  if (!pq) throw DataError(name + ": missing PQCB section");
  parse_pq(*pq, name, idx.n, &idx.pq, &idx.codes);

  const Section* graph = find_section(sections, "GRPH");
  if (!graph) throw DataError(name + ": missing GRPH section");
  parse_graph(*graph, name, idx.n, &idx.graph);

  const Section* pivots = find_section(sections, "PVTS");
  if (!pivots) throw DataError(name + ": missing PVTS section");
  parse_pivots(*pivots, name, idx.n, &idx.pivots);
  if (idx.pivots.d_prefix != idx.config.pivot_prefix()) {
    throw DataError(name + ": pivot prefix disagrees with config");
  }

  if (idx.config.variant == Variant::est) {
    const Section* calib = find_section(sections, "ESTC");
    if (!calib) throw DataError(name + ": missing ESTC section");
    parse_calib(*calib, name, &idx.calib);
  }

  idx.store = std::make_unique<DiskStore>(store_path, try_direct);
  const DiskLayout& layout = idx.store->layout();
  if (layout.n != idx.n || layout.dim != idx.dim) {
    throw DataError(store_path.string() + ": store does not match index");
  }
  return idx;
}

}  // namespace skipdisk
