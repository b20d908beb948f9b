// SPDX-License-Identifier: Apache-2.0

#include "breakage/experience.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>

namespace breakage::experience {

using nlohmann::json;

double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension())
    throw Error(ErrorKind::DimensionMismatch,
                "cosine_distance dimensions differ: " + std::to_string(a.dimension()) + " vs " +
                    std::to_string(b.dimension()));
  double dot = 0.0;
  for (int i = 0; i < a.dimension(); ++i)
    dot += static_cast<double>(a.values[i]) * static_cast<double>(b.values[i]);
  return 1.0 - dot;
}

void normalize(EmbeddingVector& v) {
  double norm_sq = 0.0;
  for (int i = 0; i < v.dimension(); ++i)
    norm_sq += static_cast<double>(v.values[i]) * static_cast<double>(v.values[i]);
  double norm = std::sqrt(norm_sq);
  if (norm > 0.0)
    for (int i = 0; i < v.dimension(); ++i)
      v.values[i] = static_cast<float>(static_cast<double>(v.values[i]) / norm);
  v.normalized = true;
}

EmbeddingVector DeterministicEmbedder::embed(const std::string& text) const {
  Rng rng(djb2(text));
  EmbeddingVector v;
  v.values.resize(dimension_);
  for (int i = 0; i < dimension_; ++i)
    v.values[i] = static_cast<float>(rng.next_in(-1.0, 1.0));
  normalize(v);
  return v;
}

EmbeddingVector TokenHashEmbedder::embed(const std::string& text) const {
  EmbeddingVector v;
  v.values = Eigen::VectorXf::Zero(dimension_);
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::uint64_t h = djb2(token);
    int idx = static_cast<int>(h % static_cast<std::uint64_t>(dimension_));
    float sign = (h >> 63) ? -1.0f : 1.0f;
    v.values[idx] += sign;
    token.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')
      token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else
      flush();
  }
  flush();
  normalize(v);
  return v;
}

EmbeddingVector RecordedEmbedder::embed(const std::string& text) const {
  auto it = fixtures_.find(text);
  if (it != fixtures_.end()) return it->second;
  // Unknown text: zero vector, guaranteed beyond any distance threshold.
  EmbeddingVector v;
  v.values = Eigen::VectorXf::Zero(dimension_);
  v.normalized = true;
  return v;
}

std::string outcome_to_string(Outcome o) {
  switch (o) {
    case Outcome::Resolved: return "resolved";
    case Outcome::Regressed: return "regressed";
    case Outcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::optional<Outcome> outcome_from_string(const std::string& s) {
  if (s == "resolved") return Outcome::Resolved;
  if (s == "regressed") return Outcome::Regressed;
  if (s == "inconclusive") return Outcome::Inconclusive;
  return std::nullopt;
}

std::string embedding_text(const Postmortem& pm) {
  std::string text = pm.narrative;
  text += "\n";
  text += pm.primary_category;
  text += "\n";
  for (size_t i = 0; i < pm.actions_taken.size(); ++i) {
    if (i) text += " ";
    text += pm.actions_taken[i];
  }
  return text;
}

RetrievalConfig apply_env_overrides(RetrievalConfig cfg) {
  if (const char* e = std::getenv("BREAKAGE_EMBEDDER")) {
    std::string v = e;
    if (v == "deterministic") cfg.embedder = EmbedderKind::Deterministic;
    else if (v == "external") cfg.embedder = EmbedderKind::External;
    else throw Error(ErrorKind::Schema, "BREAKAGE_EMBEDDER must be deterministic|external");
  }
  if (const char* e = std::getenv("BREAKAGE_RETRIEVAL_MAX_DISTANCE"))
    cfg.max_distance = std::strtod(e, nullptr);
  if (const char* e = std::getenv("BREAKAGE_RETRIEVAL_POOL_CAP")) {
    std::string v = e;
    if (v == "unlimited") cfg.pool_cap.reset();
    else cfg.pool_cap = static_cast<int>(std::strtol(e, nullptr, 10));
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

const char kBase64Chars[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<unsigned char>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (size_t i = 0; i < bytes.size(); i += 3) {
    unsigned int chunk = bytes[i] << 16;
    if (i + 1 < bytes.size()) chunk |= bytes[i + 1] << 8;
    if (i + 2 < bytes.size()) chunk |= bytes[i + 2];
    out += kBase64Chars[(chunk >> 18) & 0x3f];
    out += kBase64Chars[(chunk >> 12) & 0x3f];
    out += i + 1 < bytes.size() ? kBase64Chars[(chunk >> 6) & 0x3f] : '=';
    out += i + 2 < bytes.size() ? kBase64Chars[chunk & 0x3f] : '=';
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<unsigned char> out;
  int acc = 0, bits = 0;
  for (char c : text) {
    if (c == '=') break;
    int v = value_of(c);
    if (v < 0) throw Error(ErrorKind::Syntax, "bad base64 in store record");
    acc = (acc << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<unsigned char>((acc >> bits) & 0xff));
    }
  }
  return out;
}

std::string encode_embedding(const EmbeddingVector& v) {
  std::vector<unsigned char> bytes(static_cast<size_t>(v.dimension()) * 4);
  for (int i = 0; i < v.dimension(); ++i) {
    float f = v.values[i];
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    // little-endian
    bytes[i * 4 + 0] = u & 0xff;
    bytes[i * 4 + 1] = (u >> 8) & 0xff;
    bytes[i * 4 + 2] = (u >> 16) & 0xff;
    bytes[i * 4 + 3] = (u >> 24) & 0xff;
  }
  return base64_encode(bytes);
}

EmbeddingVector decode_embedding(const std::string& b64) {
  auto bytes = base64_decode(b64);
  if (bytes.size() % 4 != 0) throw Error(ErrorKind::Syntax, "embedding bytes not float32-aligned");
  EmbeddingVector v;
  v.values.resize(static_cast<int>(bytes.size() / 4));
  for (int i = 0; i < v.dimension(); ++i) {
    std::uint32_t u = bytes[i * 4] | (bytes[i * 4 + 1] << 8) | (bytes[i * 4 + 2] << 16) |
                      (static_cast<std::uint32_t>(bytes[i * 4 + 3]) << 24);
    float f;
    std::memcpy(&f, &u, 4);
    v.values[i] = f;
  }
  v.normalized = true;
  return v;
}

}  // namespace

std::string postmortem_to_json(const Postmortem& pm) {
  json j;
  j["id"] = pm.id;
  j["scenario_id"] = pm.scenario_id;
  j["created_tick"] = pm.created_tick;
  j["primary_category"] = pm.primary_category;
  j["secondary_categories"] = pm.secondary_categories;
  j["narrative"] = pm.narrative;
  j["actions_taken"] = pm.actions_taken;
  j["outcome"] = outcome_to_string(pm.outcome);
  json hyps = json::array();
  for (const auto& h : pm.hypotheses)
    hyps.push_back({{"at_tick", h.at_tick},
                    {"category", h.category},
                    {"confidence", h.confidence},
                    {"note", h.note}});
  j["hypotheses"] = hyps;
  j["embedding"] = encode_embedding(pm.embedding);
  j["arm"] = pm.arm;
  j["run_seed"] = pm.run_seed;
  return j.dump();
}

Postmortem postmortem_from_json(const std::string& line, int dimension) {
  json j = json::parse(line);
  Postmortem pm;
  pm.id = j.at("id").get<std::string>();
  pm.scenario_id = j.at("scenario_id").get<std::string>();
  pm.created_tick = j.at("created_tick").get<std::int64_t>();
  pm.primary_category = j.at("primary_category").get<std::string>();
  pm.secondary_categories = j.at("secondary_categories").get<std::vector<std::string>>();
  pm.narrative = j.at("narrative").get<std::string>();
  pm.actions_taken = j.at("actions_taken").get<std::vector<std::string>>();
  auto outcome = outcome_from_string(j.at("outcome").get<std::string>());
  if (!outcome) throw Error(ErrorKind::Syntax, "bad outcome label in store record");
  pm.outcome = *outcome;
  for (const auto& h : j.at("hypotheses")) {
    HypothesisRecord rec;
    rec.at_tick = h.at("at_tick").get<std::int64_t>();
    rec.category = h.at("category").get<std::string>();
    rec.confidence = h.at("confidence").get<double>();
    rec.note = h.at("note").get<std::string>();
    pm.hypotheses.push_back(std::move(rec));
  }
  pm.embedding = decode_embedding(j.at("embedding").get<std::string>());
  if (pm.embedding.dimension() != dimension)
    throw Error(ErrorKind::DimensionMismatch, "store record dimension mismatch for " + pm.id);
  pm.arm = j.at("arm").get<std::string>();
  pm.run_seed = j.at("run_seed").get<std::int64_t>();
  return pm;
}

// ---------------------------------------------------------------------------
// Store
// ---------------------------------------------------------------------------

Store::Store(int dimension) : dimension_(dimension) {}

Store Store::open(const std::string& path, int dimension) {
  Store store(dimension);
  store.path_ = path;
  std::ifstream in(path);
  if (in) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto pm = postmortem_from_json(line, dimension);
      size_t idx = store.rows_.size();
      if (!store.by_id_.emplace(pm.id, idx).second)
        throw Error(ErrorKind::DuplicateId, "duplicate postmortem id in store file: " + pm.id);
      store.rows_.push_back(std::move(pm));
    }
  }
  return store;
}

void Store::store_postmortem(const Postmortem& pm) {
  if (pm.embedding.dimension() != dimension_)
    throw Error(ErrorKind::DimensionMismatch,
                "postmortem " + pm.id + " embedding dimension " +
                    std::to_string(pm.embedding.dimension()) + " != store dimension " +
                    std::to_string(dimension_));
  if (by_id_.count(pm.id))
    throw Error(ErrorKind::DuplicateId, "duplicate postmortem id: " + pm.id);
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw Error(ErrorKind::Io, "cannot append to store file " + path_);
    out << postmortem_to_json(pm) << "\n";
  }
  by_id_.emplace(pm.id, rows_.size());
  rows_.push_back(pm);
}

std::vector<Retrieved> Store::retrieve(const std::string& query_text, const Embedder& embedder,
                                       const RetrievalConfig& cfg) const {
  EmbeddingVector query = embedder.embed(query_text);

  struct Scored {
    double distance;
    const Postmortem* pm;
  };
  std::vector<Scored> scored;
  scored.reserve(rows_.size());
  for (const auto& pm : rows_) {
    if (pm.primary_category == scenario::kFrameworkErrorCategory) continue;
    scored.push_back({cosine_distance(query, pm.embedding), &pm});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.pm->id < b.pm->id;
  });

  // Pipeline order pinned: pool cap truncates the candidate set before the
  // distance threshold and the final k-cap are applied.
  if (cfg.pool_cap && scored.size() > static_cast<size_t>(*cfg.pool_cap))
    scored.resize(static_cast<size_t>(*cfg.pool_cap));
  std::vector<Retrieved> out;
  for (const auto& s : scored) {
    if (s.distance > cfg.max_distance) continue;
    out.push_back({*s.pm, s.distance});
    if (static_cast<int>(out.size()) >= cfg.k) break;
  }
  return out;
}

std::unique_ptr<Embedder> make_embedder(EmbedderKind kind, int dimension) {
  if (kind == EmbedderKind::Deterministic)
    return std::make_unique<DeterministicEmbedder>(dimension);
  return std::make_unique<TokenHashEmbedder>(dimension);
}

}  // namespace breakage::experience
