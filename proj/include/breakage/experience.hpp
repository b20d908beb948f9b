// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "breakage/core.hpp"
#include "breakage/scenario.hpp"

namespace breakage::experience {

inline constexpr int kDefaultDimension = 1024;

struct EmbeddingVector {
  Eigen::VectorXf values;
  bool normalized = false;

  int dimension() const { return static_cast<int>(values.size()); }
};

// 1 - dot(a, b) for unit vectors; in [0, 2]. Accumulated in double with a
// fixed scalar order so results do not depend on SIMD width.
double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b);

void normalize(EmbeddingVector& v);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string name() const = 0;
  virtual EmbeddingVector embed(const std::string& text) const = 0;
};

// Control-arm embedder: DJB2 hash of the UTF-8 bytes seeds an xorshift64*
// stream; `dimension` uniforms in [-1, 1], then L2-normalized. Reproducible
// but semantically random: distinct texts land near-orthogonal, so the 0.40
// distance threshold drops every result.
class DeterministicEmbedder : public Embedder {
 public:
  explicit DeterministicEmbedder(int dimension = kDefaultDimension) : dimension_(dimension) {}
  std::string name() const override { return "deterministic"; }
  EmbeddingVector embed(const std::string& text) const override;

 private:
  int dimension_;
};

// Treatment-arm stand-in for an external embedding service: bag-of-tokens
// feature hashing with sign bits. Shared vocabulary between texts yields
// genuinely close vectors, which is all the retrieval experiments need.
class TokenHashEmbedder : public Embedder {
 public:
  explicit TokenHashEmbedder(int dimension = kDefaultDimension) : dimension_(dimension) {}
  std::string name() const override { return "external"; }
  EmbeddingVector embed(const std::string& text) const override;

 private:
  int dimension_;
};

// Fixture-backed embedder for tests of the external interface: returns
// recorded vectors keyed by exact text.
class RecordedEmbedder : public Embedder {
 public:
  RecordedEmbedder(std::map<std::string, EmbeddingVector> fixtures, int dimension)
      : fixtures_(std::move(fixtures)), dimension_(dimension) {}
  std::string name() const override { return "recorded"; }
  EmbeddingVector embed(const std::string& text) const override;

 private:
  std::map<std::string, EmbeddingVector> fixtures_;
  int dimension_;
};

enum class Outcome { Resolved, Regressed, Inconclusive };

std::string outcome_to_string(Outcome o);
std::optional<Outcome> outcome_from_string(const std::string& s);

struct HypothesisRecord {
  std::int64_t at_tick = 0;
  scenario::CategoryId category;
  double confidence = 0.0;
  std::string note;

  bool operator==(const HypothesisRecord&) const = default;
};

struct Postmortem {
  std::string id;
  std::string scenario_id;
  std::int64_t created_tick = 0;
  scenario::CategoryId primary_category;
  std::vector<scenario::CategoryId> secondary_categories;
  std::string narrative;
  std::vector<scenario::ToolName> actions_taken;
  Outcome outcome = Outcome::Inconclusive;
  std::vector<HypothesisRecord> hypotheses;
  EmbeddingVector embedding;
  std::string arm;
  std::int64_t run_seed = 0;
};

// Text fed to the embedder: narrative, category, and action names joined
// with fixed separators.
std::string embedding_text(const Postmortem& pm);

enum class EmbedderKind { Deterministic, External };

struct RetrievalConfig {
  double max_distance = 0.40;
  std::optional<int> pool_cap;  // nullopt = unlimited
  int k = 5;
  EmbedderKind embedder = EmbedderKind::External;
};

// Reads BREAKAGE_EMBEDDER / BREAKAGE_RETRIEVAL_MAX_DISTANCE /
// BREAKAGE_RETRIEVAL_POOL_CAP over the given defaults.
RetrievalConfig apply_env_overrides(RetrievalConfig cfg);

struct Retrieved {
  Postmortem postmortem;
  double distance = 0.0;
};

// Append-only postmortem store with an in-memory index. Optionally backed by
// a newline-delimited record file (one JSON object per line, embedding as
// base64 little-endian float32), replayed on open.
class Store {
 public:
  explicit Store(int dimension = kDefaultDimension);

  // Opens (or creates) a file-backed store and replays existing records.
  static Store open(const std::string& path, int dimension = kDefaultDimension);

  void store_postmortem(const Postmortem& pm);

  // Exact cosine scan in a fixed pipeline order: (1) scan, (2) truncate to
  // pool_cap nearest, (3) drop rows beyond max_distance, (4) keep top k.
  // Ties break by (distance, id). framework-error rows never surface.
  std::vector<Retrieved> retrieve(const std::string& query_text, const Embedder& embedder,
                                  const RetrievalConfig& cfg) const;

  const std::vector<Postmortem>& rows() const { return rows_; }
  size_t size() const { return rows_.size(); }
  int dimension() const { return dimension_; }

 private:
  int dimension_;
  std::vector<Postmortem> rows_;
  std::map<std::string, size_t> by_id_;
  std::string path_;  // empty for in-memory stores
};

std::string postmortem_to_json(const Postmortem& pm);
Postmortem postmortem_from_json(const std::string& line, int dimension);

std::unique_ptr<Embedder> make_embedder(EmbedderKind kind, int dimension = kDefaultDimension);

}  // namespace breakage::experience
