#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "pkgrec/embed.hpp"
#include "pkgrec/tfidf.hpp"

namespace pkgrec {

inline constexpr int kBundleFormatVersion = 1;
inline constexpr std::uint32_t kEmbeddingFileVersion = 1;

/// Everything the recommender needs at serving time. Either half may be
/// absent: `train` writes the embeddings, `index` adds catalog + TF-IDF.
struct ModelBundle {
  std::optional<EmbeddingModel> embeddings;
  std::optional<LibraryCatalog> catalog;
  std::optional<TfIdfIndex> index;
  int format_version = kBundleFormatVersion;
};

/// Writes manifest.json, vocab.tsv, embeddings.bin, catalog.jsonl and
/// tfidf.json (the latter four only for the parts present). Throws IoError.
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& dir);

/// Throws FormatError on corrupt, truncated or newer-version files and
/// IoError when a file cannot be read.
ModelBundle load_bundle(const std::filesystem::path& dir);

struct EmbeddingMatrices {
  std::uint32_t rows = 0;
  std::uint32_t dim = 0;
  std::vector<float> target;
  std::vector<float> context;
};

// embeddings.bin: "LIBV", u32 version, u32 rows, u32 dim, then the target
// rows and the context rows, all little-endian, floats as IEEE-754 binary32.
std::vector<unsigned char> encode_embeddings(const EmbeddingMatrices& m);
EmbeddingMatrices decode_embeddings(const std::vector<unsigned char>& bytes);

}  // namespace pkgrec
