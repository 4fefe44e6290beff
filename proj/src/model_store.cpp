#include "pkgrec/model_store.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pkgrec/error.hpp"

namespace pkgrec {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr unsigned char kMagic[4] = {'L', 'I', 'B', 'V'};
constexpr std::size_t kHeaderBytes = 16;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::vector<unsigned char>& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

void write_file(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ojson config_json(const EmbeddingModel& m) {
  const auto& c = m.config();
  return ojson{{"dim", c.dim},
               {"epochs", c.epochs},
               {"learning_rate", c.learning_rate},
               {"lr_schedule", to_string(c.lr_schedule)},
               {"negatives", c.negatives},
               {"seed", c.seed},
               {"sampler_exponent", c.sampler.exponent},
               {"reject_threshold", c.sampler.reject_threshold},
               {"max_retries", c.sampler.max_retries},
               {"allow_fallback", c.sampler.allow_fallback},
               {"allow_zero_negatives", c.allow_zero_negatives},
               {"min_count", m.vocab().min_count()}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.dim = j.at("dim").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.lr_schedule = lr_schedule_from_string(j.at("lr_schedule").get<std::string>());
  c.negatives = j.at("negatives").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.sampler.exponent = j.at("sampler_exponent").get<double>();
  c.sampler.reject_threshold = j.at("reject_threshold").get<std::int64_t>();
  c.sampler.max_retries = j.at("max_retries").get<int>();
  c.sampler.allow_fallback = j.at("allow_fallback").get<bool>();
  c.allow_zero_negatives = j.value("allow_zero_negatives", false);
  return c;
}

std::string vocab_tsv(const Vocabulary& vocab) {
  std::string out;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out += std::to_string(i) + '\t' + vocab.name(static_cast<int>(i)) + '\t' +
           std::to_string(vocab.freq(static_cast<int>(i))) + '\n';
  }
  return out;
}

Vocabulary parse_vocab_tsv(const std::string& text, int min_count) {
  std::vector<std::string> names;
  std::vector<std::int64_t> freqs;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string id, name, freq;
    if (!std::getline(fields, id, '\t') || !std::getline(fields, name, '\t') || !std::getline(fields, freq)) {
      throw FormatError("vocab.tsv: malformed line '" + line + "'");
    }
    try {
      if (std::stoull(id) != names.size()) throw FormatError("vocab.tsv: ids must be 0..V-1 in order");
      freqs.push_back(std::stoll(freq));
    } catch (const std::logic_error&) {
      throw FormatError("vocab.tsv: non-numeric field in '" + line + "'");
    }
    names.push_back(name);
  }
  try {
    return Vocabulary(std::move(names), std::move(freqs), min_count);
  } catch (const InvalidArgumentError& e) {
    throw FormatError(std::string("vocab.tsv: ") + e.what());
  }
}

ojson tfidf_json(const TfIdfIndex& index) {
  ojson docs = ojson::array();
  for (std::size_t d = 0; d < index.size(); ++d) {
    ojson doc = ojson::array();
    for (const auto& e : index.doc_vector(d)) doc.push_back(ojson::array({e.term, e.weight}));
    docs.push_back(std::move(doc));
  }
  return ojson{{"tokenizer",
                {{"min_token_length", index.tokenizer().min_token_length},
                 {"use_stop_words", index.tokenizer().use_stop_words}}},
               {"terms", index.terms()},
               {"idf", index.idf()},
               {"packages", index.packages()},
               {"doc_vectors", std::move(docs)}};
}

TfIdfIndex tfidf_from_json(const nlohmann::json& j) {
  TokenizerConfig tok;
  tok.min_token_length = j.at("tokenizer").at("min_token_length").get<std::size_t>();
  tok.use_stop_words = j.at("tokenizer").at("use_stop_words").get<bool>();
  std::vector<SparseVector> docs;
  for (const auto& doc : j.at("doc_vectors")) {
    SparseVector v;
    for (const auto& e : doc) v.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<double>()});
    docs.push_back(std::move(v));
  }
  return TfIdfIndex(j.at("terms").get<std::vector<std::string>>(), j.at("idf").get<std::vector<double>>(),
                    j.at("packages").get<std::vector<std::string>>(), std::move(docs), tok);
}

}  // namespace

std::vector<unsigned char> encode_embeddings(const EmbeddingMatrices& m) {
  const std::size_t n = static_cast<std::size_t>(m.rows) * m.dim;
  if (m.target.size() != n || m.context.size() != n) throw DimensionError("matrix sizes do not match rows x dim");
  std::vector<unsigned char> out(kMagic, kMagic + 4);
  out.reserve(kHeaderBytes + 8 * n);
  put_u32(out, kEmbeddingFileVersion);
  put_u32(out, m.rows);
  put_u32(out, m.dim);
  for (float x : m.target) put_u32(out, std::bit_cast<std::uint32_t>(x));
  for (float x : m.context) put_u32(out, std::bit_cast<std::uint32_t>(x));
  return out;
}

EmbeddingMatrices decode_embeddings(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < kHeaderBytes) throw FormatError("embeddings.bin: truncated header");
  if (!std::equal(kMagic, kMagic + 4, bytes.begin())) throw FormatError("embeddings.bin: bad magic");
  const auto version = get_u32(bytes, 4);
  if (version != kEmbeddingFileVersion) {
    throw FormatError("embeddings.bin: unsupported version " + std::to_string(version));
  }
  EmbeddingMatrices m;
  m.rows = get_u32(bytes, 8);
  m.dim = get_u32(bytes, 12);
  const auto n = static_cast<std::uint64_t>(m.rows) * m.dim;
  const auto expected = kHeaderBytes + 8 * n;
  if (bytes.size() < expected) throw FormatError("embeddings.bin: truncated data");
  if (bytes.size() > expected) throw FormatError("embeddings.bin: trailing bytes");
  m.target.resize(n);
  m.context.resize(n);
  std::size_t at = kHeaderBytes;
  for (auto& x : m.target) x = std::bit_cast<float>(get_u32(bytes, at)), at += 4;
  for (auto& x : m.context) x = std::bit_cast<float>(get_u32(bytes, at)), at += 4;
  return m;
}

void save_bundle(const ModelBundle& bundle, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  if (bundle.index.has_value() != bundle.catalog.has_value()) {
    throw InvalidArgumentError("catalog and index must be saved together");
  }

  ojson manifest;
  manifest["format_version"] = bundle.format_version;
  manifest["components"] = {{"embeddings", bundle.embeddings.has_value()}, {"index", bundle.index.has_value()}};

  if (bundle.embeddings) {
    const auto& m = *bundle.embeddings;
    manifest["vocab_size"] = m.rows();
    manifest["dim"] = m.dim();
    manifest["config"] = config_json(m);
    manifest["training"] = {{"epoch_losses", m.log().epoch_losses},
                            {"steps", m.log().steps},
                            {"fallback_negatives", m.log().fallback_negatives},
                            {"missing_negatives", m.log().missing_negatives}};
    write_file(dir / "vocab.tsv", vocab_tsv(m.vocab()));
    EmbeddingMatrices mats{static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.dim()),
                           {m.target_matrix().begin(), m.target_matrix().end()},
                           {m.context_matrix().begin(), m.context_matrix().end()}};
    const auto bytes = encode_embeddings(mats);
    write_file(dir / "embeddings.bin", std::string(bytes.begin(), bytes.end()));
  }
  if (bundle.index) {
    manifest["n_catalog"] = bundle.catalog->size();
    manifest["n_indexed"] = bundle.index->size();
    manifest["n_terms"] = bundle.index->terms().size();
    std::ostringstream catalog;
    write_catalog_jsonl(*bundle.catalog, catalog);
    write_file(dir / "catalog.jsonl", catalog.str());
    write_file(dir / "tfidf.json", tfidf_json(*bundle.index).dump() + "\n");
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

ModelBundle load_bundle(const fs::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw IoError("no manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest.json: ") + e.what());
  }

  ModelBundle bundle;
  try {
    bundle.format_version = manifest.at("format_version").get<int>();
    if (bundle.format_version > kBundleFormatVersion || bundle.format_version < 1) {
      throw FormatError("unsupported bundle format_version " + std::to_string(bundle.format_version) +
                        " (this build reads up to " + std::to_string(kBundleFormatVersion) + ")");
    }
    const auto& components = manifest.at("components");

    if (components.at("embeddings").get<bool>()) {
      const auto config = config_from_json(manifest.at("config"));
      const auto min_count = manifest.at("config").at("min_count").get<int>();
      auto vocab = parse_vocab_tsv(read_file(dir / "vocab.tsv"), min_count);
      const auto raw = read_file(dir / "embeddings.bin");
      auto mats = decode_embeddings(std::vector<unsigned char>(raw.begin(), raw.end()));
      if (mats.rows != vocab.size() || mats.rows != manifest.at("vocab_size").get<std::size_t>()) {
        throw FormatError("embeddings.bin row count does not match the vocabulary");
      }
      if (static_cast<int>(mats.dim) != manifest.at("dim").get<int>()) {
        throw FormatError("embeddings.bin dim does not match manifest");
      }
      TrainingLog log;
      if (manifest.contains("training")) {
        const auto& t = manifest["training"];
        log.epoch_losses = t.at("epoch_losses").get<std::vector<double>>();
        log.steps = t.at("steps").get<std::size_t>();
        log.fallback_negatives = t.at("fallback_negatives").get<std::size_t>();
        log.missing_negatives = t.at("missing_negatives").get<std::size_t>();
      }
      bundle.embeddings.emplace(std::move(vocab), static_cast<int>(mats.dim), std::move(mats.target),
                                std::move(mats.context), config, std::move(log));
    }
    if (components.at("index").get<bool>()) {
      std::istringstream catalog(read_file(dir / "catalog.jsonl"));
      bundle.catalog = read_catalog_jsonl(catalog);
      bundle.index = tfidf_from_json(nlohmann::json::parse(read_file(dir / "tfidf.json")));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bundle: ") + e.what());
  } catch (const InvalidArgumentError& e) {
    throw FormatError(std::string("bundle: ") + e.what());
  } catch (const DimensionError& e) {
    throw FormatError(std::string("bundle: ") + e.what());
  }
  return bundle;
}

}  // namespace pkgrec
