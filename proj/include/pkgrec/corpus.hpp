#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pkgrec {

/// Canonical top-level package names, lowercased. Ordered for determinism.
using PackageSet = std::set<std::string>;

enum class SourceKind { script, notebook };

struct SourceUnit {
  std::string id;
  std::string path;
  SourceKind kind = SourceKind::script;
  std::string text;
};

/// One source file reduced to the set of packages it imports.
struct ImportRecord {
  std::string unit_id;
  PackageSet packages;
};

struct Corpus {
  std::vector<ImportRecord> records;
  std::string source_root;
  /// Files that could not be read or parsed during load_corpus.
  std::size_t skipped_files = 0;
};

/// Top-level packages named by `import` / `from ... import` statements in
/// `source_text`. Relative imports are dropped; statements that do not match
/// the import grammar are ignored. Never throws.
PackageSet extract_imports(std::string_view source_text);

/// Sources of the code cells of a v4 notebook, in document order.
/// Throws NotebookFormatError on malformed JSON or a missing cells array.
std::vector<std::string> extract_notebook_sources(std::string_view json_text);

/// Reads one file; `.ipynb` files become notebook units.
SourceUnit read_source_unit(const std::filesystem::path& path, std::string id = {});

/// Analysable code of a unit: the file itself for scripts, the code cells
/// joined by newlines for notebooks.
std::string unit_code(const SourceUnit& unit);

PackageSet unit_imports(const SourceUnit& unit);

/// Recursively scans `root` for `.py` files (and `.ipynb` when
/// `include_notebooks`). Records with no imports are dropped; records are
/// ordered by relative path, which is also the unit id.
Corpus load_corpus(const std::filesystem::path& root, bool include_notebooks);

/// True for names matching [a-z_][a-z0-9_]*.
bool is_canonical_package_name(std::string_view name);

// JSON-lines interchange: {"unit_id": ..., "packages": [...]} per line.
void write_corpus_jsonl(const Corpus& corpus, std::ostream& out);
Corpus read_corpus_jsonl(std::istream& in, std::string source_root = {});
Corpus read_corpus_jsonl(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace pkgrec
