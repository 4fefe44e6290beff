#include "pkgrec/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "pkgrec/error.hpp"
#include "pkgrec/source_scan.hpp"

namespace pkgrec {

namespace {

using source::Token;
using source::TokenKind;

bool is_op(const Token& t, std::string_view op) { return t.kind == TokenKind::Op && t.text == op; }
bool is_word(const Token& t, std::string_view w) { return t.kind == TokenKind::Name && t.text == w; }
bool is_plain_name(const Token& t) { return t.kind == TokenKind::Name && !source::is_keyword(t.text); }

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Cursor over one statement's tokens.
class Parser {
 public:
  explicit Parser(std::span<const Token> toks) : toks_(toks) {}

  bool done() const { return pos_ >= toks_.size(); }
  const Token* peek() const { return done() ? nullptr : &toks_[pos_]; }
  bool accept_op(std::string_view op) {
    if (!done() && is_op(toks_[pos_], op)) return ++pos_, true;
    return false;
  }
  bool accept_word(std::string_view w) {
    if (!done() && is_word(toks_[pos_], w)) return ++pos_, true;
    return false;
  }
  const Token* accept_name() {
    if (!done() && is_plain_name(toks_[pos_])) return &toks_[pos_++];
    return nullptr;
  }

  // NAME ('.' NAME)*; returns the first segment or nullptr.
  const Token* dotted_name() {
    const Token* head = accept_name();
    if (head == nullptr) return nullptr;
    while (accept_op(".")) {
      if (accept_name() == nullptr) return nullptr;
    }
    return head;
  }

  // NAME ['as' NAME]
  bool alias_target() {
    if (accept_name() == nullptr) return false;
    if (accept_word("as")) return accept_name() != nullptr;
    return true;
  }

 private:
  std::span<const Token> toks_;
  std::size_t pos_ = 0;
};

bool add_canonical(std::string_view name, std::vector<std::string>& found) {
  auto canon = lowercase(name);
  if (!is_canonical_package_name(canon)) return false;
  found.push_back(std::move(canon));
  return true;
}

// import a.b [as c] (, d [as e])*
bool parse_import(std::span<const Token> stmt, std::vector<std::string>& found) {
  Parser p(stmt.subspan(1));
  do {
    const Token* head = p.dotted_name();
    if (head == nullptr || !add_canonical(head->text, found)) return false;
    if (p.accept_word("as") && p.accept_name() == nullptr) return false;
  } while (p.accept_op(","));
  return p.done();
}

// from a.b import (x [as y], ...) | x, y | *
bool parse_from(std::span<const Token> stmt, std::vector<std::string>& found) {
  Parser p(stmt.subspan(1));
  const Token* head = p.dotted_name();
  if (head == nullptr) return false;  // includes relative imports
  if (!p.accept_word("import")) return false;
  if (p.accept_op("*")) {
    // nothing else may follow
  } else if (p.accept_op("(")) {
    if (!p.alias_target()) return false;
    while (p.accept_op(",")) {
      if (p.accept_op(")")) return p.done() && add_canonical(head->text, found);  // trailing comma
      if (!p.alias_target()) return false;
    }
    if (!p.accept_op(")")) return false;
  } else {
    do {
      if (!p.alias_target()) return false;
    } while (p.accept_op(","));
  }
  return p.done() && add_canonical(head->text, found);
}

bool is_block_keyword(const Token& t) {
  static constexpr std::string_view kBlock[] = {"if",  "elif",  "else", "try",  "except", "finally",
                                                "with", "for", "while", "def", "class",  "async"};
  if (t.kind != TokenKind::Name) return false;
  return std::find(std::begin(kBlock), std::end(kBlock), t.text) != std::end(kBlock);
}

void scan_statement(std::span<const Token> stmt, PackageSet& out) {
  if (stmt.empty()) return;
  const Token& first = stmt.front();
  std::vector<std::string> found;
  if (is_word(first, "import")) {
    if (parse_import(stmt, found)) out.insert(found.begin(), found.end());
    return;
  }
  if (is_word(first, "from")) {
    if (parse_from(stmt, found)) out.insert(found.begin(), found.end());
    return;
  }
  if (is_block_keyword(first)) {
    // One-line compound statement: `try: import ujson as json`.
    int depth = 0;
    for (std::size_t i = 1; i < stmt.size(); ++i) {
      const auto& t = stmt[i];
      if (t.kind != TokenKind::Op) continue;
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
      if (depth == 0 && t.text == ":") {
        scan_statement(stmt.subspan(i + 1), out);
        return;
      }
    }
  }
}

}  // namespace

bool is_canonical_package_name(std::string_view name) {
  if (name.empty()) return false;
  const auto first = static_cast<unsigned char>(name.front());
  if (!(std::islower(first) || first == '_')) return false;
  return std::all_of(name.begin(), name.end(), [](char ch) {
    const auto c = static_cast<unsigned char>(ch);
    return std::islower(c) || std::isdigit(c) || c == '_';
  });
}

PackageSet extract_imports(std::string_view source_text) {
  PackageSet out;
  const auto tokens = source::tokenize(source_text);
  for (const auto& line : source::logical_lines(tokens)) {
    std::span<const Token> rest(line);
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      const auto& t = rest[i];
      if (t.kind != TokenKind::Op) continue;
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
      if (depth == 0 && t.text == ";") {
        scan_statement(rest.subspan(start, i - start), out);
        start = i + 1;
      }
    }
    scan_statement(rest.subspan(start), out);
  }
  return out;
}

std::vector<std::string> extract_notebook_sources(std::string_view json_text) {
  nlohmann::json nb;
  try {
    nb = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw NotebookFormatError(std::string("invalid JSON: ") + e.what());
  }
  if (!nb.is_object() || !nb.contains("cells") || !nb["cells"].is_array()) {
    throw NotebookFormatError("missing cells array");
  }
  std::vector<std::string> sources;
  for (const auto& cell : nb["cells"]) {
    if (!cell.is_object()) throw NotebookFormatError("cell is not an object");
    const auto type = cell.find("cell_type");
    if (type == cell.end() || !type->is_string()) throw NotebookFormatError("cell without cell_type");
    if (type->get<std::string>() != "code") continue;
    const auto src = cell.find("source");
    if (src == cell.end()) throw NotebookFormatError("code cell without source");
    if (src->is_string()) {
      sources.push_back(src->get<std::string>());
    } else if (src->is_array()) {
      std::string joined;
      for (const auto& piece : *src) {
        if (!piece.is_string()) throw NotebookFormatError("non-string source line");
        joined += piece.get<std::string>();
      }
      sources.push_back(std::move(joined));
    } else {
      throw NotebookFormatError("source must be a string or list of strings");
    }
  }
  return sources;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

SourceUnit read_source_unit(const std::filesystem::path& path, std::string id) {
  SourceUnit unit;
  unit.path = path.string();
  unit.id = id.empty() ? unit.path : std::move(id);
  unit.kind = path.extension() == ".ipynb" ? SourceKind::notebook : SourceKind::script;
  unit.text = read_text_file(path);
  return unit;
}

std::string unit_code(const SourceUnit& unit) {
  if (unit.kind == SourceKind::script) return unit.text;
  std::string joined;
  for (const auto& cell : extract_notebook_sources(unit.text)) {
    joined += cell;
    joined += '\n';
  }
  return joined;
}

PackageSet unit_imports(const SourceUnit& unit) { return extract_imports(unit_code(unit)); }

Corpus load_corpus(const std::filesystem::path& root, bool include_notebooks) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("not a readable directory: " + root.string());

  std::vector<fs::path> files;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw IoError("cannot scan " + root.string() + ": " + ec.message());
  Corpus corpus;
  corpus.source_root = root.string();
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) {
      ++corpus.skipped_files;
      ec.clear();
      continue;
    }
    if (!it->is_regular_file(ec)) continue;
    const auto ext = it->path().extension();
    if (ext == ".py" || (include_notebooks && ext == ".ipynb")) files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());

  for (const auto& file : files) {
    try {
      const auto unit = read_source_unit(file, fs::relative(file, root).generic_string());
      auto packages = unit_imports(unit);
      if (!packages.empty()) corpus.records.push_back({unit.id, std::move(packages)});
    } catch (const Error&) {
      ++corpus.skipped_files;
    }
  }
  return corpus;
}

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& rec : corpus.records) {
    nlohmann::json line = {{"unit_id", rec.unit_id}, {"packages", rec.packages}};
    out << line.dump() << '\n';
  }
}

Corpus read_corpus_jsonl(std::istream& in, std::string source_root) {
  Corpus corpus;
  corpus.source_root = std::move(source_root);
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ImportRecord rec;
    try {
      const auto j = nlohmann::json::parse(line);
      rec.unit_id = j.at("unit_id").get<std::string>();
      for (const auto& p : j.at("packages")) rec.packages.insert(p.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
    for (const auto& p : rec.packages) {
      if (!is_canonical_package_name(p)) throw FormatError("corpus line " + std::to_string(lineno) + ": bad package name '" + p + "'");
    }
    if (!seen.insert(rec.unit_id).second) throw FormatError("duplicate unit_id '" + rec.unit_id + "'");
    if (!rec.packages.empty()) corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

Corpus read_corpus_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_corpus_jsonl(in, path.parent_path().string());
}

}  // namespace pkgrec
