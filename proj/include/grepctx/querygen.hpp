#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "grepctx/corpus.hpp"

namespace grepctx {

struct CompletionTask {
  std::string task_id;
  std::string file;
  int cursor_line = 0;
  int cursor_column = 0;
  std::string local_context;  // prefix text preceding the cursor
  std::optional<std::string> ground_truth;
  std::optional<std::set<std::string>> ground_truth_identifiers;
  Language language = Language::other;
};

enum class KeywordKind { class_name, method_name, variable_name, other };

inline const char* keyword_kind_name(KeywordKind k) {
  switch (k) {
    case KeywordKind::class_name: return "class_name";
    case KeywordKind::method_name: return "method_name";
    case KeywordKind::variable_name: return "variable_name";
    default: return "other";
  }
}

struct LexicalQuery {
  std::string query_id;
  std::string pattern;
  KeywordKind kind = KeywordKind::other;
  bool uses_wildcard = false;
  bool case_sensitive = true;
};

enum class GeneratorSource { heuristic, external };

struct QuerySet {
  std::string task_id;
  std::vector<LexicalQuery> queries;
  GeneratorSource source = GeneratorSource::heuristic;
};

struct ClassifiedIdentifier {
  std::string name;
  KeywordKind kind = KeywordKind::variable_name;
};

namespace detail {

inline bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline bool is_pure_number(const std::string& tok) {
  return !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '_';
  });
}

inline bool is_capitalized_camel(const std::string& tok) {
  if (tok.empty() || !std::isupper(static_cast<unsigned char>(tok[0]))) return false;
  return std::any_of(tok.begin() + 1, tok.end(),
                     [](char c) { return std::islower(static_cast<unsigned char>(c)); });
}

inline const std::set<std::string>& language_keywords(Language lang) {
  static const std::set<std::string> python = {
      "False", "None",   "True",  "and",    "as",       "assert", "async", "await",  "break",
      "class", "continue", "def", "del",    "elif",     "else",   "except", "finally", "for",
      "from",  "global", "if",    "import", "in",       "is",     "lambda", "nonlocal", "not",
      "or",    "pass",   "raise", "return", "try",      "while",  "with",   "yield",   "self",
      "cls",   "print",  "len",   "range",  "super"};
  static const std::set<std::string> java = {
      "abstract", "assert",  "boolean",  "break",     "byte",    "case",    "catch",   "char",
      "class",    "const",   "continue", "default",   "do",      "double",  "else",    "enum",
      "extends",  "final",   "finally",  "float",     "for",     "goto",    "if",      "implements",
      "import",   "instanceof", "int",   "interface", "long",    "native",  "new",     "package",
      "private",  "protected", "public", "return",    "short",   "static",  "strictfp", "super",
      "switch",   "synchronized", "this", "throw",    "throws",  "transient", "try",   "void",
      "volatile", "while",   "var",     "record",     "String",  "System",  "null",    "true",
      "false"};
  static const std::set<std::string> generic = {"if", "else", "for", "while", "return", "class",
                                                "def", "self", "this", "new", "import", "from"};
  switch (lang) {
    case Language::python: return python;
    case Language::java: return java;
    default: return generic;
  }
}

struct LexToken {
  std::string text;
  bool in_string = false;     // inside a quoted literal
  std::string prev_word;      // previous identifier-ish token on the line, if any
  char next_nonspace = '\0';  // first non-space char after the token
  char prev_nonspace = '\0';  // last non-space char before the token
};

// Line-oriented lexical scan; tracks quote state per line (good enough for
// single-line string literals, which is all the classifier needs).
inline std::vector<LexToken> lex_line(const std::string& line) {
  std::vector<LexToken> out;
  std::string prev_word;
  char quote = '\0';
  std::size_t i = 0;
  char prev_nonspace = '\0';
  while (i < line.size()) {
    char c = line[i];
    if (quote) {
      if (c == '\\' && i + 1 < line.size()) {
        i += 2;
        continue;
      }
      if (c == quote) quote = '\0';
      if (is_ident_char(c)) {
        std::size_t j = i;
        while (j < line.size() && is_ident_char(line[j])) ++j;
        LexToken t;
        t.text = line.substr(i, j - i);
        t.in_string = true;
        out.push_back(std::move(t));
        i = j;
        continue;
      }
      ++i;
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
      prev_nonspace = c;
      ++i;
      continue;
    }
    if (is_ident_char(c)) {
      std::size_t j = i;
      while (j < line.size() && is_ident_char(line[j])) ++j;
      LexToken t;
      t.text = line.substr(i, j - i);
      t.prev_word = prev_word;
      t.prev_nonspace = prev_nonspace;
      std::size_t k = j;
      while (k < line.size() && line[k] == ' ') ++k;
      t.next_nonspace = k < line.size() ? line[k] : '\0';
      prev_word = t.text;
      prev_nonspace = line[j - 1];
      out.push_back(std::move(t));
      i = j;
      continue;
    }
    if (!std::isspace(static_cast<unsigned char>(c))) {
      prev_nonspace = c;
      if (c != '.') prev_word.clear();
    }
    ++i;
  }
  return out;
}

}  // namespace detail

/// Scans the trailing `window_lines` of the local context and returns the
/// identifiers found there, classified and ordered nearest-to-cursor first.
inline std::vector<ClassifiedIdentifier> extract_identifiers(const std::string& local_context,
                                                             Language language,
                                                             int window_lines = 20) {
  auto lines = detail::split_lines(local_context);
  std::size_t first = lines.size() > static_cast<std::size_t>(window_lines)
                          ? lines.size() - static_cast<std::size_t>(window_lines)
                          : 0;
  const auto& keywords = detail::language_keywords(language);

  static const std::set<std::string> class_intro = {"class", "interface", "enum", "extends",
                                                    "implements", "new", "struct", "record"};
  static const std::set<std::string> def_intro = {"def", "fn", "func", "function"};

  std::vector<ClassifiedIdentifier> ordered;  // nearest first
  std::set<std::string> seen;
  // Walk lines from the cursor outward, and tokens right-to-left within a line.
  for (std::size_t li = lines.size(); li-- > first;) {
    auto toks = detail::lex_line(lines[li]);
    bool import_line = !toks.empty() && (toks[0].text == "import" || toks[0].text == "from");
    for (std::size_t ti = toks.size(); ti-- > 0;) {
      const auto& t = toks[ti];
      if (detail::is_pure_number(t.text)) continue;
      KeywordKind kind;
      if (t.in_string) {
        kind = KeywordKind::other;
      } else if (keywords.count(t.text)) {
        continue;
      } else if (class_intro.count(t.prev_word) ||
                 (import_line && std::isupper(static_cast<unsigned char>(t.text[0]))) ||
                 detail::is_capitalized_camel(t.text)) {
        kind = KeywordKind::class_name;
      } else if (t.next_nonspace == '(' || def_intro.count(t.prev_word)) {
        kind = KeywordKind::method_name;
      } else {
        kind = KeywordKind::variable_name;
      }
      if (seen.insert(t.text).second) ordered.push_back({t.text, kind});
    }
  }
  return ordered;
}

namespace detail {

// If the pattern denotes one literal string (no metacharacters except
// backslash-escaped punctuation), returns that string; otherwise nullopt.
inline std::optional<std::string> literal_of(const std::string& pattern) {
  static const std::string meta = R"(.*+?|()[]{}^$)";
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    char c = pattern[i];
    if (c == '\\') {
      if (i + 1 >= pattern.size()) return std::nullopt;
      char n = pattern[++i];
      if (std::isalnum(static_cast<unsigned char>(n))) return std::nullopt;  // \b, \s, \d, ...
      out += n;
      continue;
    }
    if (meta.find(c) != std::string::npos) return std::nullopt;
    out += c;
  }
  return out;
}

inline bool is_literal_pattern(const std::string& pattern) {
  return literal_of(pattern).has_value();
}

inline bool pattern_compiles(const std::string& pattern, bool case_sensitive = true) {
  try {
    auto flags = std::regex::ECMAScript;
    if (!case_sensitive) flags |= std::regex::icase;
    std::regex re(pattern, flags);
    return true;
  } catch (const std::regex_error&) {
    return false;
  }
}

// Splits an identifier into its camelCase / snake_case parts.
inline std::vector<std::string> name_parts(const std::string& name) {
  std::vector<std::string> parts;
  std::string cur;
  for (std::size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    if (c == '_') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
      continue;
    }
    if (std::isupper(static_cast<unsigned char>(c)) && !cur.empty() &&
        std::islower(static_cast<unsigned char>(cur.back()))) {
      parts.push_back(cur);
      cur.clear();
    }
    cur += c;
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

}  // namespace detail

/// Deterministic heuristic substitute for the LLM query phase: definition
/// patterns for class names, call-site plus definition patterns for method
/// names, literal tokens for variables, and `.*` fuzzy variants when fewer
/// than m distinct identifiers are available.
inline QuerySet generate_queries(const CompletionTask& task, int m = 10, int window_lines = 20) {
  QuerySet qs;
  qs.task_id = task.task_id;
  qs.source = GeneratorSource::heuristic;
  if (m < 1) return qs;

  auto ids = extract_identifiers(task.local_context, task.language, window_lines);
  std::set<std::string> seen_patterns;
  auto add = [&](const std::string& pattern, KeywordKind kind) {
    if (static_cast<int>(qs.queries.size()) >= m) return;
    if (pattern.empty() || !seen_patterns.insert(pattern).second) return;
    if (!detail::pattern_compiles(pattern)) return;
    LexicalQuery q;
    q.query_id = "q" + std::to_string(qs.queries.size() + 1);
    q.pattern = pattern;
    q.kind = kind;
    q.uses_wildcard = !detail::is_literal_pattern(pattern);
    qs.queries.push_back(std::move(q));
  };

  for (const auto& id : ids) {
    if (static_cast<int>(qs.queries.size()) >= m) break;
    switch (id.kind) {
      case KeywordKind::class_name:
        add("class " + id.name, KeywordKind::class_name);
        add(id.name, KeywordKind::class_name);
        break;
      case KeywordKind::method_name:
        add(id.name + "\\(", KeywordKind::method_name);
        if (task.language == Language::python) add("def " + id.name, KeywordKind::method_name);
        break;
      case KeywordKind::variable_name:
        add(id.name, KeywordKind::variable_name);
        break;
      case KeywordKind::other:
        add(id.name, KeywordKind::other);
        break;
    }
  }

  // Undersubscribed: add fuzzy variants mirroring wildcard usage.
  if (static_cast<int>(qs.queries.size()) < m) {
    for (const auto& id : ids) {
      if (static_cast<int>(qs.queries.size()) >= m) break;
      if (id.kind == KeywordKind::class_name) {
        add("class.*" + id.name, KeywordKind::class_name);
        continue;
      }
      auto parts = detail::name_parts(id.name);
      if (parts.size() >= 2) add(parts.front() + ".*" + parts.back(), id.kind);
    }
  }
  return qs;
}

struct ExternalCommand {
  std::string pattern;
  bool case_sensitive = true;
};

struct ExternalResponse {
  std::string task_id;
  std::vector<ExternalCommand> commands;
};

/// Maps an external generator's response onto a QuerySet. Honors only the
/// pattern and case flag; patterns that fail to compile are dropped with a
/// warning and the rest kept. Throws std::runtime_error on task_id mismatch.
inline QuerySet parse_external_queries(const std::string& task_id, const ExternalResponse& resp,
                                       int m = 10, std::vector<std::string>* warnings = nullptr) {
  if (resp.task_id != task_id)
    throw std::runtime_error("external generator: response task_id '" + resp.task_id +
                             "' does not match request '" + task_id + "'");
  QuerySet qs;
  qs.task_id = task_id;
  qs.source = GeneratorSource::external;
  for (const auto& cmd : resp.commands) {
    if (static_cast<int>(qs.queries.size()) >= m) break;
    if (!detail::pattern_compiles(cmd.pattern, cmd.case_sensitive)) {
      if (warnings) warnings->push_back("dropped non-compiling pattern: " + cmd.pattern);
      continue;
    }
    LexicalQuery q;
    q.query_id = "q" + std::to_string(qs.queries.size() + 1);
    q.pattern = cmd.pattern;
    q.kind = KeywordKind::other;
    q.uses_wildcard = !detail::is_literal_pattern(cmd.pattern);
    q.case_sensitive = cmd.case_sensitive;
    qs.queries.push_back(std::move(q));
  }
  return qs;
}

}  // namespace grepctx
